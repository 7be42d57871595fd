//! Parameter sweeps and the bundled figure presets.
//!
//! A sweep varies exactly one drive parameter over a uniform grid, solving
//! the stationary state at each point. The threaded variant partitions the
//! grid between workers; every point runs the identical code path, so the
//! serial and threaded results are bitwise equal.

use crate::error::{Error, Result};
use crate::model::{build_liouvillian, default_rates, detunings_from_delta, DriveParams, RateSet};
use crate::observables::{observables_of, ObservableRow};
use crate::solver::steady_state;

/// Which drive parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Symmetric two-photon detuning: delta1 = value, delta2 = -value.
    Delta,
    Phi,
    V,
    BigDelta,
    Q,
    Kappa,
    Omega1,
    Omega2,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Delta => "delta",
            SweepParam::Phi => "phi",
            SweepParam::V => "v",
            SweepParam::BigDelta => "big_delta",
            SweepParam::Q => "q",
            SweepParam::Kappa => "kappa",
            SweepParam::Omega1 => "omega1",
            SweepParam::Omega2 => "omega2",
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "delta" => SweepParam::Delta,
            "phi" => SweepParam::Phi,
            "v" => SweepParam::V,
            "big_delta" => SweepParam::BigDelta,
            "q" => SweepParam::Q,
            "kappa" => SweepParam::Kappa,
            "omega1" => SweepParam::Omega1,
            "omega2" => SweepParam::Omega2,
            other => {
                return Err(Error::Range(format!(
                    "unknown sweep parameter {other:?}; expected one of delta, phi, v, big_delta, q, kappa, omega1, omega2"
                )))
            }
        })
    }
}

/// Full description of a one-dimensional sweep.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: DriveParams,
    pub rates: RateSet,
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub eq13_consistent: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.rates.validate()?;
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Range("sweep bounds must be finite".into()));
        }
        if !(self.start < self.stop) {
            return Err(Error::Range(format!(
                "sweep start must be below stop, got {} .. {}",
                self.start, self.stop
            )));
        }
        if self.count < 2 {
            return Err(Error::Range(format!("sweep needs at least 2 points, got {}", self.count)));
        }
        Ok(())
    }

    /// Uniform grid with exact endpoints.
    pub fn axis(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i == self.count - 1 { self.stop } else { self.start + i as f64 * step })
            .collect()
    }
}

/// Solved sweep: the grid and one observable record per point.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub axis: Vec<f64>,
    pub rows: Vec<ObservableRow>,
}

/// Copy of `base` with the swept parameter set to `value`.
pub fn apply_param(base: &DriveParams, param: SweepParam, value: f64) -> DriveParams {
    let mut p = *base;
    match param {
        SweepParam::Delta => {
            let (d1, d2) = detunings_from_delta(value);
            p.delta1 = d1;
            p.delta2 = d2;
        }
        SweepParam::Phi => p.phi = value,
        SweepParam::V => p.v = value,
        SweepParam::BigDelta => p.big_delta = value,
        SweepParam::Q => p.q = value,
        SweepParam::Kappa => p.kappa = value,
        SweepParam::Omega1 => p.omega1 = value,
        SweepParam::Omega2 => p.omega2 = value,
    }
    p
}

fn solve_point(spec: &SweepSpec, value: f64) -> Result<ObservableRow> {
    let params = apply_param(&spec.base, spec.param, value);
    let l = build_liouvillian(&params, &spec.rates, spec.eq13_consistent)?;
    match steady_state(&l) {
        Ok(r) => {
            let mut row = observables_of(&r.x);
            row.residual_inf = r.residual_inf;
            Ok(row)
        }
        Err(Error::DegenerateSteadyState { pivot, threshold, .. }) => Err(Error::DegenerateSteadyState {
            pivot,
            threshold,
            at: Some((spec.param.as_str().to_string(), value)),
        }),
        Err(e) => Err(e),
    }
}

/// Serial sweep.
pub fn sweep_1d(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let axis = spec.axis();
    let mut rows = Vec::with_capacity(axis.len());
    for &v in &axis {
        rows.push(solve_point(spec, v)?);
    }
    Ok(SweepResult { spec: spec.clone(), axis, rows })
}

/// Threaded sweep over contiguous grid chunks; bitwise identical to
/// [`sweep_1d`]. On multiple failures the error at the lowest grid index
/// is reported, matching the serial order.
pub fn sweep_1d_threaded(spec: &SweepSpec, threads: usize) -> Result<SweepResult> {
    spec.validate()?;
    let threads = threads.max(1);
    let axis = spec.axis();
    if threads == 1 || axis.len() <= threads {
        let mut rows = Vec::with_capacity(axis.len());
        for &v in &axis {
            rows.push(solve_point(spec, v)?);
        }
        return Ok(SweepResult { spec: spec.clone(), axis, rows });
    }

    let n = axis.len();
    let chunk = n.div_ceil(threads);
    let mut results: Vec<Result<ObservableRow>> = Vec::with_capacity(n);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for part in axis.chunks(chunk) {
            handles.push(scope.spawn(move || -> Vec<Result<ObservableRow>> {
                part.iter().map(|&v| solve_point(spec, v)).collect()
            }));
        }
        for h in handles {
            results.extend(h.join().expect("sweep worker panicked"));
        }
    });

    let mut rows = Vec::with_capacity(n);
    for r in results {
        rows.push(r?);
    }
    Ok(SweepResult { spec: spec.clone(), axis, rows })
}

/// The bundled detuning-scan presets, grouped by output figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl FigureId {
    pub fn number(self) -> u32 {
        match self {
            FigureId::Fig2 => 2,
            FigureId::Fig3 => 3,
            FigureId::Fig4 => 4,
            FigureId::Fig5 => 5,
            FigureId::Fig6 => 6,
            FigureId::Fig7 => 7,
            FigureId::Fig8 => 8,
        }
    }

    pub const ALL: [FigureId; 7] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
    ];
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let digit = t.strip_prefix("fig").unwrap_or(&t);
        Ok(match digit {
            "2" => FigureId::Fig2,
            "3" => FigureId::Fig3,
            "4" => FigureId::Fig4,
            "5" => FigureId::Fig5,
            "6" => FigureId::Fig6,
            "7" => FigureId::Fig7,
            "8" => FigureId::Fig8,
            _ => return Err(Error::UnknownFigure(s.to_string())),
        })
    }
}

const DETUNING_HALF_SPAN: f64 = 0.5;
const PRESET_POINTS: usize = 1001;

fn preset_spec(base: DriveParams) -> SweepSpec {
    SweepSpec {
        base,
        rates: default_rates(),
        param: SweepParam::Delta,
        start: -DETUNING_HALF_SPAN,
        stop: DETUNING_HALF_SPAN,
        count: PRESET_POINTS,
        eq13_consistent: false,
    }
}

/// Phase label in units of pi: 0 -> "phi0", pi/4 -> "phi0.25pi".
fn phase_label(phi: f64) -> String {
    let c = phi / std::f64::consts::PI;
    if c == 0.0 {
        "phi0".to_string()
    } else {
        format!("phi{c}pi")
    }
}

/// Curve labels plus sweep specs for a bundled figure.
pub fn figure_preset_labeled(id: FigureId) -> Vec<(String, SweepSpec)> {
    let mut out = Vec::new();
    let pi4 = std::f64::consts::FRAC_PI_4;
    let pi2 = std::f64::consts::FRAC_PI_2;
    match id {
        FigureId::Fig2 => {
            for phi in [0.0, pi4, pi2] {
                let base = DriveParams { phi, ..DriveParams::default() };
                out.push((phase_label(phi), preset_spec(base)));
            }
        }
        FigureId::Fig3 => {
            for v in [0.0, 0.05, 0.1, 0.25] {
                let base = DriveParams { v, phi: pi2, ..DriveParams::default() };
                out.push((format!("v{v}"), preset_spec(base)));
            }
        }
        FigureId::Fig4 => {
            for phi in [0.0, pi4, pi2] {
                let base = DriveParams { omega2: 0.75, q: 1.0, kappa: 1.0, phi, ..DriveParams::default() };
                out.push((phase_label(phi), preset_spec(base)));
            }
        }
        FigureId::Fig5 => {
            for v in [0.0, 0.25, 0.75, 2.25] {
                let base = DriveParams { omega2: 0.75, v, q: 1.0, kappa: 1.0, phi: pi4, ..DriveParams::default() };
                out.push((format!("v{v}"), preset_spec(base)));
            }
        }
        FigureId::Fig6 => {
            for phi in [0.0, pi2] {
                for big_delta in [0.5, 1.0, 2.0, 4.0] {
                    let base = DriveParams { q: 1.0, kappa: 1.0, big_delta, phi, ..DriveParams::default() };
                    out.push((format!("{}_bigdelta{big_delta}", phase_label(phi)), preset_spec(base)));
                }
            }
        }
        FigureId::Fig7 => {
            for q in [1.0, 0.5, 0.0, -0.5, -1.0] {
                let base = DriveParams { q, kappa: 1.0, ..DriveParams::default() };
                out.push((format!("q{q}"), preset_spec(base)));
            }
        }
        FigureId::Fig8 => {
            for v in [0.0, 0.25] {
                let base = DriveParams { v, q: 1.0, kappa: 1.0, ..DriveParams::default() };
                out.push((format!("v{v}"), preset_spec(base)));
            }
        }
    }
    out
}

/// Sweep specs for a bundled figure, without labels.
pub fn figure_preset(id: FigureId) -> Vec<SweepSpec> {
    figure_preset_labeled(id).into_iter().map(|(_, s)| s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> SweepSpec {
        SweepSpec {
            base: DriveParams::default(),
            rates: default_rates(),
            param: SweepParam::Delta,
            start: -0.5,
            stop: 0.5,
            count: 21,
            eq13_consistent: false,
        }
    }

    #[test]
    fn axis_is_uniform_with_exact_endpoints() {
        let s = tiny_spec();
        let a = s.axis();
        assert_eq!(a.len(), 21);
        assert_eq!(a[0], -0.5);
        assert_eq!(a[20], 0.5);
        assert!((a[10]).abs() < 1e-15);
        let step = a[1] - a[0];
        for w in a.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-15);
        }
    }

    #[test]
    fn spec_validation_rejects_bad_grids() {
        let mut s = tiny_spec();
        s.count = 1;
        assert!(matches!(s.validate(), Err(Error::Range(_))));
        let mut s = tiny_spec();
        s.start = 0.5;
        s.stop = -0.5;
        assert!(matches!(s.validate(), Err(Error::Range(_))));
        let mut s = tiny_spec();
        s.start = f64::NEG_INFINITY;
        assert!(matches!(s.validate(), Err(Error::Range(_))));
    }

    #[test]
    fn field_free_sweep_keeps_population_low() {
        let mut s = tiny_spec();
        s.base.omega1 = 0.0;
        s.base.omega2 = 0.0;
        s.base.v = 0.0;
        s.count = 5;
        let r = sweep_1d(&s).unwrap();
        for row in &r.rows {
            assert!((row.p11_p22 - 1.0).abs() < 1e-10);
            assert!(row.p33.abs() < 1e-12 && row.p44.abs() < 1e-12);
        }
    }

    #[test]
    fn phase_sweep_is_flat_without_tunneling() {
        // With v = 0 the loop is open and the phase is a pure gauge.
        let mut s = tiny_spec();
        s.base.v = 0.0;
        s.param = SweepParam::Phi;
        s.start = 0.0;
        s.stop = std::f64::consts::TAU;
        s.count = 9;
        let r = sweep_1d(&s).unwrap();
        let first = r.rows[0];
        for row in &r.rows {
            assert!((row.p11_p22 - first.p11_p22).abs() < 1e-10);
            assert!((row.p33_p44 - first.p33_p44).abs() < 1e-10);
            assert!((row.absorption_probe - first.absorption_probe).abs() < 1e-10);
        }
    }

    #[test]
    fn resonance_dip_sits_at_line_center() {
        let mut s = tiny_spec();
        s.count = 201;
        let r = sweep_1d(&s).unwrap();
        let mut best = 0;
        for (i, row) in r.rows.iter().enumerate() {
            if row.p33_p44 < r.rows[best].p33_p44 {
                best = i;
            }
        }
        let step = r.axis[1] - r.axis[0];
        assert!(r.axis[best].abs() <= step + 1e-15, "dip at {}", r.axis[best]);
        for row in &r.rows {
            assert!(row.residual_inf <= 1e-10);
        }
    }

    #[test]
    fn delta_sweep_sets_opposite_detunings() {
        let p = apply_param(&DriveParams::default(), SweepParam::Delta, 0.2);
        assert_eq!(p.delta1, 0.2);
        assert_eq!(p.delta2, -0.2);
        let p = apply_param(&DriveParams::default(), SweepParam::Omega2, 0.75);
        assert_eq!(p.omega2, 0.75);
        assert_eq!(p.delta1, 0.0);
    }

    #[test]
    fn threaded_sweep_matches_serial_bitwise() {
        let mut s = tiny_spec();
        s.count = 37;
        let a = sweep_1d(&s).unwrap();
        for threads in [2, 3, 8] {
            let b = sweep_1d_threaded(&s, threads).unwrap();
            assert_eq!(a.axis, b.axis);
            for (ra, rb) in a.rows.iter().zip(&b.rows) {
                assert_eq!(ra.p11_p22.to_bits(), rb.p11_p22.to_bits());
                assert_eq!(ra.p33_p44.to_bits(), rb.p33_p44.to_bits());
                assert_eq!(ra.absorption_probe.to_bits(), rb.absorption_probe.to_bits());
                assert_eq!(ra.dispersion_probe.to_bits(), rb.dispersion_probe.to_bits());
                assert_eq!(ra.dispersion_strong.to_bits(), rb.dispersion_strong.to_bits());
                assert_eq!(ra.residual_inf.to_bits(), rb.residual_inf.to_bits());
            }
        }
    }

    #[test]
    fn degenerate_point_is_tagged_with_location() {
        let mut s = tiny_spec();
        s.rates = RateSet {
            gamma21: 0.0,
            gamma31: 0.0,
            gamma32: 0.0,
            gamma41: 0.0,
            gamma42: 0.0,
            big_gamma12: 0.0,
            big_gamma13: 0.0,
            big_gamma14: 0.0,
            big_gamma23: 0.0,
            big_gamma24: 0.0,
            big_gamma34: 0.0,
            gamma_si: 1.519e11,
        };
        s.base.omega1 = 0.0;
        s.base.omega2 = 0.0;
        s.base.v = 0.0;
        s.count = 5;
        match sweep_1d(&s) {
            Err(Error::DegenerateSteadyState { at: Some((name, value)), .. }) => {
                assert_eq!(name, "delta");
                assert_eq!(value, -0.5);
            }
            other => panic!("expected tagged degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn preset_cardinalities_and_labels() {
        let counts = [3usize, 4, 3, 4, 8, 5, 2];
        let mut total = 0;
        for (id, want) in FigureId::ALL.iter().zip(counts) {
            let curves = figure_preset_labeled(*id);
            assert_eq!(curves.len(), want, "{id:?}");
            total += curves.len();
            for (label, spec) in &curves {
                assert!(!label.is_empty());
                spec.validate().unwrap();
                assert_eq!(spec.count, 1001);
                assert_eq!(spec.param, SweepParam::Delta);
                assert!(!spec.eq13_consistent);
            }
        }
        assert_eq!(total, 29);

        let fig2: Vec<String> = figure_preset_labeled(FigureId::Fig2).into_iter().map(|(l, _)| l).collect();
        assert_eq!(fig2, ["phi0", "phi0.25pi", "phi0.5pi"]);
        let fig7: Vec<String> = figure_preset_labeled(FigureId::Fig7).into_iter().map(|(l, _)| l).collect();
        assert_eq!(fig7, ["q1", "q0.5", "q0", "q-0.5", "q-1"]);
        let fig3: Vec<String> = figure_preset_labeled(FigureId::Fig3).into_iter().map(|(l, _)| l).collect();
        assert_eq!(fig3, ["v0", "v0.05", "v0.1", "v0.25"]);
    }

    #[test]
    fn figure_ids_parse_from_digit_or_name() {
        assert_eq!("2".parse::<FigureId>().unwrap(), FigureId::Fig2);
        assert_eq!("fig8".parse::<FigureId>().unwrap(), FigureId::Fig8);
        assert_eq!("Fig5".parse::<FigureId>().unwrap(), FigureId::Fig5);
        assert!(matches!("9".parse::<FigureId>(), Err(Error::UnknownFigure(_))));
        assert!(matches!("lorem".parse::<FigureId>(), Err(Error::UnknownFigure(_))));
    }

    #[test]
    fn param_names_round_trip() {
        for p in [
            SweepParam::Delta,
            SweepParam::Phi,
            SweepParam::V,
            SweepParam::BigDelta,
            SweepParam::Q,
            SweepParam::Kappa,
            SweepParam::Omega1,
            SweepParam::Omega2,
        ] {
            assert_eq!(p.as_str().parse::<SweepParam>().unwrap(), p);
        }
        assert!("Delta".parse::<SweepParam>().is_err());
    }
}
