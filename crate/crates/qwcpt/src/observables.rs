//! Derived quantities reported for each solved state, and the dip metrics
//! extracted from a resonance scan.

use crate::error::{Error, Result};
use crate::model::{idx, StateVector};

/// One output record: level occupations and the optical response proxies.
///
/// Absorption of the probe is proportional to the imaginary part of the sum
/// of the two probe-branch coherences; dispersion to the real part. The
/// strong-field dispersion uses the other branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRow {
    pub p11_p22: f64,
    pub p33: f64,
    pub p44: f64,
    pub p33_p44: f64,
    pub absorption_probe: f64,
    pub dispersion_probe: f64,
    pub dispersion_strong: f64,
    /// Infinity norm of the generator applied to the state; NaN when the
    /// producer did not measure it.
    pub residual_inf: f64,
}

/// Read off all observables from a packed state. The residual is left as
/// NaN; solvers that know it overwrite the field.
pub fn observables_of(x: &StateVector) -> ObservableRow {
    ObservableRow {
        p11_p22: x[idx::P11] + x[idx::P22],
        p33: x[idx::P33],
        p44: x[idx::P44],
        p33_p44: x[idx::P33] + x[idx::P44],
        absorption_probe: x[idx::IM13] + x[idx::IM14],
        dispersion_probe: x[idx::RE13] + x[idx::RE14],
        dispersion_strong: x[idx::RE23] + x[idx::RE24],
        residual_inf: f64::NAN,
    }
}

/// Contrast and width of a resonance dip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceMetrics {
    /// Baseline minus dip minimum, clamped at zero.
    pub contrast: f64,
    /// Full width at half the dip depth; NaN when a half-depth crossing is
    /// missing on either side or the curve has no dip.
    pub fwhm: f64,
    /// Grid position of the dip minimum.
    pub dip_position: f64,
}

/// Dip metrics of `values` over the strictly increasing `delta_grid`.
///
/// The baseline is the mean over the outer 5% of points on each side; the
/// dip is the minimum over the central half of the grid. The half-depth
/// crossings are located by walking outward from the minimum and linearly
/// interpolating between the bracketing samples.
pub fn resonance_metrics(delta_grid: &[f64], values: &[f64]) -> Result<ResonanceMetrics> {
    let n = delta_grid.len();
    if n != values.len() {
        return Err(Error::InvalidParams(format!(
            "grid and value lengths differ: {n} vs {}",
            values.len()
        )));
    }
    if n < 5 {
        return Err(Error::GridTooSmall { len: n, min: 5 });
    }
    for w in delta_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::GridNotCoveringZero);
        }
    }
    if !(delta_grid[0] <= 0.0 && delta_grid[n - 1] >= 0.0) {
        return Err(Error::GridNotCoveringZero);
    }

    let k = ((0.05 * n as f64).round() as usize).max(1);
    let edge_sum: f64 = values[..k].iter().sum::<f64>() + values[n - k..].iter().sum::<f64>();
    let baseline = edge_sum / (2 * k) as f64;

    let lo = n / 4;
    let hi = n - n / 4;
    let mut dip_idx = lo;
    for i in lo..hi {
        if values[i] < values[dip_idx] {
            dip_idx = i;
        }
    }
    let dip = values[dip_idx];
    let contrast = (baseline - dip).max(0.0);
    if contrast == 0.0 {
        return Ok(ResonanceMetrics {
            contrast,
            fwhm: f64::NAN,
            dip_position: delta_grid[dip_idx],
        });
    }

    let th = baseline - contrast / 2.0;
    // Interpolated delta where the curve crosses `th` between samples i and j.
    let cross = |i: usize, j: usize| -> f64 {
        let (d0, d1) = (delta_grid[i], delta_grid[j]);
        let (v0, v1) = (values[i], values[j]);
        d0 + (th - v0) / (v1 - v0) * (d1 - d0)
    };

    let mut left = f64::NAN;
    for i in (0..dip_idx).rev() {
        if values[i] > th {
            left = cross(i, i + 1);
            break;
        }
    }
    let mut right = f64::NAN;
    for i in dip_idx + 1..n {
        if values[i] > th {
            right = cross(i - 1, i);
            break;
        }
    }

    Ok(ResonanceMetrics {
        contrast,
        fwhm: right - left,
        dip_position: delta_grid[dip_idx],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, half: f64) -> Vec<f64> {
        (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn observables_read_expected_slots() {
        let mut x = StateVector::zero();
        x[idx::P11] = 0.4;
        x[idx::P22] = 0.3;
        x[idx::P33] = 0.2;
        x[idx::P44] = 0.1;
        x[idx::IM13] = 1.0;
        x[idx::IM14] = 2.0;
        x[idx::RE13] = 3.0;
        x[idx::RE14] = 4.0;
        x[idx::RE23] = 5.0;
        x[idx::RE24] = 6.0;
        let row = observables_of(&x);
        assert_eq!(row.p11_p22, 0.7);
        assert_eq!(row.p33_p44, 0.30000000000000004);
        assert_eq!(row.absorption_probe, 3.0);
        assert_eq!(row.dispersion_probe, 7.0);
        assert_eq!(row.dispersion_strong, 11.0);
        assert!(row.residual_inf.is_nan());
    }

    #[test]
    fn constant_curve_has_zero_contrast_and_nan_width() {
        let g = grid(101, 0.5);
        let v = vec![0.125; 101];
        let m = resonance_metrics(&g, &v).unwrap();
        assert_eq!(m.contrast, 0.0);
        assert!(m.fwhm.is_nan());
    }

    #[test]
    fn lorentzian_dip_recovers_depth_and_width() {
        // 0.2 - 0.1 / (1 + (delta/0.03)^2): depth 0.1, width 0.06.
        let g = grid(801, 0.5);
        let v: Vec<f64> = g.iter().map(|d| 0.2 - 0.1 / (1.0 + (d / 0.03).powi(2))).collect();
        let m = resonance_metrics(&g, &v).unwrap();
        assert!((m.contrast - 0.1).abs() <= 0.002, "contrast {}", m.contrast);
        assert!((m.fwhm - 0.06).abs() <= 0.003, "fwhm {}", m.fwhm);
        assert_eq!(m.dip_position, 0.0);
    }

    #[test]
    fn grid_validation() {
        let g = grid(101, 0.5);
        let v = vec![0.0; 100];
        assert!(matches!(resonance_metrics(&g, &v), Err(Error::InvalidParams(_))));
        assert!(matches!(
            resonance_metrics(&[0.0, 0.1], &[0.0, 0.1]),
            Err(Error::GridTooSmall { len: 2, min: 5 })
        ));
        let dec: Vec<f64> = g.iter().rev().copied().collect();
        let v = vec![0.0; 101];
        assert!(matches!(resonance_metrics(&dec, &v), Err(Error::GridNotCoveringZero)));
        let off: Vec<f64> = g.iter().map(|d| d + 1.0).collect();
        assert!(matches!(resonance_metrics(&off, &v), Err(Error::GridNotCoveringZero)));
    }

    #[test]
    fn one_sided_dip_yields_nan_width() {
        // Monotone decreasing curve: the "dip" sits at the right edge of the
        // central window and never re-crosses the half level on that side.
        let g = grid(101, 0.5);
        let v: Vec<f64> = g.iter().map(|d| 0.2 - 0.1 * (d + 0.5)).collect();
        let m = resonance_metrics(&g, &v).unwrap();
        assert!(m.contrast > 0.0);
        assert!(m.fwhm.is_nan());
    }
}
