//! Domain types and assembly of the rotating-frame generator.
//!
//! The system is a four-level ladder-loop: two closely spaced low levels
//! |1>, |2> coupled by an infrared field (Rabi frequency `v`), and two
//! excited levels |3>, |4> split by tunneling (`2 * big_delta`). Optical
//! fields couple |1> -> |3>,|4> (Rabi frequency `omega1`, dipole ratio `q`)
//! and |2> -> |3>,|4> (`omega2`, ratio `kappa`). The three fields form a
//! closed excitation contour whose total phase `phi` cannot be gauged away
//! and enters the generator through `cos phi` / `sin phi`.
//!
//! All rates and frequencies are expressed in units of the reference rate
//! gamma (`RateSet::gamma_si` s^-1); time is in units of 1/gamma.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Indices into the 16-component state vector. The layout is frozen:
/// file formats and tests rely on it.
pub mod idx {
    pub const P11: usize = 0;
    pub const P22: usize = 1;
    pub const P33: usize = 2;
    pub const P44: usize = 3;
    pub const RE12: usize = 4;
    pub const IM12: usize = 5;
    pub const RE13: usize = 6;
    pub const IM13: usize = 7;
    pub const RE14: usize = 8;
    pub const IM14: usize = 9;
    pub const RE23: usize = 10;
    pub const IM23: usize = 11;
    pub const RE24: usize = 12;
    pub const IM24: usize = 13;
    pub const RE34: usize = 14;
    pub const IM34: usize = 15;
}

/// Relaxation constants, units of gamma.
///
/// `gamma21` exchanges population between the two low levels in both
/// directions; `gamma3x`/`gamma4x` drain the excited levels. The
/// `big_gamma*` rates damp the corresponding coherences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub gamma21: f64,
    pub gamma31: f64,
    pub gamma32: f64,
    pub gamma41: f64,
    pub gamma42: f64,
    pub big_gamma12: f64,
    pub big_gamma13: f64,
    pub big_gamma14: f64,
    pub big_gamma23: f64,
    pub big_gamma24: f64,
    pub big_gamma34: f64,
    /// Value of gamma itself in s^-1, for converting to physical units.
    pub gamma_si: f64,
}

/// The reference relaxation set for the GaAs double-well structure.
pub fn default_rates() -> RateSet {
    let gamma21 = 2.5e-5;
    RateSet {
        gamma21,
        gamma31: 0.8,
        gamma32: 0.8,
        gamma41: 0.75,
        gamma42: 0.75,
        big_gamma12: 4.0 * gamma21,
        big_gamma13: 1.92,
        big_gamma14: 1.8,
        big_gamma23: 1.92,
        big_gamma24: 1.8,
        big_gamma34: 3.41,
        gamma_si: 1.519e11,
    }
}

impl Default for RateSet {
    fn default() -> Self {
        default_rates()
    }
}

impl RateSet {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("gamma21", self.gamma21),
            ("gamma31", self.gamma31),
            ("gamma32", self.gamma32),
            ("gamma41", self.gamma41),
            ("gamma42", self.gamma42),
            ("Gamma12", self.big_gamma12),
            ("Gamma13", self.big_gamma13),
            ("Gamma14", self.big_gamma14),
            ("Gamma23", self.big_gamma23),
            ("Gamma24", self.big_gamma24),
            ("Gamma34", self.big_gamma34),
        ];
        for (name, r) in named {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be finite and >= 0, got {r}")));
            }
        }
        if !self.gamma_si.is_finite() || self.gamma_si <= 0.0 {
            return Err(Error::InvalidParams(format!("gamma_si must be finite and > 0, got {}", self.gamma_si)));
        }
        Ok(())
    }
}

/// Field amplitudes, dipole ratios, detunings and the contour phase.
///
/// `delta1`/`delta2` are the one-photon detunings of the two optical fields
/// from the doublet center; the two-photon detuning is their half
/// difference and is never stored. `q` and `kappa` may be negative (relative
/// sign of the dipole matrix elements). `phi` is the total phase around the
/// closed excitation contour, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    pub omega1: f64,
    pub omega2: f64,
    pub v: f64,
    pub q: f64,
    pub kappa: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub big_delta: f64,
    pub phi: f64,
}

impl Default for DriveParams {
    /// Reference operating point: both optical fields and the infrared
    /// coupling at 0.25, dipole ratios 0.8, unit half-splitting, zero
    /// detunings and zero contour phase.
    fn default() -> Self {
        DriveParams {
            omega1: 0.25,
            omega2: 0.25,
            v: 0.25,
            q: 0.8,
            kappa: 0.8,
            delta1: 0.0,
            delta2: 0.0,
            big_delta: 1.0,
            phi: 0.0,
        }
    }
}

impl DriveParams {
    /// Two-photon detuning `(delta1 - delta2) / 2`.
    pub fn two_photon_detuning(&self) -> f64 {
        (self.delta1 - self.delta2) / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("v", self.v),
            ("q", self.q),
            ("kappa", self.kappa),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("big_delta", self.big_delta),
            ("phi", self.phi),
        ];
        for (name, x) in named {
            if !x.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {x}")));
            }
        }
        for (name, x) in [("omega1", self.omega1), ("omega2", self.omega2), ("v", self.v), ("big_delta", self.big_delta)] {
            if x < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be >= 0, got {x}")));
            }
        }
        Ok(())
    }
}

/// Symmetric split of a two-photon detuning into one-photon detunings:
/// `(+delta, -delta)`, keeping the mean one-photon detuning at zero.
pub fn detunings_from_delta(delta: f64) -> (f64, f64) {
    (delta, -delta)
}

/// Real 16-vector holding the independent components of the density matrix
/// in the frozen order of [`idx`]: four populations, then (Re, Im) pairs of
/// the six upper-triangle coherences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector(pub [f64; 16]);

impl StateVector {
    pub fn zero() -> Self {
        StateVector([0.0; 16])
    }

    /// Field-free equilibrium: population shared equally by the two low
    /// levels, no coherences.
    pub fn field_free_equilibrium() -> Self {
        let mut x = [0.0; 16];
        x[idx::P11] = 0.5;
        x[idx::P22] = 0.5;
        StateVector(x)
    }

    pub fn trace(&self) -> f64 {
        self.0[idx::P11] + self.0[idx::P22] + self.0[idx::P33] + self.0[idx::P44]
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// 4x4 complex density matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub [[Complex64; 4]; 4]);

/// Flattens a Hermitian matrix into the 16-component layout.
///
/// Hermiticity is checked to 1e-12; the imaginary parts of the diagonal are
/// dropped (they are zero for any matrix passing the check) and the lower
/// triangle is read only through the check.
pub fn pack(rho: &DensityMatrix) -> Result<StateVector> {
    let m = &rho.0;
    let mut max_dev: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let dev = (m[i][j] - m[j][i].conj()).norm();
            max_dev = max_dev.max(dev);
        }
    }
    if max_dev > 1e-12 {
        return Err(Error::NotHermitian { max_dev });
    }
    let mut x = [0.0; 16];
    x[idx::P11] = m[0][0].re;
    x[idx::P22] = m[1][1].re;
    x[idx::P33] = m[2][2].re;
    x[idx::P44] = m[3][3].re;
    let pairs = [
        (idx::RE12, 0, 1),
        (idx::RE13, 0, 2),
        (idx::RE14, 0, 3),
        (idx::RE23, 1, 2),
        (idx::RE24, 1, 3),
        (idx::RE34, 2, 3),
    ];
    for (k, i, j) in pairs {
        x[k] = m[i][j].re;
        x[k + 1] = m[i][j].im;
    }
    Ok(StateVector(x))
}

/// Rebuilds the density matrix; the result is exactly Hermitian by
/// construction.
pub fn unpack(x: &StateVector) -> DensityMatrix {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    m[0][0] = Complex64::new(x[idx::P11], 0.0);
    m[1][1] = Complex64::new(x[idx::P22], 0.0);
    m[2][2] = Complex64::new(x[idx::P33], 0.0);
    m[3][3] = Complex64::new(x[idx::P44], 0.0);
    let pairs = [
        (idx::RE12, 0, 1),
        (idx::RE13, 0, 2),
        (idx::RE14, 0, 3),
        (idx::RE23, 1, 2),
        (idx::RE24, 1, 3),
        (idx::RE34, 2, 3),
    ];
    for (k, i, j) in pairs {
        m[i][j] = Complex64::new(x[k], x[k + 1]);
        m[j][i] = m[i][j].conj();
    }
    DensityMatrix(m)
}

/// Real 16x16 generator: `d(state)/dt = L * state`, entries in units of
/// gamma.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    m: [[f64; 16]; 16],
}

impl Liouvillian {
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.m[row][col]
    }

    pub fn matrix(&self) -> &[[f64; 16]; 16] {
        &self.m
    }

    /// Time derivative of `x`.
    pub fn apply(&self, x: &StateVector) -> [f64; 16] {
        let mut out = [0.0; 16];
        for (o, row) in out.iter_mut().zip(self.m.iter()) {
            *o = row.iter().zip(x.0.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Infinity norm: maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.m
            .iter()
            .map(|row| row.iter().map(|a| a.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Assembles the generator.
///
/// `eq13_consistent` selects the coefficient of the excited-doublet
/// coherence source term fed by the strong field: `false` keeps the
/// published coefficient `kappa * omega2`, `true` uses the commutator-derived
/// `omega2`. The two coincide when `kappa = 1`; both variants conserve the
/// trace and Hermiticity.
///
/// The phase is wrapped into [0, 2*pi) before evaluating `sin`/`cos`, which
/// makes `L(phi)` and `L(phi + 2*pi)` bit-identical for phases in [-2*pi, 0).
pub fn build_liouvillian(params: &DriveParams, rates: &RateSet, eq13_consistent: bool) -> Result<Liouvillian> {
    params.validate()?;
    rates.validate()?;

    let DriveParams { omega1: o1, omega2: o2, v, q, kappa, delta1: d1, delta2: d2, big_delta: dd, phi } = *params;
    let r = rates;

    let wrapped = phi.rem_euclid(std::f64::consts::TAU);
    let (s, c) = wrapped.sin_cos();

    // Shared products. Population rows reuse exactly the same values with
    // opposite signs so that the trace functional annihilates L exactly,
    // not just to rounding.
    let qo1 = q * o1;
    let ko2 = kappa * o2;
    let tg21 = 2.0 * r.gamma21;
    let tg31 = 2.0 * r.gamma31;
    let tg32 = 2.0 * r.gamma32;
    let tg41 = 2.0 * r.gamma41;
    let tg42 = 2.0 * r.gamma42;
    let t_v = 2.0 * v;
    let t_qo1 = 2.0 * qo1;
    let t_o1 = 2.0 * o1;
    let t_ko2 = 2.0 * ko2;
    let t_o2 = 2.0 * o2;

    let qs = qo1 * s;
    let qc = qo1 * c;
    let o1s = o1 * s;
    let o1c = o1 * c;
    let ks = ko2 * s;
    let kc = ko2 * c;
    let o2s = o2 * s;
    let o2c = o2 * c;
    let vs = v * s;
    let vc = v * c;

    let a12 = d1 - d2;
    let w13 = d1 + dd;
    let w14 = d1 - dd;
    let w23 = d2 + dd;
    let w24 = d2 - dd;
    let tdd = 2.0 * dd;

    // Source coefficient of the |3><4| coherence from the strong field.
    let c32 = if eq13_consistent { o2 } else { ko2 };

    let mut m = [[0.0f64; 16]; 16];
    use idx::*;

    // Populations.
    m[P11][P11] = -tg21;
    m[P11][P22] = tg21;
    m[P11][P33] = tg31;
    m[P11][P44] = tg41;
    m[P11][IM12] = -t_v;
    m[P11][IM13] = -t_qo1;
    m[P11][IM14] = -t_o1;

    m[P22][P11] = tg21;
    m[P22][P22] = -tg21;
    m[P22][P33] = tg32;
    m[P22][P44] = tg42;
    m[P22][IM12] = t_v;
    m[P22][IM23] = -t_ko2;
    m[P22][IM24] = -t_o2;

    m[P33][P33] = -(tg31 + tg32);
    m[P33][IM13] = t_qo1;
    m[P33][IM23] = t_ko2;

    m[P44][P44] = -(tg41 + tg42);
    m[P44][IM14] = t_o1;
    m[P44][IM24] = t_o2;

    // Low-level coherence. This is the one element that carries the contour
    // phase in this representation: every optical term is rotated by phi.
    m[RE12][RE12] = -r.big_gamma12;
    m[RE12][IM12] = a12;
    m[RE12][RE13] = -ks;
    m[RE12][IM13] = -kc;
    m[RE12][RE14] = -o2s;
    m[RE12][IM14] = -o2c;
    m[RE12][RE23] = qs;
    m[RE12][IM23] = -qc;
    m[RE12][RE24] = o1s;
    m[RE12][IM24] = -o1c;

    m[IM12][P11] = v;
    m[IM12][P22] = -v;
    m[IM12][RE12] = -a12;
    m[IM12][IM12] = -r.big_gamma12;
    m[IM12][RE13] = kc;
    m[IM12][IM13] = -ks;
    m[IM12][RE14] = o2c;
    m[IM12][IM14] = -o2s;
    m[IM12][RE23] = -qc;
    m[IM12][IM23] = -qs;
    m[IM12][RE24] = -o1c;
    m[IM12][IM24] = -o1s;

    // Optical coherences of the probe transition.
    m[RE13][RE12] = ks;
    m[RE13][IM12] = -kc;
    m[RE13][RE13] = -r.big_gamma13;
    m[RE13][IM13] = w13;
    m[RE13][RE23] = -vs;
    m[RE13][IM23] = vc;
    m[RE13][IM34] = -o1;

    m[IM13][P11] = qo1;
    m[IM13][P33] = -qo1;
    m[IM13][RE12] = kc;
    m[IM13][IM12] = ks;
    m[IM13][RE13] = -w13;
    m[IM13][IM13] = -r.big_gamma13;
    m[IM13][RE23] = -vc;
    m[IM13][IM23] = -vs;
    m[IM13][RE34] = -o1;

    m[RE14][RE12] = o2s;
    m[RE14][IM12] = -o2c;
    m[RE14][RE14] = -r.big_gamma14;
    m[RE14][IM14] = w14;
    m[RE14][RE24] = -vs;
    m[RE14][IM24] = vc;
    m[RE14][IM34] = qo1;

    m[IM14][P11] = o1;
    m[IM14][P44] = -o1;
    m[IM14][RE12] = o2c;
    m[IM14][IM12] = o2s;
    m[IM14][RE14] = -w14;
    m[IM14][IM14] = -r.big_gamma14;
    m[IM14][RE24] = -vc;
    m[IM14][IM24] = -vs;
    m[IM14][RE34] = -qo1;

    // Optical coherences of the strong transition.
    m[RE23][RE12] = -qs;
    m[RE23][IM12] = qc;
    m[RE23][RE13] = vs;
    m[RE23][IM13] = vc;
    m[RE23][RE23] = -r.big_gamma23;
    m[RE23][IM23] = w23;
    m[RE23][IM34] = -o2;

    m[IM23][P22] = ko2;
    m[IM23][P33] = -ko2;
    m[IM23][RE12] = qc;
    m[IM23][IM12] = qs;
    m[IM23][RE13] = -vc;
    m[IM23][IM13] = vs;
    m[IM23][RE23] = -w23;
    m[IM23][IM23] = -r.big_gamma23;
    m[IM23][RE34] = -o2;

    m[RE24][RE12] = -o1s;
    m[RE24][IM12] = o1c;
    m[RE24][RE14] = vs;
    m[RE24][IM14] = vc;
    m[RE24][RE24] = -r.big_gamma24;
    m[RE24][IM24] = w24;
    m[RE24][IM34] = ko2;

    m[IM24][P22] = o2;
    m[IM24][P44] = -o2;
    m[IM24][RE12] = o1c;
    m[IM24][IM12] = o1s;
    m[IM24][RE14] = -vc;
    m[IM24][IM14] = vs;
    m[IM24][RE24] = -w24;
    m[IM24][IM24] = -r.big_gamma24;
    m[IM24][RE34] = -ko2;

    // Excited-doublet coherence: rotation at the tunnel splitting, fed by
    // both optical transitions.
    m[RE34][IM13] = o1;
    m[RE34][IM14] = qo1;
    m[RE34][IM23] = c32;
    m[RE34][IM24] = ko2;
    m[RE34][RE34] = -r.big_gamma34;
    m[RE34][IM34] = -tdd;

    m[IM34][RE13] = o1;
    m[IM34][RE14] = -qo1;
    m[IM34][RE23] = c32;
    m[IM34][RE24] = -ko2;
    m[IM34][RE34] = tdd;
    m[IM34][IM34] = -r.big_gamma34;

    Ok(Liouvillian { m })
}
