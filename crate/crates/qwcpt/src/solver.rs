//! Stationary solve of the master equation and a stiff-stable
//! time-evolution oracle.
//!
//! The stationary state is the kernel of the generator, made unique by
//! replacing one (linearly dependent) population row with the unit-trace
//! constraint. The oracle integrates the same generator by backward Euler,
//! which is unconditionally stable; the rate spread in the default model is
//! about 2e4, so explicit schemes would need absurdly small steps.

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{unpack, DensityMatrix, Liouvillian, StateVector};

/// Stationary state plus its quality diagnostics.
#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub x: StateVector,
    /// Infinity norm of `L * x` measured against the unmodified generator.
    pub residual_inf: f64,
    /// Smallest eigenvalue of the unpacked density matrix.
    pub min_eigenvalue: f64,
}

/// Backward-Euler trajectory; `times[k] = k * h`, `states[0]` is the
/// initial state.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
}

/// Relative pivot floor below which the constrained stationary system is
/// declared degenerate.
const DEGENERACY_FLOOR: f64 = 1e-13;

/// Stationary state with the first population row replaced by the trace
/// constraint.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyStateResult> {
    steady_state_with_constraint_row(l, 0)
}

/// Same as [`steady_state`] but replacing the population row
/// `constraint_row` (0..4). The population rows are linearly dependent, so
/// any choice yields the same solution up to rounding; exposing the choice
/// lets tests verify that independence.
pub fn steady_state_with_constraint_row(l: &Liouvillian, constraint_row: usize) -> Result<SteadyStateResult> {
    if constraint_row >= 4 {
        return Err(Error::InvalidParams(format!(
            "constraint row must be a population row (0..4), got {constraint_row}"
        )));
    }
    let mut a = *l.matrix();
    a[constraint_row] = [0.0; linalg::N];
    for col in 0..4 {
        a[constraint_row][col] = 1.0;
    }
    let mut b = [0.0; linalg::N];
    b[constraint_row] = 1.0;

    let threshold = DEGENERACY_FLOOR * l.norm_inf();
    let (lu, min_pivot) = linalg::factor(&a);
    if min_pivot <= threshold {
        return Err(Error::DegenerateSteadyState {
            pivot: min_pivot,
            threshold,
            at: None,
        });
    }
    let x = StateVector(lu.expect("pivot above threshold implies completed factorization").solve(&b));
    Ok(SteadyStateResult {
        residual_inf: residual(l, &x),
        min_eigenvalue: min_eigenvalue(&unpack(&x)),
        x,
    })
}

/// Backward-Euler integration: each step solves `(I - hL) x_next = x`.
///
/// The matrix is factored once and reused for all `n` steps. Because the
/// trace functional annihilates the generator, every step preserves the
/// trace exactly up to solver rounding.
pub fn evolve_implicit(l: &Liouvillian, x0: &StateVector, h: f64, n: usize) -> Result<Trajectory> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidParams(format!("step must be finite and > 0, got {h}")));
    }
    if n == 0 {
        return Err(Error::InvalidParams("step count must be at least 1".into()));
    }
    let mut a = [[0.0; linalg::N]; linalg::N];
    let m = l.matrix();
    let mut norm: f64 = 0.0;
    for i in 0..linalg::N {
        let mut row_sum = 0.0;
        for j in 0..linalg::N {
            a[i][j] = if i == j { 1.0 - h * m[i][j] } else { -h * m[i][j] };
            row_sum += a[i][j].abs();
        }
        norm = norm.max(row_sum);
    }
    let (lu, min_pivot) = linalg::factor(&a);
    if min_pivot <= 1e-14 * norm {
        return Err(Error::SingularStep);
    }
    let lu = lu.expect("pivot above threshold implies completed factorization");

    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(*x0);
    let mut x = x0.0;
    for k in 1..=n {
        x = lu.solve(&x);
        times.push(k as f64 * h);
        states.push(StateVector(x));
    }
    Ok(Trajectory { times, states })
}

/// Infinity norm of the time derivative `L * x`.
pub fn residual(l: &Liouvillian, x: &StateVector) -> f64 {
    l.apply(x).iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Smallest eigenvalue of a Hermitian 4x4 matrix.
///
/// Uses the real-symmetric embedding [[A, -B], [B, A]] of `rho = A + iB`,
/// whose spectrum is that of `rho` with every eigenvalue doubled, and
/// reduces it by cyclic Jacobi rotations to off-diagonal norm 1e-12.
pub fn min_eigenvalue(rho: &DensityMatrix) -> f64 {
    let mut e = [[0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            let z = rho.0[i][j];
            e[i][j] = z.re;
            e[i + 4][j + 4] = z.re;
            e[i][j + 4] = -z.im;
            e[i + 4][j] = z.im;
        }
    }
    linalg::jacobi_min_eigenvalue_8(e, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_liouvillian, default_rates, idx, DriveParams, RateSet};
    use num_complex::Complex64;

    fn zero_drive() -> DriveParams {
        DriveParams {
            omega1: 0.0,
            omega2: 0.0,
            v: 0.0,
            q: 0.0,
            kappa: 0.0,
            delta1: 0.0,
            delta2: 0.0,
            big_delta: 0.0,
            phi: 0.0,
        }
    }

    fn fig2_base(phi: f64) -> DriveParams {
        DriveParams {
            omega1: 0.25,
            omega2: 0.25,
            v: 0.25,
            q: 0.8,
            kappa: 0.8,
            delta1: 0.0,
            delta2: 0.0,
            big_delta: 1.0,
            phi,
        }
    }

    #[test]
    fn field_free_steady_state_is_low_level_equilibrium() {
        let l = build_liouvillian(&zero_drive(), &default_rates(), false).unwrap();
        let r = steady_state(&l).unwrap();
        assert!((r.x[idx::P11] - 0.5).abs() < 1e-12);
        assert!((r.x[idx::P22] - 0.5).abs() < 1e-12);
        for i in 2..16 {
            assert!(r.x[i].abs() < 1e-12, "component {i}");
        }
        assert!(r.residual_inf <= 1e-10);
    }

    #[test]
    fn all_zero_system_is_degenerate() {
        let zero_rates = RateSet {
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
        let l = build_liouvillian(&zero_drive(), &zero_rates, false).unwrap();
        match steady_state(&l) {
            Err(Error::DegenerateSteadyState { .. }) => {}
            other => panic!("expected DegenerateSteadyState, got {other:?}"),
        }
    }

    #[test]
    fn dark_state_present_at_zero_phase_absent_at_half_pi() {
        let rates = default_rates();
        let low = |phi: f64| {
            let l = build_liouvillian(&fig2_base(phi), &rates, false).unwrap();
            let x = steady_state(&l).unwrap().x;
            x[idx::P11] + x[idx::P22]
        };
        assert!(low(0.0) > low(std::f64::consts::FRAC_PI_2));
    }

    #[test]
    fn constant_trajectory_for_zero_generator() {
        let zero_rates = RateSet {
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
        let l = build_liouvillian(&zero_drive(), &zero_rates, false).unwrap();
        let mut x0 = StateVector::field_free_equilibrium();
        x0[idx::RE13] = 0.2;
        let t = evolve_implicit(&l, &x0, 1.0, 5).unwrap();
        assert_eq!(t.times, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        for s in &t.states {
            assert_eq!(s.0, x0.0);
        }
    }

    #[test]
    fn low_level_exchange_equilibrates() {
        let l = build_liouvillian(&zero_drive(), &default_rates(), false).unwrap();
        let mut x0 = StateVector::zero();
        x0[idx::P11] = 1.0;
        let t = evolve_implicit(&l, &x0, 100.0, 2000).unwrap();
        let last = t.states.last().unwrap();
        assert!((last[idx::P11] - 0.5).abs() < 1e-6);
        assert!((last[idx::P22] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn oracle_agrees_with_direct_solve() {
        let l = build_liouvillian(&fig2_base(0.0), &default_rates(), false).unwrap();
        let direct = steady_state(&l).unwrap().x;
        let t = evolve_implicit(&l, &StateVector::field_free_equilibrium(), 50.0, 20_000).unwrap();
        let last = t.states.last().unwrap();
        let diff = (0..16).fold(0.0f64, |acc, i| acc.max((direct[i] - last[i]).abs()));
        assert!(diff <= 1e-8, "solver-oracle gap {diff:e}");
    }

    #[test]
    fn implicit_euler_preserves_trace() {
        let l = build_liouvillian(&fig2_base(1.0), &default_rates(), false).unwrap();
        let t = evolve_implicit(&l, &StateVector::field_free_equilibrium(), 50.0, 200).unwrap();
        for s in &t.states {
            assert!((s.trace() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn residual_examples() {
        let l = build_liouvillian(&fig2_base(0.7), &default_rates(), false).unwrap();
        assert_eq!(residual(&l, &StateVector::zero()), 0.0);
        let l = build_liouvillian(&zero_drive(), &default_rates(), false).unwrap();
        let mut e0 = StateVector::zero();
        e0[idx::P11] = 1.0;
        assert_eq!(residual(&l, &e0), 5e-5);
    }

    #[test]
    fn constraint_row_choice_does_not_matter() {
        let mut p = fig2_base(0.9);
        p.delta1 = 0.07;
        p.delta2 = -0.07;
        let l = build_liouvillian(&p, &default_rates(), false).unwrap();
        let a = steady_state(&l).unwrap().x;
        for row in 1..4 {
            let b = steady_state_with_constraint_row(&l, row).unwrap().x;
            let diff = (0..16).fold(0.0f64, |acc, i| acc.max((a[i] - b[i]).abs()));
            assert!(diff <= 1e-10, "row {row}: diff {diff:e}");
        }
        assert!(steady_state_with_constraint_row(&l, 4).is_err());
    }

    #[test]
    fn steady_state_is_two_pi_periodic() {
        let rates = default_rates();
        let l1 = build_liouvillian(&fig2_base(0.3), &rates, false).unwrap();
        let l2 = build_liouvillian(&fig2_base(0.3 + std::f64::consts::TAU), &rates, false).unwrap();
        let a = steady_state(&l1).unwrap().x;
        let b = steady_state(&l2).unwrap().x;
        let diff = (0..16).fold(0.0f64, |acc, i| acc.max((a[i] - b[i]).abs()));
        assert!(diff <= 1e-12, "diff {diff:e}");
    }

    #[test]
    fn min_eigenvalue_reference_cases() {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(0.25, 0.0);
        }
        assert_eq!(min_eigenvalue(&DensityMatrix(m)), 0.25);

        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        m[0][0] = Complex64::new(1.0, 0.0);
        assert_eq!(min_eigenvalue(&DensityMatrix(m)), 0.0);

        // Pure off-diagonal coherence of magnitude 0.3: eigenvalues -0.3 and 0.3.
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        m[0][1] = Complex64::new(0.0, 0.3);
        m[1][0] = Complex64::new(0.0, -0.3);
        assert!((min_eigenvalue(&DensityMatrix(m)) + 0.3).abs() < 1e-12);
    }
}
