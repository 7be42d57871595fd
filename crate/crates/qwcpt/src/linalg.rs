//! Dense kernels for the fixed problem sizes: LU factorization of the 16x16
//! generator systems and a Jacobi eigensolver for the 8x8 real-symmetric
//! embedding of a 4x4 Hermitian matrix.

pub(crate) const N: usize = 16;

/// LU factorization with row partial pivoting, stored in place.
pub(crate) struct Lu {
    lu: [[f64; N]; N],
    perm: [usize; N],
}

/// Factors `a`. Returns the factorization (if it ran to completion) and the
/// smallest pivot magnitude encountered; callers compare the pivot against
/// their own degeneracy threshold. A structurally singular matrix (zero
/// pivot column) yields `(None, 0.0)`.
pub(crate) fn factor(a: &[[f64; N]; N]) -> (Option<Lu>, f64) {
    let mut lu = *a;
    let mut perm = [0usize; N];
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }
    let mut min_pivot = f64::INFINITY;
    for k in 0..N {
        let mut best = k;
        let mut best_mag = lu[k][k].abs();
        for r in k + 1..N {
            let mag = lu[r][k].abs();
            if mag > best_mag {
                best = r;
                best_mag = mag;
            }
        }
        if best_mag == 0.0 {
            return (None, 0.0);
        }
        min_pivot = min_pivot.min(best_mag);
        if best != k {
            lu.swap(k, best);
            perm.swap(k, best);
        }
        let pivot = lu[k][k];
        for r in k + 1..N {
            let f = lu[r][k] / pivot;
            lu[r][k] = f;
            if f != 0.0 {
                for c in k + 1..N {
                    lu[r][c] -= f * lu[k][c];
                }
            }
        }
    }
    (Some(Lu { lu, perm }), min_pivot)
}

impl Lu {
    /// Solves `A x = b` using the stored factors.
    pub(crate) fn solve(&self, b: &[f64; N]) -> [f64; N] {
        let mut x = [0.0; N];
        for i in 0..N {
            x[i] = b[self.perm[i]];
        }
        for i in 1..N {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i][j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..N).rev() {
            let mut s = x[i];
            for j in i + 1..N {
                s -= self.lu[i][j] * x[j];
            }
            x[i] = s / self.lu[i][i];
        }
        x
    }
}

/// Smallest eigenvalue of a symmetric 8x8 matrix by cyclic Jacobi rotations.
///
/// Sweeps until the off-diagonal Frobenius norm is at most `tol`; each
/// rotation annihilates one off-diagonal pair. Convergence for symmetric
/// input is quadratic, so the sweep cap is never reached in practice.
pub(crate) fn jacobi_min_eigenvalue_8(mut a: [[f64; 8]; 8], tol: f64) -> f64 {
    const M: usize = 8;
    for _sweep in 0..64 {
        let mut off2 = 0.0;
        for p in 0..M {
            for q in p + 1..M {
                off2 += 2.0 * a[p][q] * a[p][q];
            }
        }
        if off2.sqrt() <= tol {
            break;
        }
        for p in 0..M {
            for q in p + 1..M {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                // Stable tangent of the smaller rotation angle.
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..M {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..M {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut min = a[0][0];
    for i in 1..M {
        min = min.min(a[i][i]);
    }
    min
}
