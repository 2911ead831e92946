//! Sparse direct solution of the symmetric (possibly indefinite) systems.
//!
//! The matrix is symmetrically equilibrated and factored once with a profile
//! LDLᵀ. Solves run preconditioned GMRES against the original matrix until
//! `‖b − A x‖ ≤ tol ‖b‖`, or until the componentwise backward error is at
//! rounding level when cancellation makes that residual unreachable.

mod dense;
mod skyline;
mod sparse;

pub use dense::DenseLu;
pub use skyline::SkylineLdl;
pub use sparse::{CsrMatrix, TripletBuilder};

use crate::error::{Error, Result};
use crate::scalar::{norm2, Real};

/// Default relative residual tolerance for `f64`.
pub const DEFAULT_TOL: f64 = 1.0e-10;

const MAX_RESTARTS: usize = 8;
const KRYLOV_DIM: usize = 40;

/// Tolerance reachable in the scalar type: `max(1e-10, 100 ε)`.
pub fn default_tol<T: Real>() -> T {
    T::lit(DEFAULT_TOL).max(T::epsilon() * T::lit(100.0))
}

/// Componentwise backward error accepted as converged: `1000 ε`.
pub fn backward_tol<T: Real>() -> T {
    T::epsilon() * T::lit(1000.0)
}

/// A reusable factorization of one symmetric matrix.
#[derive(Debug, Clone)]
pub struct Factorization<T> {
    matrix: CsrMatrix<T>,
    scale: Vec<T>,
    ldl: SkylineLdl<T>,
    tol: T,
}

impl<T: Real> Factorization<T> {
    /// Factors `matrix` under the ordering `perm` (`perm[new] = old`).
    pub fn new(matrix: CsrMatrix<T>, perm: Option<&[usize]>) -> Result<Self> {
        let scale: Vec<T> = (0..matrix.nrows())
            .map(|r| {
                let m = matrix.row(r).fold(T::zero(), |m, (_, v)| m.max(v.abs()));
                if m > T::zero() {
                    T::one() / m.sqrt()
                } else {
                    T::one()
                }
            })
            .collect();
        let mut scaled = matrix.clone();
        for (r, &sr) in scale.iter().enumerate() {
            let (cols, vals) = scaled.row_mut(r);
            for (c, v) in cols.iter().zip(vals.iter_mut()) {
                *v *= sr * scale[*c];
            }
        }
        let ldl = SkylineLdl::factor(&scaled, perm)?;
        Ok(Factorization { matrix, scale, ldl, tol: default_tol() })
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.matrix
    }

    pub fn negative_pivots(&self) -> usize {
        self.ldl.negative_pivots()
    }

    fn balanced_norm(&self, v: &[T]) -> T {
        v.iter().zip(&self.scale).map(|(&x, &s)| (x * s) * (x * s)).sum::<T>().sqrt()
    }

    fn apply_inverse(&self, r: &[T]) -> Vec<T> {
        let scaled: Vec<T> = r.iter().zip(&self.scale).map(|(&v, &s)| v * s).collect();
        let mut y = self.ldl.solve(&scaled);
        for (v, s) in y.iter_mut().zip(&self.scale) {
            *v *= *s;
        }
        y
    }

    /// Solves `A x = b`. The factorization is used as a right preconditioner
    /// for restarted GMRES on the equilibrated system, which also covers
    /// factorizations that lost accuracy to small pivots.
    ///
    /// Success means both the unscaled and the balanced relative residual are
    /// within tolerance, or the componentwise backward error is at rounding
    /// level. The second case covers saddle systems whose zero-rhs rows
    /// cancel terms many orders larger than `‖b‖`, where `‖b − A x‖/‖b‖` has
    /// a floor well above `tol` even for the correctly rounded solution.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let bnorm = norm2(b);
        if bnorm == T::zero() {
            return Ok(vec![T::zero(); b.len()]);
        }
        if !bnorm.is_finite() {
            return Err(Error::Solver { reason: "non-finite right-hand side".into(), residual: f64::NAN });
        }
        let sbnorm = self.balanced_norm(b);
        let mut x = self.apply_inverse(b);
        let mut rel = T::infinity();
        for _ in 0..=MAX_RESTARTS {
            let r = self.residual(b, &x);
            rel = norm2(&r) / bnorm;
            // the balanced residual weights every block by its own scale
            let balanced = self.balanced_norm(&r) / sbnorm;
            if !rel.is_finite() || !balanced.is_finite() {
                return Err(Error::Solver { reason: "factorization produced a non-finite solution".into(), residual: f64::NAN });
            }
            if rel <= self.tol && balanced <= self.tol {
                return Ok(x);
            }
            if self.backward_error(b, &x, &r) <= backward_tol::<T>().min(self.tol) {
                return Ok(x);
            }
            let target = self.tol * sbnorm * T::lit(0.1);
            let dx = self.gmres_cycle(&r, target);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi += d;
            }
        }
        Err(Error::Solver { reason: "preconditioned GMRES did not reach the tolerance".into(), residual: rel.as_f64() })
    }

    /// Componentwise backward error `max_i |r_i| / (|A||x| + |b|)_i`.
    fn backward_error(&self, b: &[T], x: &[T], r: &[T]) -> T {
        let mut w = T::zero();
        for i in 0..b.len() {
            let d = self.matrix.row(i).fold(b[i].abs(), |acc, (c, v)| acc + v.abs() * x[c].abs());
            if d > T::zero() {
                w = w.max(r[i].abs() / d);
            } else if r[i] != T::zero() {
                return T::infinity();
            }
        }
        w
    }

    fn residual(&self, b: &[T], x: &[T]) -> Vec<T> {
        let ax = self.matrix.mul_vec(x);
        b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect()
    }

    /// One GMRES(`KRYLOV_DIM`) cycle for `A d = r` in balanced coordinates
    /// (`Ã = S A S`, preconditioner `(LDLᵀ)⁻¹ ≈ Ã⁻¹`), stopping once the
    /// balanced residual estimate falls below `target`.
    fn gmres_cycle(&self, r: &[T], target: T) -> Vec<T> {
        let n = r.len();
        let scaled_apply = |v: &[T]| -> Vec<T> {
            // Ã M⁻¹ v with M⁻¹ = (LDLᵀ)⁻¹
            let z = self.ldl.solve(v);
            let x: Vec<T> = z.iter().zip(&self.scale).map(|(&a, &s)| a * s).collect();
            self.matrix.mul_vec(&x).iter().zip(&self.scale).map(|(&a, &s)| a * s).collect()
        };
        let r0: Vec<T> = r.iter().zip(&self.scale).map(|(&a, &s)| a * s).collect();
        let beta = norm2(&r0);
        if beta == T::zero() {
            return vec![T::zero(); n];
        }
        let mut basis: Vec<Vec<T>> = vec![r0.iter().map(|&v| v / beta).collect()];
        let mut h: Vec<Vec<T>> = Vec::new();
        let (mut cs, mut sn): (Vec<T>, Vec<T>) = (Vec::new(), Vec::new());
        let mut g = vec![beta];
        for j in 0..KRYLOV_DIM {
            let mut w = scaled_apply(&basis[j]);
            let mut col = Vec::with_capacity(j + 2);
            // modified Gram-Schmidt, twice for stability
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let d = w.iter().zip(v).map(|(&a, &b)| a * b).sum::<T>();
                    if col.len() <= i {
                        col.push(T::zero());
                    }
                    col[i] += d;
                    w.iter_mut().zip(v).for_each(|(a, &b)| *a -= d * b);
                }
            }
            let hn = norm2(&w);
            col.push(hn);
            for i in 0..j {
                let (a, b) = (col[i], col[i + 1]);
                col[i] = cs[i] * a + sn[i] * b;
                col[i + 1] = -sn[i] * a + cs[i] * b;
            }
            let (a, b) = (col[j], col[j + 1]);
            let rho = a.hypot(b);
            let (c, s) = if rho == T::zero() { (T::one(), T::zero()) } else { (a / rho, b / rho) };
            cs.push(c);
            sn.push(s);
            col[j] = rho;
            col[j + 1] = T::zero();
            g.push(-s * g[j]);
            g[j] = c * g[j];
            h.push(col);
            let done = g[j + 1].abs() <= target || hn == T::zero();
            if done || j + 1 == KRYLOV_DIM {
                break;
            }
            basis.push(w.iter().map(|&v| v / hn).collect());
        }
        let k = h.len();
        let mut y = vec![T::zero(); k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for jj in i + 1..k {
                acc -= h[jj][i] * y[jj];
            }
            y[i] = if h[i][i] == T::zero() { T::zero() } else { acc / h[i][i] };
        }
        let mut comb = vec![T::zero(); n];
        for (yi, v) in y.iter().zip(&basis) {
            comb.iter_mut().zip(v).for_each(|(a, &b)| *a += *yi * b);
        }
        let z = self.ldl.solve(&comb);
        z.iter().zip(&self.scale).map(|(&a, &s)| a * s).collect()
    }
}

/// One-shot factor-and-solve.
pub fn solve<T: Real>(matrix: &CsrMatrix<T>, rhs: &[T], tol: T) -> Result<Vec<T>> {
    Factorization::new(matrix.clone(), None)?.with_tol(tol).solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let a = CsrMatrix::<f64>::identity(4);
        let b = vec![1.0, -2.0, 3.5, 0.0];
        assert_eq!(solve(&a, &b, 1e-10).unwrap(), b);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = CsrMatrix::<f64>::from_diagonal(&[2.0, 3.0]);
        assert_eq!(solve(&a, &[0.0, 0.0], 1e-10).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn singular_reports_solver_error() {
        let a = CsrMatrix::<f64>::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        let err = solve(&a, &[1.0, 2.0], 1e-10).unwrap_err();
        assert!(matches!(err, Error::Solver { .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn badly_scaled_blocks() {
        // stiffness-like and compliance-like rows differing by 20 orders of magnitude
        let a = CsrMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 4.0e9), (0, 1, -1.0e9), (1, 0, -1.0e9), (1, 1, 4.0e9), (0, 2, -0.5), (2, 0, -0.5), (1, 2, 0.5), (2, 1, 0.5), (2, 2, -1.0e-11)],
        );
        let x_true: [f64; 3] = [1.0e-9, -2.0e-9, 3.0];
        let b = a.mul_vec(&x_true);
        let x = solve(&a, &b, 1e-10).unwrap();
        for (p, q) in x.iter().zip(x_true) {
            assert!((p - q).abs() <= 1e-8 * q.abs());
        }
    }

    #[test]
    fn single_precision_tolerance() {
        assert!(default_tol::<f32>() > 1e-6);
        let a = CsrMatrix::<f32>::from_diagonal(&[2.0, 4.0]);
        let x = Factorization::new(a, None).unwrap().solve(&[1.0, 1.0]).unwrap();
        assert_eq!(x, vec![0.5, 0.25]);
    }
}
