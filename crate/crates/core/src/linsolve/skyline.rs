//! Profile (skyline) LDLᵀ factorization for symmetric, possibly indefinite matrices.
//!
//! No pivoting is performed, so indefinite systems must be supplied with an
//! ordering that keeps every leading block nonsingular. For the saddle systems
//! of this crate that means each pressure unknown is eliminated after the
//! displacement unknowns it couples to.

use crate::error::{Error, Result};
use crate::linsolve::sparse::CsrMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct SkylineLdl<T> {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    /// First stored column of each (permuted) row.
    first: Vec<usize>,
    row_ptr: Vec<usize>,
    lower: Vec<T>,
    diag: Vec<T>,
}

impl<T: Real> SkylineLdl<T> {
    /// Factors the symmetric matrix `a` (full storage) under `perm`, where
    /// `perm[new] = old`. `None` keeps the natural order.
    pub fn factor(a: &CsrMatrix<T>, perm: Option<&[usize]>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Solver { reason: format!("matrix is {}x{}, not square", n, a.ncols()), residual: f64::NAN });
        }
        let perm: Vec<usize> = match perm {
            Some(p) => {
                check_permutation(p, n)?;
                p.to_vec()
            }
            None => (0..n).collect(),
        };
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        let mut first: Vec<usize> = (0..n).collect();
        for r in 0..n {
            let pr = inv[r];
            for (c, _) in a.row(r) {
                let pc = inv[c];
                if pc < pr {
                    first[pr] = first[pr].min(pc);
                }
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + (i - first[i]);
        }
        let mut lower = vec![T::zero(); row_ptr[n]];
        let mut diag = vec![T::zero(); n];
        for r in 0..n {
            let pr = inv[r];
            for (c, v) in a.row(r) {
                let pc = inv[c];
                if pc < pr {
                    lower[row_ptr[pr] + pc - first[pr]] += v;
                } else if pc == pr {
                    diag[pr] += v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let (done, rest) = lower.split_at_mut(row_ptr[i]);
            let row_i = &mut rest[..i - fi];
            for j in fi..i {
                let fj = first[j];
                let m = fi.max(fj);
                if m < j {
                    let row_j = &done[row_ptr[j]..row_ptr[j + 1]];
                    let mut s = T::zero();
                    for k in m..j {
                        s += row_i[k - fi] * row_j[k - fj];
                    }
                    row_i[j - fi] -= s;
                }
            }
            let mut d = diag[i];
            for k in fi..i {
                let g = row_i[k - fi];
                let l = g / diag[k];
                d -= l * g;
                row_i[k - fi] = l;
            }
            if d == T::zero() || !d.is_finite() {
                return Err(Error::Solver {
                    reason: format!("zero or non-finite pivot {d} at position {i} (original row {})", perm[i]),
                    residual: f64::NAN,
                });
            }
            diag[i] = d;
        }
        Ok(SkylineLdl { n, perm, first, row_ptr, lower, diag })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored off-diagonal entries of `L`.
    pub fn profile_size(&self) -> usize {
        self.lower.len()
    }

    /// Count of negative pivots (the matrix inertia's negative part).
    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|d| **d < T::zero()).count()
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        assert_eq!(rhs.len(), self.n, "rhs dimension mismatch");
        let mut y: Vec<T> = self.perm.iter().map(|&old| rhs[old]).collect();
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.lower[self.row_ptr[i]..self.row_ptr[i + 1]];
            let mut s = T::zero();
            for (k, &l) in row.iter().enumerate() {
                s += l * y[fi + k];
            }
            y[i] -= s;
        }
        for (yi, d) in y.iter_mut().zip(&self.diag) {
            *yi /= *d;
        }
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let xi = y[i];
            let row = &self.lower[self.row_ptr[i]..self.row_ptr[i + 1]];
            for (k, &l) in row.iter().enumerate() {
                y[fi + k] -= l * xi;
            }
        }
        let mut x = vec![T::zero(); self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

fn check_permutation(p: &[usize], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::Solver { reason: format!("ordering has length {} for a system of size {n}", p.len()), residual: f64::NAN });
    }
    let mut seen = vec![false; n];
    for &i in p {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Solver { reason: "ordering is not a permutation".into(), residual: f64::NAN });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn tridiagonal_solve() {
        let a = laplacian_1d(6);
        let f = SkylineLdl::factor(&a, None).unwrap();
        let x_true: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
        let b = a.mul_vec(&x_true);
        let x = f.solve(&b);
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-13);
        }
        assert_eq!(f.negative_pivots(), 0);
    }

    #[test]
    fn indefinite_kkt_with_ordering() {
        // [[2, 0, 1], [0, 2, 1], [1, 1, 0]]: zero diagonal last is fine
        let a = CsrMatrix::<f64>::from_triplets(3, 3, &[(0, 0, 2.0), (1, 1, 2.0), (0, 2, 1.0), (2, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)]);
        // eliminating the zero-diagonal row first breaks down
        assert!(SkylineLdl::factor(&a, Some(&[2, 0, 1])).is_err());
        let f = SkylineLdl::factor(&a, None).unwrap();
        assert_eq!(f.negative_pivots(), 1);
        let x = f.solve(&[3.0, 3.0, 2.0]);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn permuted_solve_matches_natural() {
        let a = laplacian_1d(7);
        let b: Vec<f64> = (0..7).map(|i| i as f64 - 2.0).collect();
        let perm = [3, 0, 6, 1, 5, 2, 4];
        let x1 = SkylineLdl::factor(&a, None).unwrap().solve(&b);
        let x2 = SkylineLdl::factor(&a, Some(&perm)).unwrap().solve(&b);
        for (p, q) in x1.iter().zip(&x2) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_permutation() {
        let a = laplacian_1d(3);
        assert!(SkylineLdl::factor(&a, Some(&[0, 0, 1])).is_err());
    }
}
