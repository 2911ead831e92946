//! Dense LU with partial pivoting for small systems.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct DenseLu<T> {
    n: usize,
    lu: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Real> DenseLu<T> {
    /// Factors a row-major `n×n` matrix.
    pub fn factor(n: usize, mut a: Vec<T>) -> Result<Self> {
        assert_eq!(a.len(), n * n, "dense matrix must be n*n");
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for r in k + 1..n {
                let v = a[r * n + k].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == T::zero() || !best.is_finite() {
                return Err(Error::Solver { reason: format!("singular matrix at column {k}"), residual: f64::NAN });
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                piv.swap(k, p);
            }
            let pivot = a[k * n + k];
            for r in k + 1..n {
                let f = a[r * n + k] / pivot;
                a[r * n + k] = f;
                if f != T::zero() {
                    for c in k + 1..n {
                        let u = a[k * n + c];
                        a[r * n + c] -= f * u;
                    }
                }
            }
        }
        Ok(DenseLu { n, lu: a, piv })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            a.extend_from_slice(r);
        }
        Self::factor(n, a)
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.piv.iter().map(|&i| b[i]).collect();
        for r in 0..n {
            let mut s = x[r];
            for c in 0..r {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for c in r + 1..n {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s / self.lu[r * n + r];
        }
        x
    }

    pub fn determinant(&self) -> T {
        let mut det = T::one();
        for k in 0..self.n {
            det *= self.lu[k * self.n + k];
        }
        // parity of the row permutation from its cycle structure
        let mut seen = vec![false; self.n];
        let mut transpositions = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut j = s;
            while !seen[j] {
                seen[j] = true;
                j = self.piv[j];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 1 {
            -det
        } else {
            det
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn needs_pivoting() {
        let lu = DenseLu::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(lu.solve(&[2.0, 3.0]), vec![3.0, 2.0]);
        assert_eq!(lu.determinant(), -1.0);
    }

    #[test]
    fn singular_detected() {
        assert!(DenseLu::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
    }

    #[test]
    fn three_by_three() {
        let rows: Vec<Vec<f64>> = vec![vec![4.0, -2.0, 1.0], vec![-2.0, 4.0, -2.0], vec![1.0, -2.0, 4.0]];
        let lu = DenseLu::from_rows(&rows).unwrap();
        let x = lu.solve(&[11.0, -16.0, 17.0]);
        let expect = [1.0, -2.0, 3.0];
        for (a, b) in x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!((lu.determinant() - 36.0).abs() < 1e-12);
    }
}
