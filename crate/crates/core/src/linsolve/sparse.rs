//! Compressed sparse row matrices with deterministic assembly.

use crate::scalar::Real;

/// Row-major compressed sparse matrix. Column indices are sorted within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

/// Coordinate-format accumulator. Duplicates are summed in insertion order,
/// so the assembled matrix does not depend on how entries are grouped.
#[derive(Debug, Clone)]
pub struct TripletBuilder<T> {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> TripletBuilder<T> {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletBuilder { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        TripletBuilder { nrows, ncols, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    /// Appends `scale * m` shifted by `(row_offset, col_offset)`.
    pub fn push_block(&mut self, m: &CsrMatrix<T>, row_offset: usize, col_offset: usize, scale: T) {
        for r in 0..m.nrows {
            for (c, v) in m.row(r) {
                self.push(r + row_offset, c + col_offset, scale * v);
            }
        }
    }

    /// Appends `scale * mᵀ` shifted by `(row_offset, col_offset)`.
    pub fn push_block_transposed(&mut self, m: &CsrMatrix<T>, row_offset: usize, col_offset: usize, scale: T) {
        for r in 0..m.nrows {
            for (c, v) in m.row(r) {
                self.push(c + row_offset, r + col_offset, scale * v);
            }
        }
    }

    pub fn build(mut self) -> CsrMatrix<T> {
        // stable: equal (row, col) keep insertion order
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut values: Vec<T> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("entry exists") += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..self.nrows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, indptr, indices, values }
    }
}

impl<T: Real> CsrMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); n])
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        CsrMatrix { nrows: n, ncols: n, indptr: (0..=n).collect(), indices: (0..n).collect(), values: diag.to_vec() }
    }

    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut b = TripletBuilder::with_capacity(nrows, ncols, triplets.len());
        for &(r, c, v) in triplets {
            b.push(r, c, v);
        }
        b.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn row_mut(&mut self, r: usize) -> (&[usize], &mut [T]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &mut self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols, "matvec dimension mismatch");
        for (r, yr) in y.iter_mut().enumerate() {
            let mut s = T::zero();
            for k in self.indptr[r]..self.indptr[r + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            *yr = s;
        }
    }

    /// `y = Aᵀ x`
    pub fn mul_transpose_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.nrows, "transposed matvec dimension mismatch");
        let mut y = vec![T::zero(); self.ncols];
        for (r, &xr) in x.iter().enumerate() {
            for k in self.indptr[r]..self.indptr[r + 1] {
                y[self.indices[k]] += self.values[k] * xr;
            }
        }
        y
    }

    pub fn transpose(&self) -> CsrMatrix<T> {
        let mut b = TripletBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        b.push_block_transposed(self, 0, 0, T::one());
        b.build()
    }

    /// `self + scale * other` on the union pattern.
    pub fn add_scaled(&self, other: &CsrMatrix<T>, scale: T) -> CsrMatrix<T> {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut b = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        b.push_block(self, 0, 0, T::one());
        b.push_block(other, 0, 0, scale);
        b.build()
    }

    pub fn scaled(&self, scale: T) -> CsrMatrix<T> {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= scale);
        m
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.nrows).map(|r| self.row(r).map(|(_, v)| v).sum()).collect()
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.ncols]; self.nrows];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        d
    }

    /// Symmetric elimination of prescribed rows/columns: each constrained row and
    /// column is zeroed, its diagonal set to one, and `rhs` is adjusted so the
    /// remaining equations see the prescribed values.
    pub fn apply_dirichlet(&mut self, constrained: &[(usize, T)], rhs: &mut [T]) {
        let mut value_of: Vec<Option<T>> = vec![None; self.nrows];
        for &(d, g) in constrained {
            value_of[d] = Some(g);
        }
        for r in 0..self.nrows {
            let span = self.indptr[r]..self.indptr[r + 1];
            if let Some(g) = value_of[r] {
                for k in span {
                    self.values[k] = if self.indices[k] == r { T::one() } else { T::zero() };
                }
                rhs[r] = g;
            } else {
                for k in span {
                    if let Some(g) = value_of[self.indices[k]] {
                        rhs[r] -= self.values[k] * g;
                        self.values[k] = T::zero();
                    }
                }
            }
        }
        for &(d, g) in constrained {
            if self.get(d, d) == T::zero() {
                panic!("constrained dof {d} has no diagonal entry in the sparsity pattern");
            }
            rhs[d] = g;
        }
    }
}
