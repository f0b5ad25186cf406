//! Minimal dense / compressed-row matrices used by the objectives.
//!
//! Only the operations the solver needs are provided: `A x`, `Aᵀ y`,
//! row iteration and a handful of norms. Products are accumulated in a fixed
//! order so results are bit-reproducible for a given build.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_dim(c, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Dense product `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim(self.cols, other.rows)?;
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Lower-triangular Cholesky factor `L` with `self = L Lᵀ`.
    pub fn cholesky(&self) -> Result<DenseMatrix> {
        if self.rows != self.cols {
            return Err(Error::Factorization("matrix is not square".into()));
        }
        let n = self.rows;
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l.get(j, k) * l.get(j, k);
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::Factorization(format!(
                    "matrix is not positive definite (pivot {j} = {d:e})"
                )));
            }
            let djj = d.sqrt();
            l.set(j, j, djj);
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / djj);
            }
        }
        Ok(l)
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }
}

/// Compressed sparse row matrix. Column indices within a row are sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// explicit zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::param(format!(
                    "triplet ({i}, {j}) outside a {rows}x{cols} matrix"
                )));
            }
            sorted.push((i, j, v));
        }
        sorted.sort_by_key(|t| (t.0, t.1));

        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            indices.push(j);
            values.push(v);
            indptr[i + 1] += 1;
            last = Some((i, j));
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        let mut m = Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        };
        m.drop_zeros();
        Ok(m)
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|&v| v != 0.0) {
            return;
        }
        let mut indptr = vec![0usize; self.rows + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.rows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                if self.values[k] != 0.0 {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr[i + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.indptr[i]..self.indptr[i + 1];
        self.indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.indptr[i]..self.indptr[i + 1];
        match self.indices[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }
}

/// Storage-agnostic real matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "storage", rename_all = "lowercase")]
pub enum Matrix {
    Dense(DenseMatrix),
    Csr(CsrMatrix),
}

/// Dense storage is used when the fill exceeds this fraction...
pub const DENSE_DENSITY_THRESHOLD: f64 = 0.25;
/// ...or when the larger dimension is at most this.
pub const DENSE_MAX_DIM: usize = 2000;

pub fn prefers_dense(rows: usize, cols: usize, nnz: usize) -> bool {
    let cells = (rows * cols).max(1) as f64;
    nnz as f64 / cells > DENSE_DENSITY_THRESHOLD || rows.max(cols) <= DENSE_MAX_DIM
}

impl From<DenseMatrix> for Matrix {
    fn from(m: DenseMatrix) -> Self {
        Matrix::Dense(m)
    }
}

impl From<CsrMatrix> for Matrix {
    fn from(m: CsrMatrix) -> Self {
        Matrix::Csr(m)
    }
}

impl Matrix {
    /// Builds from triplets, choosing dense or CSR storage by fill and size.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let csr = CsrMatrix::from_triplets(rows, cols, triplets)?;
        if prefers_dense(rows, cols, csr.nnz()) {
            Ok(Matrix::Dense(csr.to_dense()))
        } else {
            Ok(Matrix::Csr(csr))
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.rows,
            Matrix::Csr(m) => m.rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.cols,
            Matrix::Csr(m) => m.cols,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Matrix::Dense(m) => m.get(i, j),
            Matrix::Csr(m) => m.get(i, j),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.data.iter().filter(|v| **v != 0.0).count(),
            Matrix::Csr(m) => m.nnz(),
        }
    }

    /// Visits the stored entries of row `i` in column order. Dense rows skip zeros.
    pub fn for_each_in_row(&self, i: usize, mut f: impl FnMut(usize, f64)) {
        match self {
            Matrix::Dense(m) => {
                for (j, &v) in m.row(i).iter().enumerate() {
                    if v != 0.0 {
                        f(j, v);
                    }
                }
            }
            Matrix::Csr(m) => {
                for (j, v) in m.row(i) {
                    f(j, v);
                }
            }
        }
    }

    /// Stored non-zero entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.rows() {
            self.for_each_in_row(i, |j, v| out.push((i, j, v)));
        }
        out
    }

    /// `out = self * x`
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols());
        debug_assert_eq!(out.len(), self.rows());
        match self {
            Matrix::Dense(m) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = dot(m.row(i), x);
                }
            }
            Matrix::Csr(m) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = m.row(i).map(|(j, v)| v * x[j]).sum();
                }
            }
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows()];
        self.matvec_into(x, &mut out);
        out
    }

    /// `out = selfᵀ * y`
    pub fn matvec_t_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows());
        debug_assert_eq!(out.len(), self.cols());
        out.iter_mut().for_each(|o| *o = 0.0);
        match self {
            Matrix::Dense(m) => {
                for (i, &yi) in y.iter().enumerate() {
                    if yi == 0.0 {
                        continue;
                    }
                    for (o, &a) in out.iter_mut().zip(m.row(i)) {
                        *o += a * yi;
                    }
                }
            }
            Matrix::Csr(m) => {
                for (i, &yi) in y.iter().enumerate() {
                    if yi == 0.0 {
                        continue;
                    }
                    for (j, v) in m.row(i) {
                        out[j] += v * yi;
                    }
                }
            }
        }
    }

    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        self.matvec_t_into(y, &mut out);
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        match self {
            Matrix::Dense(m) => m.data.iter().fold(0.0, |a, v| a.max(v.abs())),
            Matrix::Csr(m) => m.values.iter().fold(0.0, |a, v| a.max(v.abs())),
        }
    }

    /// Induced ∞-norm (largest absolute row sum).
    pub fn max_row_abs_sum(&self) -> f64 {
        (0..self.rows())
            .map(|i| {
                let mut s = 0.0;
                self.for_each_in_row(i, |_, v| s += v.abs());
                s
            })
            .fold(0.0, f64::max)
    }

    /// Induced 1-norm (largest absolute column sum).
    pub fn max_col_abs_sum(&self) -> f64 {
        let mut sums = vec![0.0; self.cols()];
        for i in 0..self.rows() {
            self.for_each_in_row(i, |j, v| sums[j] += v.abs());
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        match self {
            Matrix::Dense(m) => m.data.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Matrix::Csr(m) => m.values.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    /// Returns `(self + selfᵀ) / 2`, keeping the storage kind.
    pub fn symmetrized(&self) -> Result<Matrix> {
        if self.rows() != self.cols() {
            return Err(Error::param("only square matrices can be symmetrized"));
        }
        match self {
            Matrix::Dense(m) => {
                let n = m.rows;
                let mut s = DenseMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        s.set(i, j, 0.5 * (m.get(i, j) + m.get(j, i)));
                    }
                }
                Ok(Matrix::Dense(s))
            }
            Matrix::Csr(m) => {
                let mut trip = Vec::with_capacity(2 * m.nnz());
                for i in 0..m.rows {
                    for (j, v) in m.row(i) {
                        trip.push((i, j, 0.5 * v));
                        trip.push((j, i, 0.5 * v));
                    }
                }
                Ok(Matrix::Csr(CsrMatrix::from_triplets(m.rows, m.cols, &trip)?))
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows() != self.cols() {
            return false;
        }
        let mut ok = true;
        for i in 0..self.rows() {
            self.for_each_in_row(i, |j, v| {
                if self.get(j, i) != v {
                    ok = false;
                }
            });
        }
        ok
    }

    /// Entry-wise absolute values, same storage.
    pub fn abs(&self) -> Matrix {
        match self {
            Matrix::Dense(m) => Matrix::Dense(DenseMatrix {
                rows: m.rows,
                cols: m.cols,
                data: m.data.iter().map(|v| v.abs()).collect(),
            }),
            Matrix::Csr(m) => Matrix::Csr(CsrMatrix {
                values: m.values.iter().map(|v| v.abs()).collect(),
                ..m.clone()
            }),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(m) => m.clone(),
            Matrix::Csr(m) => m.to_dense(),
        }
    }
}

impl CsrMatrix {
    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                d.set(i, j, v);
            }
        }
        d
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[inline]
pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csr_sums_duplicates_and_drops_zeros() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 2.0), (0, 1, 3.0), (1, 0, 1.0), (1, 0, -1.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), 5.0);
        assert_eq!(m.get(1, 0), 0.0);
    }

    #[test]
    fn dense_and_csr_products_agree() {
        let trip = [(0, 0, 1.0), (0, 2, -2.0), (1, 1, 3.0), (2, 0, 4.0), (2, 2, 0.5)];
        let csr = Matrix::Csr(CsrMatrix::from_triplets(3, 3, &trip).unwrap());
        let dense = Matrix::Dense(csr.to_dense());
        let x = [0.3, -1.0, 2.0];
        assert_eq!(csr.matvec(&x), dense.matvec(&x));
        assert_eq!(csr.matvec_t(&x), dense.matvec_t(&x));
        assert_eq!(csr.max_row_abs_sum(), 4.5);
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = DenseMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let l = a.cholesky().unwrap();
        let back = l.matmul(&l.transpose()).unwrap();
        for (x, y) in back.data().iter().zip(a.data()) {
            assert!((x - y).abs() < 1e-14);
        }
        let singular = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(singular.cholesky(), Err(Error::Factorization(_))));
    }

    #[test]
    fn storage_rule() {
        assert!(prefers_dense(100, 100, 10));
        assert!(!prefers_dense(10_000, 10_000, 50_000));
        assert!(prefers_dense(10_000, 10_000, 30_000_000));
    }
}
