//! Dense row-major matrices.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "buffer of length {} cannot hold a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds from nested rows; all rows must share a length.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::invalid(format!("row {i} has length {}, expected {cols}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Convenience for literals in tests and examples.
    pub fn from_f64_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let conv: Vec<Vec<T>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| T::lit(v)).collect())
            .collect();
        Self::from_rows(&conv)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[T]> {
        // chunks_exact panics on zero, and a 0-column matrix has no useful rows
        let c = self.cols.max(1);
        self.data.chunks_exact(c).take(if self.cols == 0 { 0 } else { self.rows })
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let a = self.row(i);
            let o = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (l, &ail) in a.iter().enumerate() {
                if ail == T::zero() {
                    continue;
                }
                for (oj, &b) in o.iter_mut().zip(rhs.row(l)) {
                    *oj += ail * b;
                }
            }
        }
        Ok(out)
    }

    /// `self' * rhs` without forming the transpose.
    pub fn tr_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::invalid("row counts differ in transposed product"));
        }
        let mut out = Self::zeros(self.cols, rhs.cols);
        for i in 0..self.rows {
            let a = self.row(i);
            let b = rhs.row(i);
            for (p, &ap) in a.iter().enumerate() {
                let o = out.row_mut(p);
                for (oq, &bq) in o.iter_mut().zip(b) {
                    *oq += ap * bq;
                }
            }
        }
        Ok(out)
    }

    /// Rows at `idx`, in that order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        dot(&self.data, &self.data).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn cast<U: Scalar>(&self) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| U::lit(v.to_f64_lossy())).collect(),
        }
    }

    pub fn to_f64(&self) -> DenseMatrix<f64> {
        self.cast()
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Square matrix whose storage is symmetric by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix<T> {
    inner: DenseMatrix<T>,
}

impl<T: Scalar> SymmetricMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            inner: DenseMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DenseMatrix::identity(n),
        }
    }

    /// Wraps a dense matrix, rejecting any entry pair with `m[i][j] != m[j][i]`.
    pub fn new(m: DenseMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::invalid(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
        }
        if m.nrows() == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        for i in 0..m.nrows() {
            for j in (i + 1)..m.ncols() {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::invalid(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(Self { inner: m })
    }

    /// Fills from `f(i, j)` evaluated on `i <= j` and mirrored.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self { inner: m }
    }

    pub fn from_f64_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(DenseMatrix::from_f64_rows(rows)?)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.inner[(i, j)]
    }

    /// Writes both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.inner[(i, j)] = v;
        self.inner[(j, i)] = v;
    }

    #[inline]
    pub fn as_dense(&self) -> &DenseMatrix<T> {
        &self.inner
    }

    pub fn into_dense(self) -> DenseMatrix<T> {
        self.inner
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        self.inner.row(i)
    }

    /// `y = M x`
    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim()];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::invalid("dimension mismatch in subtraction"));
        }
        let data = self
            .inner
            .data()
            .iter()
            .zip(other.inner.data())
            .map(|(&a, &b)| a - b)
            .collect();
        Ok(Self {
            inner: DenseMatrix::from_vec(self.dim(), self.dim(), data)?,
        })
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            inner: self.inner.scale(c),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.inner.frobenius_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymmetric_input_rejected() {
        let m = DenseMatrix::<f64>::from_f64_rows(&[[1.0, 2.0], [2.5, 1.0]]).unwrap();
        assert!(SymmetricMatrix::new(m).is_err());
    }

    #[test]
    fn products() {
        let a = DenseMatrix::<f64>::from_f64_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        let b = DenseMatrix::<f64>::from_f64_rows(&[[1.0, 0.0], [1.0, 1.0]]).unwrap();
        let ab = a.matmul(&b).unwrap();
        assert_eq!(ab.row(2), &[11.0, 6.0]);
        let ata = a.tr_matmul(&a).unwrap();
        assert_eq!(ata, a.transpose().matmul(&a).unwrap());
        assert!(b.matmul(&a).is_err());
    }

    #[test]
    fn set_keeps_symmetry() {
        let mut s = SymmetricMatrix::<f32>::zeros(3);
        s.set(0, 2, 1.5);
        assert_eq!(s.get(2, 0), 1.5);
        assert!(SymmetricMatrix::new(s.into_dense()).is_ok());
    }
}
