//! Deterministic dense symmetric linear algebra.
//!
//! Eigenpairs are always ordered by decreasing `|lambda|` (ties: positive
//! eigenvalue first), and every eigenvector is signed so that its entry of
//! largest magnitude is positive, first index winning ties.

mod jacobi;
mod tridiag;

pub use jacobi::jacobi_eigen;

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SymmetricMatrix};
use crate::rng::hashed_unit;
use crate::scalar::{dot, norm2, Scalar};

/// Top-K eigenpairs of a symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition<T> {
    /// Eigenvalues, `|values[0]| >= |values[1]| >= ...`.
    pub values: Vec<T>,
    /// `n x K`, orthonormal columns.
    pub vectors: DenseMatrix<T>,
}

impl<T: Scalar> EigenDecomposition<T> {
    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// `max |U'U - I|`.
    pub fn orthonormality_error(&self) -> T {
        let g = self.vectors.tr_matmul(&self.vectors).expect("square gram");
        let k = g.nrows();
        let mut worst = T::zero();
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Largest `||M u_k - lambda_k u_k||_2` over the stored pairs.
    pub fn max_residual(&self, m: &SymmetricMatrix<T>) -> T {
        let mut worst = T::zero();
        for (k, &lambda) in self.values.iter().enumerate() {
            let u = self.vectors.column(k);
            let mu = m.mul_vec(&u);
            let r: T = mu
                .iter()
                .zip(&u)
                .map(|(&a, &b)| (a - lambda * b) * (a - lambda * b))
                .sum();
            worst = worst.max(r.sqrt());
        }
        worst
    }
}

/// Orders by `|lambda|` descending, then positive before negative, then by
/// original position.
fn magnitude_order<T: Scalar>(values: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let (va, vb) = (values[a], values[b]);
        vb.abs()
            .partial_cmp(&va.abs())
            .unwrap_or(Ordering::Equal)
            .then(vb.partial_cmp(&va).unwrap_or(Ordering::Equal))
            .then(a.cmp(&b))
    });
    idx
}

/// Flips `v` so its largest-magnitude entry (first on ties) is positive.
pub(crate) fn apply_sign_rule<T: Scalar>(v: &mut [T]) {
    let mut best = 0;
    let mut best_abs = T::neg_infinity();
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    if !v.is_empty() && v[best] < T::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Sorts a full set of eigenpairs (vectors as columns of `vecs`), keeps `k`,
/// and applies the sign rule.
pub(crate) fn finish_decomposition<T: Scalar>(values: Vec<T>, vecs: DenseMatrix<T>, k: usize) -> EigenDecomposition<T> {
    let order = magnitude_order(&values);
    let n = vecs.nrows();
    let mut out = DenseMatrix::zeros(n, k);
    let mut sorted = Vec::with_capacity(k);
    for (col, &src) in order.iter().take(k).enumerate() {
        sorted.push(values[src]);
        let mut v = vecs.column(src);
        apply_sign_rule(&mut v);
        for (i, x) in v.into_iter().enumerate() {
            out[(i, col)] = x;
        }
    }
    EigenDecomposition {
        values: sorted,
        vectors: out,
    }
}

const RESIDUAL_TOL: f64 = 1e-8;

/// The `k` eigenpairs of largest `|lambda|`.
///
/// Reduces to tridiagonal form with Householder reflections, takes all
/// eigenvalues of the tridiagonal by implicit QL, and recovers only the `k`
/// selected eigenvectors by inverse iteration followed by back-transformation.
/// Every returned pair is checked against `||M u - lambda u|| <= 1e-8 max(1, ||M||)`.
pub fn sym_eigen_topk<T: Scalar>(m: &SymmetricMatrix<T>, k: usize) -> Result<EigenDecomposition<T>> {
    let n = m.dim();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("requested {k} eigenpairs of a {n}x{n} matrix")));
    }
    if !m.as_dense().is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let tri = tridiag::tridiagonalize(m.as_dense().data(), n);
    let eigenvalues = tridiag::ql_eigenvalues(&tri.diag, &tri.off).map_err(|it| Error::NumericFailure {
        what: "implicit QL iteration cap reached",
        iterations: it,
        residual: f64::NAN,
    })?;
    let order = magnitude_order(&eigenvalues);
    let spectral = eigenvalues[order[0]].abs();

    let mut tri_vectors: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut values = Vec::with_capacity(k);
    for (j, &src) in order.iter().take(k).enumerate() {
        let lambda = eigenvalues[src];
        let (y, _) = tri.eigenvector(lambda, &tri_vectors, 0x5EED_0000 + j as u64);
        tri_vectors.push(y);
        values.push(lambda);
    }

    let mut vectors = DenseMatrix::zeros(n, k);
    for (col, y) in tri_vectors.iter().enumerate() {
        let mut u = y.clone();
        tri.apply_q(&mut u);
        apply_sign_rule(&mut u);
        for (i, x) in u.into_iter().enumerate() {
            vectors[(i, col)] = x;
        }
    }
    let decomposition = EigenDecomposition { values, vectors };

    let bound = T::tol(RESIDUAL_TOL) * spectral.max(T::one());
    let residual = decomposition.max_residual(m);
    if !(residual <= bound) {
        return Err(Error::NumericFailure {
            what: "eigenpair residual above tolerance",
            iterations: k,
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(decomposition)
}

const POWER_MAX_ITER: usize = 10_000;
const POWER_TOL: f64 = 1e-10;

/// `max_k |lambda_k(M)|` by power iteration on `M^2`.
///
/// Applying the matrix twice per step makes `+lambda` and `-lambda` the same
/// dominant value. The start vector is a fixed pseudo-random unit vector, and
/// iteration stops once the Rayleigh quotient of `M^2` changes by at most
/// `1e-10` relative, or after 10 000 steps.
pub fn spectral_norm<T: Scalar>(m: &SymmetricMatrix<T>) -> T {
    let n = m.dim();
    let mut x: Vec<T> = (0..n).map(|i| T::lit(hashed_unit(0x0051_6E41, i))).collect();
    let nrm = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nrm);
    let mut y = vec![T::zero(); n];
    let mut z = vec![T::zero(); n];
    let tol = T::tol(POWER_TOL);
    let mut previous = T::zero();
    for _ in 0..POWER_MAX_ITER {
        m.mul_vec_into(&x, &mut y);
        let rq = dot(&y, &y);
        if rq == T::zero() {
            return T::zero();
        }
        if (rq - previous).abs() <= tol * rq {
            return rq.sqrt();
        }
        previous = rq;
        m.mul_vec_into(&y, &mut z);
        let nz = norm2(&z);
        if nz == T::zero() {
            return rq.sqrt();
        }
        for (xi, &zi) in x.iter_mut().zip(&z) {
            *xi = zi / nz;
        }
    }
    previous.sqrt()
}

const DEGENERATE_ROW_NORM: f64 = 1e-14;

/// Scales every row to unit Euclidean norm, returning the original norms.
pub fn row_normalize<T: Scalar>(u: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, Vec<T>)> {
    let mut out = u.clone();
    let mut norms = Vec::with_capacity(u.nrows());
    for i in 0..u.nrows() {
        let nrm = norm2(u.row(i));
        if !(nrm >= T::lit(DEGENERATE_ROW_NORM)) {
            return Err(Error::DegenerateRow { row: i });
        }
        out.row_mut(i).iter_mut().for_each(|v| *v /= nrm);
        norms.push(nrm);
    }
    Ok((out, norms))
}

/// Largest row Euclidean norm.
pub fn two_to_infty_norm<T: Scalar>(m: &DenseMatrix<T>) -> T {
    m.rows_iter().map(norm2).fold(T::zero(), T::max)
}

pub const MAX_SMALL_DIM: usize = 64;
const MAX_CONDITION: f64 = 1e12;

/// Inverse of a small square matrix by Gauss-Jordan elimination with partial
/// pivoting. Fails when the 1-norm condition number exceeds `1e12`.
pub fn invert_small<T: Scalar>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let k = m.nrows();
    if k != m.ncols() {
        return Err(Error::invalid(format!("{}x{} matrix is not square", k, m.ncols())));
    }
    if k == 0 || k > MAX_SMALL_DIM {
        return Err(Error::invalid(format!("dimension {k} outside 1..={MAX_SMALL_DIM}")));
    }
    let mut a = m.clone();
    let mut inv = DenseMatrix::<T>::identity(k);
    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&i, &j| {
                a[(i, col)]
                    .abs()
                    .partial_cmp(&a[(j, col)].abs())
                    .unwrap_or(Ordering::Equal)
                    .then(j.cmp(&i))
            })
            .expect("non-empty range");
        let pivot = a[(pivot_row, col)];
        if pivot == T::zero() || !pivot.is_finite() {
            return Err(Error::IllConditioned {
                condition: f64::INFINITY,
            });
        }
        if pivot_row != col {
            for j in 0..k {
                let (x, y) = (a[(col, j)], a[(pivot_row, j)]);
                a[(col, j)] = y;
                a[(pivot_row, j)] = x;
                let (x, y) = (inv[(col, j)], inv[(pivot_row, j)]);
                inv[(col, j)] = y;
                inv[(pivot_row, j)] = x;
            }
        }
        let p = T::one() / pivot;
        for j in 0..k {
            a[(col, j)] *= p;
            inv[(col, j)] *= p;
        }
        for i in 0..k {
            if i == col {
                continue;
            }
            let f = a[(i, col)];
            if f == T::zero() {
                continue;
            }
            for j in 0..k {
                let (ac, ic) = (a[(col, j)], inv[(col, j)]);
                a[(i, j)] -= f * ac;
                inv[(i, j)] -= f * ic;
            }
        }
    }
    let condition = one_norm(m) * one_norm(&inv);
    if !(condition <= T::lit(MAX_CONDITION)) {
        return Err(Error::IllConditioned {
            condition: condition.to_f64_lossy(),
        });
    }
    Ok(inv)
}

/// 1-norm condition number of a small matrix, `inf` when singular.
pub fn condition_number<T: Scalar>(m: &DenseMatrix<T>) -> f64 {
    match invert_small(m) {
        Ok(inv) => (one_norm(m) * one_norm(&inv)).to_f64_lossy(),
        Err(Error::IllConditioned { condition }) => condition,
        Err(_) => f64::NAN,
    }
}

fn one_norm<T: Scalar>(m: &DenseMatrix<T>) -> T {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)].abs()).sum::<T>())
        .fold(T::zero(), T::max)
}
