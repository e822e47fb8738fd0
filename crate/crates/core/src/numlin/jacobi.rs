//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SymmetricMatrix};
use crate::scalar::Scalar;

use super::{finish_decomposition, EigenDecomposition};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps run until the off-diagonal Frobenius mass is at most
/// `1e-12 * ||M||_F`, for at most 100 sweeps. Pairs come back ordered by
/// decreasing `|lambda|` with the crate's sign convention applied. Cost is
/// `O(n^3)` per sweep, so this is meant for small matrices (Gram matrices,
/// mixing matrices) and as an independent check on [`super::sym_eigen_topk`].
pub fn jacobi_eigen<T: Scalar>(m: &SymmetricMatrix<T>) -> Result<EigenDecomposition<T>> {
    let n = m.dim();
    let mut a = m.as_dense().clone();
    let mut v = DenseMatrix::<T>::identity(n);
    let target = T::tol(OFF_DIAGONAL_TOL) * m.frobenius_norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NumericFailure {
                what: "jacobi sweeps did not converge",
                iterations: sweeps,
                residual: off.to_f64_lossy(),
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let values: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
    Ok(finish_decomposition(values, v, n))
}

fn off_diagonal_norm<T: Scalar>(a: &DenseMatrix<T>) -> T {
    let n = a.nrows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

fn rotate<T: Scalar>(a: &mut DenseMatrix<T>, v: &mut DenseMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == T::zero() {
        return;
    }
    let two = T::lit(2.0);
    let tau = (a[(q, q)] - a[(p, p)]) / (two * apq);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let n = a.nrows();

    // A <- A J (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    // A <- J' A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = T::zero();
    a[(q, p)] = T::zero();
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}
