//! Membership estimation.
//!
//! `spacl` (simplex, MMSB): top-K eigenvectors `U`, successive projection
//! corners `I`, `Z = U U(I,:)^{-1}`, clip negatives, normalize rows in l1.
//!
//! `svmcone_dcmm` (cone, DCMM): top-K eigenpairs `(U, L)`, unit rows `U*`,
//! cone corners `I` from [`svm_cone`], `J = sqrt(diag(U*(I,:) L U*(I,:)'))`,
//! `Z = U U*(I,:)^{-1} J`, clip negatives, normalize rows in l1.
//!
//! The ideal variants run the same pipeline on the population matrix.

use serde::Serialize;

use crate::cornerhunt::{successive_projection, svm_cone, CornerSet};
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SymmetricMatrix};
use crate::netmodels::{Adjacency, PopulationMatrix};
use crate::numlin::{condition_number, invert_small, row_normalize, sym_eigen_topk, EigenDecomposition};
use crate::scalar::Scalar;

/// Counters for the places where the estimators repair their input.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EstimateDiagnostics {
    /// 1-norm condition number of the corner matrix that was inverted.
    pub corner_condition: f64,
    /// Rows in which at least one entry was clipped to zero.
    pub clipped_rows: usize,
    /// Rows whose clipped sum was zero and that fell back to `1/K`.
    pub zero_sum_rows: usize,
    /// Negative diagonal entries of `U*(I,:) L U*(I,:)'` clipped before the
    /// square root (cone estimator only).
    pub negative_scale_entries: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipEstimate<T> {
    /// `n x K`, nonnegative, rows sum to one.
    pub rows: DenseMatrix<T>,
    pub corners: CornerSet,
    pub diagnostics: EstimateDiagnostics,
}

fn failure(corners: &[usize], source: Error) -> Error {
    Error::EstimationFailure {
        corners: corners.to_vec(),
        source: Box::new(source),
    }
}

/// `max(0, z)` followed by l1 normalization with a uniform fallback.
fn clip_and_normalize<T: Scalar>(mut z: DenseMatrix<T>, diagnostics: &mut EstimateDiagnostics) -> DenseMatrix<T> {
    let k = z.ncols();
    let uniform = T::one() / T::lit(k as f64);
    for i in 0..z.nrows() {
        let row = z.row_mut(i);
        let mut clipped = false;
        for v in row.iter_mut() {
            if !(*v >= T::zero()) {
                *v = T::zero();
                clipped = true;
            }
        }
        if clipped {
            diagnostics.clipped_rows += 1;
        }
        let s: T = row.iter().copied().sum();
        if s > T::zero() && s.is_finite() {
            row.iter_mut().for_each(|v| *v /= s);
        } else {
            diagnostics.zero_sum_rows += 1;
            row.iter_mut().for_each(|v| *v = uniform);
        }
    }
    z
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("K = {k} must lie in 1..={n}")));
    }
    Ok(())
}

/// Simplex estimator from precomputed top-K eigenvectors.
pub fn spacl_from_eigen<T: Scalar>(eigen: &EigenDecomposition<T>) -> Result<MembershipEstimate<T>> {
    let u = &eigen.vectors;
    let k = eigen.k();
    let corners = successive_projection(u, k).map_err(|e| failure(&[], e))?;
    let corner_rows = u.select_rows(corners.indices());
    let inv = invert_small(&corner_rows).map_err(|e| failure(corners.indices(), e))?;
    let z = u.matmul(&inv)?;
    let mut diagnostics = EstimateDiagnostics {
        corner_condition: condition_number(&corner_rows),
        ..Default::default()
    };
    let rows = clip_and_normalize(z, &mut diagnostics);
    Ok(MembershipEstimate {
        rows,
        corners,
        diagnostics,
    })
}

fn spacl_matrix<T: Scalar>(m: &SymmetricMatrix<T>, k: usize) -> Result<MembershipEstimate<T>> {
    check_k(m.dim(), k)?;
    let eigen = sym_eigen_topk(m, k)?;
    spacl_from_eigen(&eigen)
}

/// Simplex estimator on a sampled graph.
pub fn spacl<T: Scalar>(a: &Adjacency, k: usize) -> Result<MembershipEstimate<T>> {
    spacl_matrix(&a.to_matrix::<T>(), k)
}

/// Simplex estimator on the population matrix; recovers `Pi` exactly up to a
/// column permutation.
pub fn ideal_spacl<T: Scalar>(omega: &PopulationMatrix<T>, k: usize) -> Result<MembershipEstimate<T>> {
    spacl_matrix(omega.omega(), k)
}

/// Cone estimator from precomputed top-K eigenpairs.
pub fn svmcone_from_eigen<T: Scalar>(eigen: &EigenDecomposition<T>, seed: u64) -> Result<MembershipEstimate<T>> {
    let u = &eigen.vectors;
    let k = eigen.k();
    let (u_star, _) = row_normalize(u)?;
    let corners = svm_cone(&u_star, k, seed).map_err(|e| failure(&[], e))?;
    let idx = corners.indices();
    let corner_rows = u_star.select_rows(idx);

    let mut diagnostics = EstimateDiagnostics::default();
    // diag(U*(I,:) L U*(I,:)')
    let scales: Vec<T> = corner_rows
        .rows_iter()
        .map(|r| {
            let d: T = r.iter().zip(&eigen.values).map(|(&x, &l)| x * x * l).sum();
            if d < T::zero() {
                diagnostics.negative_scale_entries += 1;
                T::zero()
            } else {
                d.sqrt()
            }
        })
        .collect();

    let inv = invert_small(&corner_rows).map_err(|e| failure(idx, e))?;
    diagnostics.corner_condition = condition_number(&corner_rows);
    let mut z = u.matmul(&inv)?;
    for i in 0..z.nrows() {
        for (v, &j) in z.row_mut(i).iter_mut().zip(&scales) {
            *v *= j;
        }
    }
    let rows = clip_and_normalize(z, &mut diagnostics);
    Ok(MembershipEstimate {
        rows,
        corners,
        diagnostics,
    })
}

fn svmcone_matrix<T: Scalar>(m: &SymmetricMatrix<T>, k: usize, seed: u64) -> Result<MembershipEstimate<T>> {
    check_k(m.dim(), k)?;
    let eigen = sym_eigen_topk(m, k)?;
    svmcone_from_eigen(&eigen, seed)
}

/// Cone estimator on a sampled graph. Nodes whose eigenvector row vanishes
/// (isolated nodes) are reported as [`Error::DegenerateRow`].
pub fn svmcone_dcmm<T: Scalar>(a: &Adjacency, k: usize, seed: u64) -> Result<MembershipEstimate<T>> {
    svmcone_matrix(&a.to_matrix::<T>(), k, seed)
}

/// Cone estimator on the population matrix.
pub fn ideal_svmcone_dcmm<T: Scalar>(omega: &PopulationMatrix<T>, k: usize, seed: u64) -> Result<MembershipEstimate<T>> {
    svmcone_matrix(omega.omega(), k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cliques(size: usize) -> Adjacency {
        let mut edges = Vec::new();
        for block in 0..2 {
            let off = block * size;
            for i in 0..size {
                for j in (i + 1)..size {
                    edges.push((off + i, off + j));
                }
            }
        }
        Adjacency::from_edges(2 * size, &edges).unwrap()
    }

    #[test]
    fn two_cliques_give_pure_rows() {
        let a = two_cliques(6);
        for est in [spacl::<f64>(&a, 2).unwrap(), svmcone_dcmm::<f64>(&a, 2, 4).unwrap()] {
            for r in est.rows.rows_iter() {
                let pure = (r[0] - 1.0).abs() < 1e-6 && r[1].abs() < 1e-6 || (r[1] - 1.0).abs() < 1e-6 && r[0].abs() < 1e-6;
                assert!(pure, "{r:?}");
            }
            // the two cliques land in different columns
            assert!((est.rows[(0, 0)] - est.rows[(6, 0)]).abs() > 0.5);
        }
    }

    #[test]
    fn single_community() {
        let a = crate::netmodels::sample_er(30, 0.4, 2).unwrap();
        let est = spacl::<f64>(&a, 1).unwrap();
        assert!(est.rows.data().iter().all(|&v| v == 1.0));
        let est = svmcone_dcmm::<f64>(&a, 1, 0).unwrap();
        assert!(est.rows.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn isolated_node_rejected_by_cone_estimator() {
        let mut edges = vec![];
        for i in 0..5 {
            for j in (i + 1)..5 {
                edges.push((i, j));
            }
        }
        let a = Adjacency::from_edges(6, &edges).unwrap();
        let err = svmcone_dcmm::<f64>(&a, 1, 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateRow { row: 5 }), "{err}");
    }

    #[test]
    fn k_out_of_range() {
        let a = two_cliques(3);
        assert!(matches!(spacl::<f64>(&a, 7), Err(Error::InvalidArgument(_))));
        assert!(matches!(spacl::<f64>(&a, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn clip_fallback_counts() {
        let z = DenseMatrix::<f64>::from_f64_rows(&[[-1.0, 3.0], [-1.0, -2.0], [1.0, 1.0]]).unwrap();
        let mut d = EstimateDiagnostics::default();
        let out = clip_and_normalize(z, &mut d);
        assert_eq!(out.data(), &[0.0, 1.0, 0.5, 0.5, 0.5, 0.5]);
        assert_eq!((d.clipped_rows, d.zero_sum_rows), (2, 1));
    }
}
