//! Spectral estimation of mixed memberships in network models.
//!
//! The crate covers the mixed membership stochastic blockmodel (MMSB) and its
//! degree-corrected counterpart (DCMM): generators for the population matrix
//! and sampled adjacency, the simplex estimator (`spacl`) built on successive
//! projection, the cone estimator (`svmcone_dcmm`) built on a one-class SVM
//! plus k-means corner hunt, error metrics, and a seeded Monte Carlo harness
//! that measures error-rate slopes and the connectivity threshold.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the harness uses.

pub mod cornerhunt;
pub mod error;
pub mod estimators;
pub mod format;
pub mod matrix;
pub mod metrics;
pub mod netmodels;
pub mod numlin;
pub mod rng;
pub mod scalar;
pub mod scstc;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Row-major dense matrix of `f64`.
pub type Matrix = matrix::DenseMatrix<f64>;
/// Symmetric matrix of `f64`.
pub type SymMatrix = matrix::SymmetricMatrix<f64>;
/// Top-K eigenpairs over `f64`.
pub type EigenDecomp = numlin::EigenDecomposition<f64>;

/// Community mixing matrix over `f64`.
pub type Mixing = netmodels::MixingMatrix<f64>;
/// Membership matrix over `f64`.
pub type MembershipMatrix = netmodels::Membership<f64>;
/// Degree heterogeneity vector over `f64`.
pub type Degrees = netmodels::DegreeVector<f64>;
/// Population matrix over `f64`.
pub type Population = netmodels::PopulationMatrix<f64>;
/// Membership estimate over `f64`.
pub type Estimate = estimators::MembershipEstimate<f64>;
/// Permutation-matched membership error over `f64`.
pub type MembershipError = metrics::ErrorReport<f64>;
/// One-class SVM solution over `f64`.
pub type Svm = cornerhunt::SvmSolution<f64>;
