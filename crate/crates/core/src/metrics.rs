//! Evaluation: permutation-matched membership error, row-wise eigenspace
//! error, spectral deviation against the Bernstein bound, connectivity, and
//! per-instance bound ingredients.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SymmetricMatrix};
use crate::netmodels::{Adjacency, MixingMatrix, Membership, ModelKind, PopulationMatrix, Scale};
use crate::numlin::{jacobi_eigen, spectral_norm};
use crate::scalar::{dot, Scalar};

/// Largest `K` for which the permutation search is exhaustive.
pub const EXHAUSTIVE_MAX_K: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport<T> {
    /// `min_P max_i ||est(i,:) - (truth P)(i,:)||_1`.
    pub max_l1_error: T,
    /// Mean of the per-node errors under the same permutation.
    pub mean_l1_error: T,
    /// Estimated column `j` is matched with truth column `permutation[j]`.
    pub permutation: Vec<usize>,
    pub per_node: Vec<T>,
    /// False when the greedy matching was used (`K > 8`).
    pub exact: bool,
}

fn check_shapes<T: Scalar>(est: &DenseMatrix<T>, truth: &DenseMatrix<T>) -> Result<()> {
    if est.nrows() != truth.nrows() || est.ncols() != truth.ncols() {
        return Err(Error::invalid(format!(
            "estimate is {}x{}, truth is {}x{}",
            est.nrows(),
            est.ncols(),
            truth.nrows(),
            truth.ncols()
        )));
    }
    if est.ncols() == 0 {
        return Err(Error::invalid("membership matrices need at least one column"));
    }
    Ok(())
}

fn row_errors<T: Scalar>(est: &DenseMatrix<T>, truth: &DenseMatrix<T>, perm: &[usize]) -> Vec<T> {
    est.rows_iter()
        .zip(truth.rows_iter())
        .map(|(e, t)| e.iter().zip(perm).map(|(&ev, &p)| (ev - t[p]).abs()).sum())
        .collect()
}

fn report<T: Scalar>(est: &DenseMatrix<T>, truth: &DenseMatrix<T>, perm: Vec<usize>, exact: bool) -> ErrorReport<T> {
    let per_node = row_errors(est, truth, &perm);
    let max = per_node.iter().copied().fold(T::zero(), T::max);
    let mean = per_node.iter().copied().sum::<T>() / T::lit(per_node.len().max(1) as f64);
    ErrorReport {
        max_l1_error: max,
        mean_l1_error: mean,
        permutation: perm,
        per_node,
        exact,
    }
}

/// Membership error minimized over column permutations: exhaustive for
/// `K <= 8`, greedy matching beyond (flagged `exact = false`).
pub fn membership_error<T: Scalar>(est: &DenseMatrix<T>, truth: &DenseMatrix<T>) -> Result<ErrorReport<T>> {
    check_shapes(est, truth)?;
    if est.ncols() <= EXHAUSTIVE_MAX_K {
        exhaustive_matching_error(est, truth)
    } else {
        greedy_matching_error(est, truth)
    }
}

/// Exact minimization over all `K!` permutations in lexicographic order;
/// the first minimizer wins.
pub fn exhaustive_matching_error<T: Scalar>(est: &DenseMatrix<T>, truth: &DenseMatrix<T>) -> Result<ErrorReport<T>> {
    check_shapes(est, truth)?;
    let k = est.ncols();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best_perm = perm.clone();
    let mut best = T::infinity();
    loop {
        // max row error with early exit once it cannot beat the incumbent
        let mut worst = T::zero();
        for (e, t) in est.rows_iter().zip(truth.rows_iter()) {
            let d: T = e.iter().zip(&perm).map(|(&ev, &p)| (ev - t[p]).abs()).sum();
            if d > worst {
                worst = d;
                if worst >= best {
                    break;
                }
            }
        }
        if worst < best {
            best = worst;
            best_perm.copy_from_slice(&perm);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(report(est, truth, best_perm, true))
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Greedy column matching: pairs `(est column, truth column)` sorted by the
/// sum of absolute differences, taken smallest-first when both are free.
pub fn greedy_matching_error<T: Scalar>(est: &DenseMatrix<T>, truth: &DenseMatrix<T>) -> Result<ErrorReport<T>> {
    check_shapes(est, truth)?;
    let k = est.ncols();
    let mut pairs = Vec::with_capacity(k * k);
    for j in 0..k {
        for c in 0..k {
            let cost: T = est
                .rows_iter()
                .zip(truth.rows_iter())
                .map(|(e, t)| (e[j] - t[c]).abs())
                .sum();
            pairs.push((cost, j, c));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut perm = vec![usize::MAX; k];
    let mut used = vec![false; k];
    for (_, j, c) in pairs {
        if perm[j] == usize::MAX && !used[c] {
            perm[j] = c;
            used[c] = true;
        }
    }
    Ok(report(est, truth, perm, false))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenspaceReport {
    /// `||U_hat U_hat' - U U'||_{2->inf}`.
    pub value: f64,
    pub n: usize,
}

const ORTHONORMAL_TOL: f64 = 1e-8;
const EIGENSPACE_BLOCK: usize = 256;

/// Row-wise eigenspace error. Row `i` of the projector difference is formed
/// block by block as `U_hat(i,:) U_hat(J,:)' - U(i,:) U(J,:)'`.
pub fn eigenspace_error<T: Scalar>(u_hat: &DenseMatrix<T>, u: &DenseMatrix<T>) -> Result<EigenspaceReport> {
    if u_hat.nrows() != u.nrows() || u_hat.ncols() != u.ncols() {
        return Err(Error::invalid("eigenvector matrices differ in shape"));
    }
    for (name, m) in [("U_hat", u_hat), ("U", u)] {
        let g = m.tr_matmul(m)?;
        let k = g.nrows();
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { T::one() } else { T::zero() };
                if (g[(i, j)] - target).abs() > T::tol(ORTHONORMAL_TOL) {
                    return Err(Error::invalid(format!("{name} does not have orthonormal columns")));
                }
            }
        }
    }
    let n = u.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        let (a, b) = (u_hat.row(i), u.row(i));
        let mut acc = T::zero();
        for start in (0..n).step_by(EIGENSPACE_BLOCK) {
            for j in start..(start + EIGENSPACE_BLOCK).min(n) {
                let d = dot(a, u_hat.row(j)) - dot(b, u.row(j));
                acc += d * d;
            }
        }
        worst = worst.max(acc.sqrt());
    }
    Ok(EigenspaceReport {
        value: worst.to_f64_lossy(),
        n,
    })
}

/// `(alpha + 1 + sqrt((alpha + 1)(alpha + 19))) / 3`.
pub fn bernstein_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha = {alpha} must be positive")));
    }
    Ok((alpha + 1.0 + ((alpha + 1.0) * (alpha + 19.0)).sqrt()) / 3.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationReport {
    /// `||A - Omega||`.
    pub spectral_dev: f64,
    pub bound: f64,
    /// `spectral_dev / bound`, zero when the deviation is zero.
    pub ratio: f64,
}

/// Spectral deviation of a sampled graph from its population matrix, with the
/// model-appropriate bound `C_alpha sqrt(rho n log n)` (MMSB) or
/// `C_alpha sqrt(P_max theta_max ||theta||_1 log n)` (DCMM).
pub fn spectral_deviation<T: Scalar>(a: &Adjacency, pop: &PopulationMatrix<T>, alpha: f64) -> Result<DeviationReport> {
    if a.n() != pop.n() {
        return Err(Error::invalid(format!("adjacency has {} nodes, population {}", a.n(), pop.n())));
    }
    let c = bernstein_constant(alpha)?;
    let diff: SymmetricMatrix<T> = a.to_matrix::<T>().sub(pop.omega())?;
    let dev = spectral_norm(&diff).to_f64_lossy();
    let n = a.n() as f64;
    let radicand = match (pop.model(), pop.scale()) {
        (ModelKind::Mmsb, Scale::Sparsity(rho)) => rho.to_f64_lossy() * n,
        (_, Scale::Degrees(theta)) => {
            pop.mixing().max_entry().to_f64_lossy() * theta.max().to_f64_lossy() * theta.l1().to_f64_lossy()
        }
        (ModelKind::Dcmm, Scale::Sparsity(rho)) => rho.to_f64_lossy() * n,
    };
    let bound = c * (radicand * n.ln()).sqrt();
    let ratio = if dev == 0.0 { 0.0 } else { dev / bound };
    Ok(DeviationReport {
        spectral_dev: dev,
        bound,
        ratio,
    })
}

/// True iff the graph has a single connected component.
pub fn is_connected(a: &Adjacency) -> bool {
    let n = a.n();
    if n <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut components = n;
    for (i, j) in a.edges() {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
            components -= 1;
            if components == 1 {
                return true;
            }
        }
    }
    components == 1
}

/// Bound ingredients for one generated instance.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct InstanceDiagnostics {
    pub sigma_k_p: f64,
    pub lambda_k_gram: f64,
    pub lambda_1_gram: f64,
    pub kappa_gram: f64,
    pub pi_min: f64,
    pub sigma_k_omega: f64,
    pub theta_max: Option<f64>,
    pub theta_min: Option<f64>,
    pub theta_l1: Option<f64>,
}

/// Computes the diagnostic scalars of `(Pi, P, scale)`. Spectral quantities of
/// `Omega` come from its `K x K` factorization, never from an `n x n` solve.
pub fn instance_diagnostics<T: Scalar>(
    membership: &Membership<T>,
    mixing: &MixingMatrix<T>,
    scale: &Scale<T>,
) -> Result<InstanceDiagnostics> {
    let gram = SymmetricMatrix::new(symmetric_part(membership.gram()))?;
    let ge = jacobi_eigen(&gram)?;
    let lambda_1 = ge.values.iter().fold(T::zero(), |m, &v| m.max(v)).to_f64_lossy();
    let lambda_k = ge.values.iter().fold(T::infinity(), |m, &v| m.min(v)).to_f64_lossy();
    let pop = match scale {
        Scale::Sparsity(rho) => {
            // any mixing flavor: build the factorization directly
            population_for_diagnostics(membership, mixing, Scale::Sparsity(*rho))
        }
        Scale::Degrees(theta) => population_for_diagnostics(membership, mixing, Scale::Degrees(theta.clone())),
    }?;
    let sigma_k_omega = pop.sigma_k()?.to_f64_lossy();
    let (theta_max, theta_min, theta_l1) = match scale {
        Scale::Degrees(t) => (
            Some(t.max().to_f64_lossy()),
            Some(t.min().to_f64_lossy()),
            Some(t.l1().to_f64_lossy()),
        ),
        Scale::Sparsity(_) => (None, None, None),
    };
    Ok(InstanceDiagnostics {
        sigma_k_p: mixing.sigma_k().to_f64_lossy(),
        lambda_k_gram: lambda_k,
        lambda_1_gram: lambda_1,
        kappa_gram: lambda_1 / lambda_k,
        pi_min: membership.pi_min().to_f64_lossy(),
        sigma_k_omega,
        theta_max,
        theta_min,
        theta_l1,
    })
}

fn population_for_diagnostics<T: Scalar>(
    membership: &Membership<T>,
    mixing: &MixingMatrix<T>,
    scale: Scale<T>,
) -> Result<PopulationMatrix<T>> {
    use crate::netmodels::{omega_dcmm, omega_mmsb};
    match scale {
        Scale::Sparsity(rho) if mixing.is_mmsb_flavor() => omega_mmsb(rho, mixing, membership),
        Scale::Sparsity(rho) => {
            let theta = crate::netmodels::DegreeVector::constant(membership.n(), rho.sqrt())?;
            omega_dcmm(&theta, mixing, membership)
        }
        Scale::Degrees(theta) => omega_dcmm(&theta, mixing, membership),
    }
}

fn symmetric_part<T: Scalar>(m: DenseMatrix<T>) -> DenseMatrix<T> {
    let half = T::lit(0.5);
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| half * (m[(i, j)] + m[(j, i)]))
}
