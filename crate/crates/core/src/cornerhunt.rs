//! Vertex hunting on rows of eigenvector matrices.
//!
//! Successive projection finds the vertices of a simplex; the cone variant
//! fits the hard-margin one-class SVM (the minimum-norm point of the convex
//! hull of the rows) and clusters the rows closest to its hyperplane.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{derive_seed, stream};
use crate::scalar::{axpy, dot, Scalar};

/// Row indices of the selected corners, in selection order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerSet {
    indices: Vec<usize>,
}

impl CornerSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != indices.len() {
            return Err(Error::invalid(format!("corner indices {indices:?} are not distinct")));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

const SP_VANISH: f64 = 1e-12;

/// Successive projection: pick the row with the largest residual norm,
/// project every row onto the orthogonal complement of it, repeat `r` times.
/// Ties go to the lowest index.
pub fn successive_projection<T: Scalar>(y: &DenseMatrix<T>, r: usize) -> Result<CornerSet> {
    if r == 0 || r > y.nrows().min(y.ncols()) {
        return Err(Error::invalid(format!(
            "cannot extract {r} corners from a {}x{} matrix",
            y.nrows(),
            y.ncols()
        )));
    }
    let mut residual = y.clone();
    let mut norms: Vec<T> = residual.rows_iter().map(|row| dot(row, row)).collect();
    let scale = norms.iter().copied().fold(T::zero(), T::max).sqrt();
    let vanish = T::tol(SP_VANISH) * scale;
    let mut picked = Vec::with_capacity(r);

    for step in 0..r {
        let (best, best_sq) = argmax_first(&norms);
        if !(best_sq.sqrt() > vanish) {
            return Err(Error::RankDeficient {
                picked: step,
                requested: r,
            });
        }
        picked.push(best);
        let u = residual.row(best).to_vec();
        let uu = best_sq;
        for i in 0..residual.nrows() {
            let row = residual.row_mut(i);
            let c = dot(row, &u) / uu;
            axpy(-c, &u, row);
            norms[i] = dot(row, row);
        }
    }
    CornerSet::new(picked)
}

fn argmax_first<T: Scalar>(v: &[T]) -> (usize, T) {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    (best, v[best])
}

/// Supporting hyperplane `{x : w.x = b}` of the rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmSolution<T> {
    pub w: Vec<T>,
    pub b: T,
    pub iterations: usize,
    /// Final pairwise (away-step) gap `max_{support} x.v - min_i x.v`.
    pub gap: T,
}

const FW_MAX_ITER: usize = 50_000;
const FW_GAP: f64 = 1e-9;
const ORIGIN_NORM: f64 = 1e-10;

/// Hard-margin one-class SVM through its dual: the minimum-norm point `v` of
/// the convex hull of the rows, found by Frank-Wolfe with away steps and
/// exact line search. Returns `w = v / ||v||` and `b = min_i w.x_i`.
pub fn min_norm_point<T: Scalar>(x: &DenseMatrix<T>) -> Result<SvmSolution<T>> {
    let q = x.nrows();
    let m = x.ncols();
    if q == 0 || m == 0 {
        return Err(Error::invalid("min-norm point needs at least one row and one column"));
    }
    let start = (0..q)
        .min_by(|&a, &b| {
            dot(x.row(a), x.row(a))
                .partial_cmp(&dot(x.row(b), x.row(b)))
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        })
        .expect("q >= 1");
    let mut weights = vec![T::zero(); q];
    weights[start] = T::one();
    let mut v = x.row(start).to_vec();
    let mut g = vec![T::zero(); q];
    let gap_tol = T::tol(FW_GAP);
    let origin = T::lit(ORIGIN_NORM);
    let mut gap = T::infinity();
    let mut iterations = 0;

    while iterations < FW_MAX_ITER {
        if iterations % 256 == 255 {
            // resync v with the weights to stop drift
            v.iter_mut().for_each(|c| *c = T::zero());
            for (i, &wt) in weights.iter().enumerate() {
                if wt > T::zero() {
                    axpy(wt, x.row(i), &mut v);
                }
            }
        }
        let vv = dot(&v, &v);
        if vv.sqrt() < origin {
            return Err(Error::DegenerateCone {
                norm: vv.sqrt().to_f64_lossy(),
            });
        }
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = dot(x.row(i), &v);
        }
        let s = (0..q)
            .min_by(|&a, &b| g[a].partial_cmp(&g[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)))
            .expect("q >= 1");
        let a = (0..q)
            .filter(|&i| weights[i] > T::zero())
            .max_by(|&a, &b| g[a].partial_cmp(&g[b]).unwrap_or(Ordering::Equal).then(b.cmp(&a)))
            .expect("support is non-empty");
        gap = g[a] - g[s];
        if gap <= gap_tol {
            break;
        }
        iterations += 1;

        let fw_gap = vv - g[s];
        let away_gap = g[a] - vv;
        if fw_gap >= away_gap {
            // toward x_s
            let d: Vec<T> = x.row(s).iter().zip(&v).map(|(&xs, &vi)| xs - vi).collect();
            let dd = dot(&d, &d);
            if dd == T::zero() {
                break;
            }
            let step = (-dot(&v, &d) / dd).max(T::zero()).min(T::one());
            axpy(step, &d, &mut v);
            weights.iter_mut().for_each(|w| *w *= T::one() - step);
            weights[s] += step;
        } else {
            // away from x_a
            let la = weights[a];
            let max_step = if la < T::one() { la / (T::one() - la) } else { T::infinity() };
            let d: Vec<T> = v.iter().zip(x.row(a)).map(|(&vi, &xa)| vi - xa).collect();
            let dd = dot(&d, &d);
            if dd == T::zero() {
                break;
            }
            let step = (-dot(&v, &d) / dd).max(T::zero()).min(max_step);
            axpy(step, &d, &mut v);
            weights.iter_mut().for_each(|w| *w *= T::one() + step);
            weights[a] -= step;
            if step >= max_step || weights[a] < T::zero() {
                weights[a] = T::zero();
            }
        }
    }

    let norm = dot(&v, &v).sqrt();
    if norm < origin {
        return Err(Error::DegenerateCone {
            norm: norm.to_f64_lossy(),
        });
    }
    let w: Vec<T> = v.iter().map(|&c| c / norm).collect();
    let b = x.rows_iter().map(|r| dot(r, &w)).fold(T::infinity(), T::min);
    Ok(SvmSolution { w, b, iterations, gap })
}

/// Result of [`kmeans`].
#[derive(Clone, Debug, PartialEq)]
pub struct KMeans<T> {
    pub assignments: Vec<usize>,
    pub centers: DenseMatrix<T>,
    /// Within-cluster sum of squares of the kept restart.
    pub inertia: T,
    /// Objective after each Lloyd iteration of the kept restart.
    pub history: Vec<T>,
}

pub const KMEANS_RESTARTS: usize = 10;
const LLOYD_MAX_ITER: usize = 300;

/// Lloyd's algorithm from k-means++ seeding; the best of 10 restarts by
/// within-cluster sum of squares is kept (strict improvement, so the earliest
/// restart wins ties). A restart that empties a cluster is discarded.
pub fn kmeans<T: Scalar>(x: &DenseMatrix<T>, k: usize, seed: u64) -> Result<KMeans<T>> {
    let q = x.nrows();
    if k == 0 || q < k {
        return Err(Error::invalid(format!("cannot form {k} clusters from {q} points")));
    }
    let mut best: Option<KMeans<T>> = None;
    for restart in 0..KMEANS_RESTARTS {
        let Some(run) = lloyd_run(x, k, derive_seed(seed, &[restart as u64])) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    best.ok_or_else(|| Error::ClusteringFailure(format!("every restart left one of {k} clusters empty")))
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn lloyd_run<T: Scalar>(x: &DenseMatrix<T>, k: usize, seed: u64) -> Option<KMeans<T>> {
    let q = x.nrows();
    let m = x.ncols();
    let mut rng = stream(seed);

    // k-means++ seeding
    let mut centers = DenseMatrix::<T>::zeros(k, m);
    let first = rng.random_range(0..q);
    centers.row_mut(0).copy_from_slice(x.row(first));
    let mut d2: Vec<f64> = (0..q).map(|i| sq_dist(x.row(i), centers.row(0)).to_f64_lossy()).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        if !(total > 0.0) {
            return None;
        }
        let mut target = rng.random::<f64>() * total;
        let mut pick = q - 1;
        for (i, &d) in d2.iter().enumerate() {
            if d > 0.0 && target < d {
                pick = i;
                break;
            }
            target -= d;
        }
        centers.row_mut(c).copy_from_slice(x.row(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(x.row(i), centers.row(c)).to_f64_lossy());
        }
    }

    let mut assignments = vec![usize::MAX; q];
    let mut history = Vec::new();
    for _ in 0..LLOYD_MAX_ITER {
        let mut changed = false;
        let mut inertia = T::zero();
        for i in 0..q {
            let (mut bc, mut bd) = (0, T::infinity());
            for c in 0..k {
                let d = sq_dist(x.row(i), centers.row(c));
                if d < bd {
                    bc = c;
                    bd = d;
                }
            }
            inertia += bd;
            if assignments[i] != bc {
                assignments[i] = bc;
                changed = true;
            }
        }
        history.push(inertia);
        let mut counts = vec![0usize; k];
        let mut sums = DenseMatrix::<T>::zeros(k, m);
        for (i, &c) in assignments.iter().enumerate() {
            counts[c] += 1;
            axpy(T::one(), x.row(i), sums.row_mut(c));
        }
        if counts.contains(&0) {
            return None;
        }
        for c in 0..k {
            let inv = T::one() / T::lit(counts[c] as f64);
            for (dst, &s) in centers.row_mut(c).iter_mut().zip(sums.row(c)) {
                *dst = s * inv;
            }
        }
        if !changed {
            break;
        }
    }
    let inertia = (0..q).map(|i| sq_dist(x.row(i), centers.row(assignments[i]))).sum();
    history.push(inertia);
    Some(KMeans {
        assignments,
        centers,
        inertia,
        history,
    })
}

/// Rows closer than this (Euclidean) count as the same point when deciding
/// whether a candidate set can hold `K` distinct clusters.
const DISTINCT_POINT_TOL: f64 = 1e-9;
/// Margin values closer than this are swept together.
const MARGIN_GROUP_TOL: f64 = 1e-12;

fn has_k_distinct<T: Scalar>(x: &DenseMatrix<T>, rows: &[usize], k: usize) -> bool {
    let tol = T::tol(DISTINCT_POINT_TOL);
    let tol2 = tol * tol;
    let mut reps: Vec<usize> = Vec::with_capacity(k);
    for &i in rows {
        if reps.iter().all(|&r| sq_dist(x.row(i), x.row(r)) > tol2) {
            reps.push(i);
            if reps.len() >= k {
                return true;
            }
        }
    }
    false
}

/// Cone corner hunt on unit rows.
///
/// Fits the supporting hyperplane with [`min_norm_point`], then sweeps the
/// margin threshold `gamma` over the sorted distinct values of `S(i,:)w - b`.
/// The first candidate set `{i : S(i,:)w <= b + gamma}` that holds `K`
/// distinct points and splits into `K` nonempty k-means clusters wins; each
/// cluster contributes its row of smallest margin (lowest index on ties).
pub fn svm_cone<T: Scalar>(s: &DenseMatrix<T>, k: usize, seed: u64) -> Result<CornerSet> {
    let n = s.nrows();
    if k == 0 || n < k {
        return Err(Error::invalid(format!("cannot find {k} corners among {n} rows")));
    }
    let svm = min_norm_point(s)?;
    let margins: Vec<T> = s.rows_iter().map(|r| dot(r, &svm.w)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| margins[a].partial_cmp(&margins[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));

    let group_tol = T::tol(MARGIN_GROUP_TOL);
    let mut end = 0;
    while end < n {
        // extend to the end of the current margin group
        let level = margins[order[end]];
        while end < n && margins[order[end]] - level <= group_tol {
            end += 1;
        }
        let mut candidates: Vec<usize> = order[..end].to_vec();
        candidates.sort_unstable();
        if !has_k_distinct(s, &candidates, k) {
            continue;
        }
        let sub = s.select_rows(&candidates);
        let Ok(km) = kmeans(&sub, k, seed) else {
            continue;
        };
        let mut reps = vec![usize::MAX; k];
        for (pos, &c) in km.assignments.iter().enumerate() {
            let i = candidates[pos];
            let r = reps[c];
            if r == usize::MAX || margins[i] < margins[r] || (margins[i] == margins[r] && i < r) {
                reps[c] = i;
            }
        }
        return CornerSet::new(reps);
    }
    Err(Error::CornerFailure { k })
}
