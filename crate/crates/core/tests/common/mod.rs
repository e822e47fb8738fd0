//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use specmix_core::matrix::{DenseMatrix, SymmetricMatrix};
use specmix_core::rng::stream;

/// `Omega(i,j) = s_i s_j sum_{a,b} pi(i,a) P(a,b) pi(j,b)` by explicit loops.
pub fn omega_by_loops(pi: &DenseMatrix<f64>, p: &SymmetricMatrix<f64>, s: &[f64]) -> Vec<Vec<f64>> {
    let n = pi.nrows();
    let k = pi.ncols();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for a in 0..k {
                for b in 0..k {
                    acc += pi[(i, a)] * p.get(a, b) * pi[(j, b)];
                }
            }
            out[i][j] = s[i] * s[j] * acc;
        }
    }
    out
}

/// `||U_hat U_hat' - U U'||_{2->inf}` with both projectors formed densely.
pub fn projector_oracle(u_hat: &DenseMatrix<f64>, u: &DenseMatrix<f64>) -> f64 {
    let n = u.nrows();
    let k = u.ncols();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            let mut d = 0.0;
            for c in 0..k {
                d += u_hat[(i, c)] * u_hat[(j, c)] - u[(i, c)] * u[(j, c)];
            }
            row += d * d;
        }
        worst = worst.max(row.sqrt());
    }
    worst
}

/// Brute-force `min_P max_i ||est(i,:) - truth(i,P)||_1` by recursion over
/// partial assignments.
pub fn brute_force_matching(est: &DenseMatrix<f64>, truth: &DenseMatrix<f64>) -> f64 {
    fn go(est: &DenseMatrix<f64>, truth: &DenseMatrix<f64>, perm: &mut Vec<usize>, used: &mut [bool]) -> f64 {
        let k = est.ncols();
        if perm.len() == k {
            return (0..est.nrows())
                .map(|i| (0..k).map(|j| (est[(i, j)] - truth[(i, perm[j])]).abs()).sum::<f64>())
                .fold(0.0, f64::max);
        }
        let mut best = f64::INFINITY;
        for c in 0..k {
            if !used[c] {
                used[c] = true;
                perm.push(c);
                best = best.min(go(est, truth, perm, used));
                perm.pop();
                used[c] = false;
            }
        }
        best
    }
    go(est, truth, &mut Vec::new(), &mut vec![false; est.ncols()])
}

/// Symmetric matrix with entries uniform in `[-1, 1]`.
pub fn random_symmetric(n: usize, seed: u64) -> SymmetricMatrix<f64> {
    let mut rng = stream(seed);
    SymmetricMatrix::from_upper(n, |_, _| rng.random_range(-1.0..1.0))
}

/// Orthonormal `n x k` columns by Gram-Schmidt on uniform draws.
pub fn random_orthonormal(n: usize, k: usize, seed: u64) -> DenseMatrix<f64> {
    let mut rng = stream(seed);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < k {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for c in &cols {
                let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= d * b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-3 {
            cols.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    DenseMatrix::from_fn(n, k, |i, j| cols[j][i])
}

/// Rows of `a` matched one-to-one with rows of `b` within `tol`.
pub fn same_rows_up_to_permutation(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>, tol: f64) -> bool {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return false;
    }
    let mut used = vec![false; b.nrows()];
    'outer: for ra in a.rows_iter() {
        for (j, rb) in b.rows_iter().enumerate() {
            if !used[j] && ra.iter().zip(rb).all(|(x, y)| (x - y).abs() <= tol) {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}
