//! Acceptance run. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.
//!
//! Each criterion renders its per-instance outcomes as CSV text; the last
//! criterion reruns the others on a different number of threads and compares
//! that text byte for byte.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use specmix_core::cornerhunt::{successive_projection, svm_cone};
use specmix_core::estimators::{ideal_spacl, ideal_svmcone_dcmm, spacl, svmcone_dcmm};
use specmix_core::format::fmt12;
use specmix_core::matrix::DenseMatrix;
use specmix_core::metrics::{
    bernstein_constant, eigenspace_error, exhaustive_matching_error, greedy_matching_error, membership_error,
    spectral_deviation,
};
use specmix_core::netmodels::{
    build_ptilde_standard, omega_dcmm, omega_mmsb, sample_adjacency, sample_degrees, sample_membership,
    DegreeVector, ModelKind,
};
use specmix_core::numlin::{jacobi_eigen, sym_eigen_topk};
use specmix_core::rng::{derive_seed, stream, streams};
use specmix_core::scstc::{
    sweep_separation, sweep_sparsity, threshold_scan, write_results, write_threshold, EstimatorKind, SweepConfig,
    SweptParam,
};

const MASTER: u64 = 20_211_027;

struct Outcome {
    passed: bool,
    summary: String,
    csv: String,
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

fn seed_for(criterion: u64, instance: usize) -> u64 {
    derive_seed(MASTER, &[criterion, instance as u64])
}

fn csv_lines(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn ideal_grid(i: usize) -> (usize, f64) {
    ([2, 3][i % 2], [0.2, 0.5][(i / 2) % 2])
}

fn c1_ideal_mmsb(threads: usize) -> Outcome {
    let errs: Vec<(usize, f64, f64)> = pool(threads).install(|| {
        (0..50)
            .into_par_iter()
            .map(|i| {
                let (k, rho) = ideal_grid(i);
                let s = seed_for(1, i);
                let pi = sample_membership::<f64>(200, k, 0.5, 1.0, derive_seed(s, &[streams::MEMBERSHIP])).unwrap();
                let p = build_ptilde_standard(k, 0.8).unwrap();
                let pop = omega_mmsb(rho, &p, &pi).unwrap();
                let est = ideal_spacl(&pop, k).unwrap();
                (k, rho, membership_error(&est.rows, pi.rows()).unwrap().max_l1_error)
            })
            .collect()
    });
    let worst = errs.iter().map(|e| e.2).fold(0.0, f64::max);
    Outcome {
        passed: worst <= 1e-8,
        summary: format!("ideal simplex estimator, 50 instances, worst error {worst:.3e} (limit 1e-8)"),
        csv: csv_lines("k,rho,error", errs.iter().map(|(k, r, e)| format!("{k},{},{}", fmt12(*r), fmt12(*e)))),
    }
}

fn c2_ideal_dcmm(threads: usize) -> Outcome {
    let errs: Vec<(usize, f64, f64)> = pool(threads).install(|| {
        (0..50)
            .into_par_iter()
            .map(|i| {
                let (k, rho) = ideal_grid(i);
                let s = seed_for(2, i);
                let pi = sample_membership::<f64>(200, k, 0.5, 1.0, derive_seed(s, &[streams::MEMBERSHIP])).unwrap();
                let theta = sample_degrees::<f64>(200, rho, 0.5, derive_seed(s, &[streams::DEGREES])).unwrap();
                let p = build_ptilde_standard(k, 0.8).unwrap();
                let pop = omega_dcmm(&theta, &p, &pi).unwrap();
                let est = ideal_svmcone_dcmm(&pop, k, derive_seed(s, &[streams::CLUSTERING])).unwrap();
                (k, rho, membership_error(&est.rows, pi.rows()).unwrap().max_l1_error)
            })
            .collect()
    });
    let worst = errs.iter().map(|e| e.2).fold(0.0, f64::max);
    Outcome {
        passed: worst <= 1e-6,
        summary: format!("ideal cone estimator, 50 instances, worst error {worst:.3e} (limit 1e-6)"),
        csv: csv_lines("k,rho,error", errs.iter().map(|(k, r, e)| format!("{k},{},{}", fmt12(*r), fmt12(*e)))),
    }
}

fn deviation_ratios(criterion: u64, dcmm: bool, threads: usize) -> Vec<f64> {
    let (n, k, rho) = (500, 2, 0.1);
    pool(threads).install(|| {
        (0..200)
            .into_par_iter()
            .map(|i| {
                let s = seed_for(criterion, i);
                let pi = sample_membership::<f64>(n, k, 0.5, 1.0, derive_seed(s, &[streams::MEMBERSHIP])).unwrap();
                let p = build_ptilde_standard(k, 0.8).unwrap();
                let pop = if dcmm {
                    let theta = sample_degrees::<f64>(n, rho, 0.5, derive_seed(s, &[streams::DEGREES])).unwrap();
                    omega_dcmm(&theta, &p, &pi).unwrap()
                } else {
                    omega_mmsb(rho, &p, &pi).unwrap()
                };
                let a = sample_adjacency(pop.omega(), derive_seed(s, &[streams::ADJACENCY]));
                spectral_deviation(&a, &pop, 1.0).unwrap().ratio
            })
            .collect()
    })
}

fn deviation_outcome(ratios: Vec<f64>) -> Outcome {
    let below = ratios.iter().filter(|&&r| r < 1.0).count();
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let c1 = bernstein_constant(1.0).unwrap();
    Outcome {
        passed: below >= 199 && (c1 - (2.0 + 40f64.sqrt()) / 3.0).abs() < 1e-15,
        summary: format!("{below}/200 ratios below 1 (need 199), largest {worst:.4}, C_1 = {c1:.6}"),
        csv: csv_lines("ratio", ratios.iter().map(|&r| fmt12(r))),
    }
}

fn c3_mmsb_deviation(threads: usize) -> Outcome {
    deviation_outcome(deviation_ratios(3, false, threads))
}

fn c4_dcmm_deviation(threads: usize) -> Outcome {
    deviation_outcome(deviation_ratios(4, true, threads))
}

fn sweep_csv(records: &[specmix_core::scstc::TrialRecord]) -> String {
    let mut buf = Vec::new();
    write_results(records, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn c5_sparsity_slope(threads: usize) -> Outcome {
    let mut cfg = SweepConfig::new(
        ModelKind::Mmsb,
        EstimatorKind::Spacl,
        1000,
        2,
        SweptParam::Rho,
        vec![0.05, 0.1, 0.2, 0.4],
        30,
        derive_seed(MASTER, &[5]),
    );
    cfg.omega = Some(0.9);
    let r = sweep_sparsity(&cfg, threads).unwrap();
    let fit = r.fit.clone().unwrap();
    let means: Vec<String> = r.summary.iter().map(|s| format!("{:.4}", s.mean_l1_error)).collect();
    Outcome {
        passed: (-0.65..=-0.35).contains(&fit.slope) && fit.r_squared >= 0.9,
        summary: format!(
            "slope {:.4} in [-0.65, -0.35], r2 {:.4} (need 0.9); mean errors {}",
            fit.slope,
            fit.r_squared,
            means.join(" ")
        ),
        csv: sweep_csv(&r.records),
    }
}

fn c6_separation_slope(threads: usize) -> Outcome {
    let mut cfg = SweepConfig::new(
        ModelKind::Mmsb,
        EstimatorKind::Spacl,
        1000,
        2,
        SweptParam::Omega,
        vec![0.3, 0.45, 0.675, 0.9],
        30,
        derive_seed(MASTER, &[6]),
    );
    cfg.rho = Some(0.3);
    let r = sweep_separation(&cfg, threads).unwrap();
    let fit = r.fit.clone().unwrap();
    let means: Vec<String> = r.summary.iter().map(|s| format!("{:.4}", s.mean_l1_error)).collect();
    Outcome {
        passed: (-1.25..=-0.75).contains(&fit.slope),
        summary: format!("slope {:.4} in [-1.25, -0.75]; mean errors {}", fit.slope, means.join(" ")),
        csv: sweep_csv(&r.records),
    }
}

fn c7_threshold(threads: usize) -> Outcome {
    let grid = [0.5, 0.75, 1.0, 1.5, 2.0];
    let scan = threshold_scan(1000, &grid, 100, derive_seed(MASTER, &[7]), threads).unwrap();
    let monotone_seeds = (0..100).all(|t| (1..grid.len()).all(|i| !scan.flags[i - 1][t] || scan.flags[i][t]));
    let monotone_freq = scan.points.windows(2).all(|w| w[0].frequency <= w[1].frequency);
    let lo = scan.points[0].frequency;
    let hi = scan.points[grid.len() - 1].frequency;
    let mut buf = Vec::new();
    write_threshold(&scan, &mut buf).unwrap();
    Outcome {
        passed: lo <= 0.20 && hi >= 0.95 && monotone_seeds && monotone_freq,
        summary: format!("frequency {lo} at c=0.5, {hi} at c=2, monotone per seed: {monotone_seeds}"),
        csv: String::from_utf8(buf).unwrap(),
    }
}

fn c8_degeneracy(threads: usize) -> Outcome {
    let diffs: Vec<f64> = pool(threads).install(|| {
        (0..20)
            .into_par_iter()
            .map(|i| {
                let s = seed_for(8, i);
                let mut rng = stream(s);
                let k = rng.random_range(2..=3);
                let rho: f64 = rng.random_range(0.1..0.6);
                let omega: f64 = rng.random_range(0.2..1.0);
                let pi = sample_membership::<f64>(400, k, 0.5, 1.0, derive_seed(s, &[streams::MEMBERSHIP])).unwrap();
                let p = build_ptilde_standard(k, omega).unwrap();
                let m = omega_mmsb(rho, &p, &pi).unwrap();
                let theta = DegreeVector::constant(400, rho.sqrt()).unwrap();
                let d = omega_dcmm(&theta, &p, &pi).unwrap();
                m.omega().as_dense().max_abs_diff(d.omega().as_dense())
            })
            .collect()
    });
    let worst_entry = diffs.iter().copied().fold(0.0, f64::max);

    let (n, k, rho) = (400, 2, 0.3f64);
    // per seed: (max-l1, mean-l1) for the simplex estimator on the MMSB graph,
    // then the same for the cone estimator on the DCMM graph
    let pairs: Vec<[f64; 4]> = pool(threads).install(|| {
        (0..20)
            .into_par_iter()
            .map(|i| {
                let s = seed_for(80, i);
                let pi = sample_membership::<f64>(n, k, 0.5, 1.0, derive_seed(s, &[streams::MEMBERSHIP])).unwrap();
                let p = build_ptilde_standard(k, 0.8).unwrap();
                let theta = DegreeVector::constant(n, rho.sqrt()).unwrap();
                let a_mmsb = sample_adjacency(omega_mmsb(rho, &p, &pi).unwrap().omega(), derive_seed(s, &[streams::ADJACENCY]));
                let a_dcmm = sample_adjacency(omega_dcmm(&theta, &p, &pi).unwrap().omega(), derive_seed(s, &[streams::ADJACENCY]));
                let e1 = spacl::<f64>(&a_mmsb, k).unwrap();
                let e2 = svmcone_dcmm::<f64>(&a_dcmm, k, derive_seed(s, &[streams::CLUSTERING])).unwrap();
                let r1 = membership_error(&e1.rows, pi.rows()).unwrap();
                let r2 = membership_error(&e2.rows, pi.rows()).unwrap();
                [r1.max_l1_error, r1.mean_l1_error, r2.max_l1_error, r2.mean_l1_error]
            })
            .collect()
    });
    let avg = |c: usize| pairs.iter().map(|p| p[c]).sum::<f64>() / pairs.len() as f64;
    let (m1, m2) = (avg(0), avg(2));
    let gap = (m1 - m2).abs();
    let mean_gap = (avg(1) - avg(3)).abs();
    let mut csv = csv_lines("max_entry_diff", diffs.iter().map(|&d| fmt12(d)));
    csv.push_str(&csv_lines(
        "spacl_max,spacl_mean,svmcone_max,svmcone_mean",
        pairs.iter().map(|p| p.iter().map(|&v| fmt12(v)).collect::<Vec<_>>().join(",")),
    ));
    Outcome {
        passed: worst_entry <= 1e-15 && gap < 0.05,
        summary: format!(
            "max |Omega_dcmm - Omega_mmsb| {worst_entry:.2e}; membership error {m1:.4} (simplex, MMSB) vs {m2:.4} (cone, DCMM), gap {gap:.4} (< 0.05); mean-l1 gap {mean_gap:.4}"
        ),
        csv,
    }
}

fn noisy_permuted(truth: &DenseMatrix<f64>, seed: u64) -> DenseMatrix<f64> {
    let mut rng = stream(seed);
    let k = truth.ncols();
    let mut perm: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut est = truth.select_columns(&perm);
    for i in 0..est.nrows() {
        let row = est.row_mut(i);
        row.iter_mut().for_each(|v| *v += rng.random_range(0.0..0.1));
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
    }
    est
}

fn c9_oracles(threads: usize) -> Outcome {
    let matching: Vec<(bool, f64)> = pool(threads).install(|| {
        (0..1000)
            .into_par_iter()
            .map(|i| {
                let s = seed_for(9, i);
                let k = 2 + i % 3;
                let truth = sample_membership::<f64>(30, k, 0.5, 1.0, s).unwrap();
                let est = noisy_permuted(truth.rows(), derive_seed(s, &[1]));
                let g = greedy_matching_error(&est, truth.rows()).unwrap();
                let e = exhaustive_matching_error(&est, truth.rows()).unwrap();
                let brute = common::brute_force_matching(&est, truth.rows());
                let same = g.permutation == e.permutation && g.max_l1_error == e.max_l1_error && e.max_l1_error == brute;
                (same, e.max_l1_error)
            })
            .collect()
    });
    let matching_ok = matching.iter().filter(|m| m.0).count();

    let eig: Vec<f64> = pool(threads).install(|| {
        (0..100)
            .into_par_iter()
            .map(|i| {
                let s = seed_for(90, i);
                let n = 5 + i % 36;
                let k = 1 + i % 4;
                let uh = common::random_orthonormal(n, k, derive_seed(s, &[0]));
                let u = common::random_orthonormal(n, k, derive_seed(s, &[1]));
                let got = eigenspace_error(&uh, &u).unwrap().value;
                (got - common::projector_oracle(&uh, &u)).abs()
            })
            .collect()
    });
    let eig_worst = eig.iter().copied().fold(0.0, f64::max);

    let solver: Vec<(f64, f64, f64)> = pool(threads).install(|| {
        (0..100)
            .into_par_iter()
            .map(|i| {
                let s = seed_for(91, i);
                let n = 2 + i % 59;
                let k = 1 + (derive_seed(s, &[2]) as usize) % n;
                let m = common::random_symmetric(n, s);
                let e = sym_eigen_topk(&m, k).unwrap();
                let full = jacobi_eigen(&m).unwrap();
                let scale = full.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
                let value_gap = e
                    .values
                    .iter()
                    .zip(&full.values)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                (e.max_residual(&m) / scale, e.orthonormality_error(), value_gap / scale)
            })
            .collect()
    });
    let res_worst = solver.iter().map(|s| s.0).fold(0.0, f64::max);
    let orth_worst = solver.iter().map(|s| s.1).fold(0.0, f64::max);
    let val_worst = solver.iter().map(|s| s.2).fold(0.0, f64::max);

    let mut csv = csv_lines("matching_agree,error", matching.iter().map(|m| format!("{},{}", m.0 as u8, fmt12(m.1))));
    csv.push_str(&csv_lines("eigenspace_gap", eig.iter().map(|&g| fmt12(g))));
    csv.push_str(&csv_lines(
        "residual,orthonormality,value_gap",
        solver.iter().map(|s| format!("{},{},{}", fmt12(s.0), fmt12(s.1), fmt12(s.2))),
    ));
    Outcome {
        passed: matching_ok == 1000 && eig_worst <= 1e-12 && res_worst <= 1e-8 && orth_worst <= 1e-10 && val_worst <= 1e-10,
        summary: format!(
            "matching {matching_ok}/1000 agree; eigenspace gap {eig_worst:.2e}; eigensolver residual {res_worst:.2e}, orthonormality {orth_worst:.2e}, value gap {val_worst:.2e}"
        ),
        csv,
    }
}

/// `K` unit corners with positive entries satisfying `(V V')^{-1} 1 > 0`, so
/// every corner touches the separating hyperplane.
fn cone_corners(k: usize, seed: u64) -> DenseMatrix<f64> {
    let mut rng = stream(seed);
    loop {
        let v = DenseMatrix::from_fn(k, k, |i, j| if i == j { 1.0 } else { 0.0 } + rng.random_range(0.0..0.4));
        let (v, _) = specmix_core::numlin::row_normalize(&v).unwrap();
        let g = v.matmul(&v.transpose()).unwrap();
        let inv = specmix_core::numlin::invert_small(&g).unwrap();
        if inv.rows_iter().all(|r| r.iter().sum::<f64>() > 0.0) {
            return v;
        }
    }
}

fn mixed_rows(n: usize, corners: &DenseMatrix<f64>, seed: u64) -> (DenseMatrix<f64>, DenseMatrix<f64>) {
    let k = corners.nrows();
    let pi = sample_membership::<f64>(n, k, 0.3, 1.0, seed).unwrap();
    let y = pi.rows().matmul(corners).unwrap();
    (pi.rows().clone(), y)
}

fn c10_corner_exactness(threads: usize) -> Outcome {
    let sp: Vec<bool> = pool(threads).install(|| {
        (0..100)
            .into_par_iter()
            .map(|i| {
                let s = seed_for(10, i);
                let r = 2 + i % 4;
                let mut rng = stream(derive_seed(s, &[0]));
                let v = DenseMatrix::from_fn(r, r + 2, |_, _| rng.random_range(-1.0..1.0));
                let (_, y) = mixed_rows(80, &v, derive_seed(s, &[1]));
                let picked = successive_projection(&y, r).unwrap();
                common::same_rows_up_to_permutation(&y.select_rows(picked.indices()), &v, 0.0)
            })
            .collect()
    });
    let cone: Vec<f64> = pool(threads).install(|| {
        (0..100)
            .into_par_iter()
            .map(|i| {
                let s = seed_for(100, i);
                let k = 2 + i % 3;
                let v = cone_corners(k, derive_seed(s, &[0]));
                let (_, y) = mixed_rows(80, &v, derive_seed(s, &[1]));
                let (unit, _) = specmix_core::numlin::row_normalize(&y).unwrap();
                let picked = svm_cone(&unit, k, derive_seed(s, &[2])).unwrap();
                let got = unit.select_rows(picked.indices());
                // max over picked rows of the distance to the nearest corner
                got.rows_iter()
                    .map(|g| {
                        v.rows_iter()
                            .map(|c| g.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                            .fold(f64::INFINITY, f64::min)
                    })
                    .fold(0.0, f64::max)
                    .max(if common::same_rows_up_to_permutation(&got, &v, 1e-8) { 0.0 } else { f64::INFINITY })
            })
            .collect()
    });
    let sp_ok = sp.iter().filter(|&&b| b).count();
    let cone_worst = cone.iter().copied().fold(0.0, f64::max);
    let mut csv = csv_lines("sp_exact", sp.iter().map(|&b| (b as u8).to_string()));
    csv.push_str(&csv_lines("cone_distance", cone.iter().map(|&d| fmt12(d))));
    Outcome {
        passed: sp_ok == 100 && cone_worst <= 1e-8,
        summary: format!("successive projection exact on {sp_ok}/100; cone corners worst row distance {cone_worst:.2e} (limit 1e-8)"),
        csv,
    }
}

type Criterion = fn(usize) -> Outcome;

const CRITERIA: [(&str, Criterion); 10] = [
    ("ideal simplex exactness", c1_ideal_mmsb),
    ("ideal cone exactness", c2_ideal_dcmm),
    ("MMSB deviation bound", c3_mmsb_deviation),
    ("DCMM deviation bound", c4_dcmm_deviation),
    ("sparsity slope", c5_sparsity_slope),
    ("separation slope", c6_separation_slope),
    ("connectivity threshold", c7_threshold),
    ("model degeneracy", c8_degeneracy),
    ("oracle equivalences", c9_oracles),
    ("corner hunt exactness", c10_corner_exactness),
];

fn main() -> ExitCode {
    // `cargo test -- <filter>` style invocations pass arguments; a filter that
    // names no criterion skips the run
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return ExitCode::SUCCESS;
    }

    // SPECMIX_ACCEPTANCE_ONLY=5,6 runs a subset and skips the determinism rerun
    let only: Option<Vec<usize>> = std::env::var("SPECMIX_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());

    let mut all = true;
    let mut first_csv = Vec::new();
    for (i, (name, run)) in CRITERIA.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            first_csv.push(String::new());
            continue;
        }
        let start = Instant::now();
        let out = run(1);
        let status = if out.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status} {name}: {} [{:.1}s]",
            i + 1,
            out.summary,
            start.elapsed().as_secs_f64()
        );
        all &= out.passed;
        first_csv.push(out.csv);
    }

    if only.is_some() {
        return if all { ExitCode::SUCCESS } else { ExitCode::FAILURE };
    }

    let start = Instant::now();
    let mut differing = Vec::new();
    for (i, (_, run)) in CRITERIA.iter().enumerate() {
        if run(3).csv != first_csv[i] {
            differing.push(i + 1);
        }
    }
    let passed = differing.is_empty();
    println!(
        "criterion 11 {} determinism: rerun of 1-10 on 3 threads {} [{:.1}s]",
        if passed { "PASS" } else { "FAIL" },
        if passed {
            "reproduced every CSV byte for byte".to_string()
        } else {
            format!("differed for criteria {differing:?}")
        },
        start.elapsed().as_secs_f64()
    );
    all &= passed;

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
