use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use specmix_core::estimators::{spacl, svmcone_dcmm};
use specmix_core::metrics::membership_error;
use specmix_core::netmodels::io::{
    generate_bundle, read_bundle, read_edge_list, read_membership, write_bundle, write_membership, GenerateParams,
    MEMBERSHIP_FILE,
};
use specmix_core::scstc::{
    fit_summary, read_results, read_threshold, run_sweep, scstc_report, summarize, threshold_scan, write_results,
    write_threshold, SweepConfig, SweptParam,
};
use specmix_core::Estimate;

use crate::config::{resolve, threads, Overrides};
use crate::plot::loglog_svg;
use crate::{Algo, EstimateArgs, GenerateArgs, ReportArgs, SweepArgs, ThresholdArgs};

const SCORES_HEADER: &str = "algo,k,max_l1_error,mean_l1_error,exact";

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    let mut o = Overrides::default();
    o.set("model", a.model)
        .set("n", a.n)
        .set("k", a.k)
        .set("rho", a.rho)
        .set("omega", a.omega)
        .set("beta", a.beta)
        .set("theta_lo_ratio", a.theta_lo_ratio)
        .set("frac_pure", a.frac_pure)
        .set("dirichlet_a", a.dirichlet_a)
        .set("seed", a.seed);
    let params: GenerateParams = resolve(a.config.as_deref(), &o)?;
    let bundle = generate_bundle(&params)?;
    let dir = write_bundle(&a.out, &bundle).with_context(|| format!("cannot write bundle to {}", a.out.display()))?;
    println!("{}", dir.display());
    Ok(())
}

#[derive(Serialize)]
struct EstimateReport<'a> {
    algo: &'a str,
    k: usize,
    corners: &'a [usize],
    #[serde(flatten)]
    diagnostics: &'a specmix_core::estimators::EstimateDiagnostics,
}

pub fn estimate(a: EstimateArgs) -> Result<()> {
    let (adjacency, truth_default, k_default) = match (&a.bundle, &a.edges) {
        (Some(dir), _) => {
            let b = read_bundle(dir).with_context(|| format!("cannot read bundle {}", dir.display()))?;
            (b.adjacency, Some(dir.join(MEMBERSHIP_FILE)), Some(b.manifest.k))
        }
        (None, Some(path)) => {
            let adj = read_edge_list(open(path)?).with_context(|| format!("cannot parse {}", path.display()))?;
            (adj, None, None)
        }
        (None, None) => bail!("pass --bundle or --edges"),
    };
    let Some(k) = a.k.or(k_default) else {
        bail!("K is required: pass --k");
    };
    let est: Estimate = match a.algo {
        Algo::Spacl => spacl(&adjacency, k)?,
        Algo::Svmcone => {
            let Some(seed) = a.seed else {
                bail!("the cone estimator needs a clustering seed: pass --seed");
            };
            svmcone_dcmm(&adjacency, k, seed)?
        }
    };
    let algo = match a.algo {
        Algo::Spacl => "spacl",
        Algo::Svmcone => "svmcone",
    };

    create_dir(&a.out)?;
    let mut buf = Vec::new();
    write_membership(&mut buf, &est.rows)?;
    write_file(&a.out.join("estimate.csv"), buf)?;
    let report = EstimateReport {
        algo,
        k,
        corners: est.corners.indices(),
        diagnostics: &est.diagnostics,
    };
    write_file(&a.out.join("diagnostics.json"), pretty(&report)?)?;

    if let Some(truth_path) = a.truth.or(truth_default) {
        let truth = read_membership(open(&truth_path)?).with_context(|| format!("cannot parse {}", truth_path.display()))?;
        let err = membership_error(&est.rows, &truth)?;
        let scores = a.out.join("scores.csv");
        let fresh = !scores.exists();
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&scores)
            .with_context(|| format!("cannot open {}", scores.display()))?;
        if fresh {
            writeln!(f, "{SCORES_HEADER}")?;
        }
        writeln!(
            f,
            "{algo},{k},{},{},{}",
            specmix_core::format::fmt12(err.max_l1_error),
            specmix_core::format::fmt12(err.mean_l1_error),
            err.exact
        )?;
    }
    println!("{}", a.out.display());
    Ok(())
}

pub fn sweep(a: SweepArgs) -> Result<()> {
    let mut o = Overrides::default();
    o.set("model", a.model)
        .set("estimator", a.estimator)
        .set("n", a.n)
        .set("k", a.k)
        .set("param", a.param)
        .set("grid", a.grid)
        .set("trials", a.trials)
        .set("seed", a.seed)
        .set("rho", a.rho)
        .set("omega", a.omega)
        .set("beta", a.beta)
        .set("record_eigenspace", a.record_eigenspace);
    let cfg: SweepConfig = resolve(a.config.as_deref(), &o)?;
    let result = run_sweep(&cfg, threads()?)?;

    create_dir(&a.out)?;
    let mut w = BufWriter::new(File::create(a.out.join("results.csv"))?);
    write_results(&result.records, &mut w)?;
    w.flush()?;
    let summary = json!({
        "config": cfg,
        "summary": result.summary,
        "fit": result.fit,
        "separation": result.separation,
    });
    write_file(&a.out.join("summary.json"), pretty(&summary)?)?;

    if !a.no_plot {
        let points: Vec<(f64, f64)> = result
            .summary
            .iter()
            .filter(|s| s.x > 0.0 && s.mean_l1_error > 0.0)
            .map(|s| (s.x, s.mean_l1_error))
            .collect();
        if points.is_empty() {
            eprintln!("note: no positive errors to plot; skipping plot.svg");
        } else {
            let x_label = match cfg.param {
                SweptParam::Beta => "beta - 2".to_string(),
                p => p.name().to_string(),
            };
            let title = format!("{} sweep, {} on {}", cfg.param, cfg.estimator, cfg.model);
            let svg = loglog_svg(&title, &x_label, "mean l1 error", &points, result.fit.as_ref());
            write_file(&a.out.join("plot.svg"), svg)?;
        }
    }
    match &result.fit {
        Some(f) => println!("slope {:.4} (R^2 {:.4}, {} points)", f.slope, f.r_squared, f.points),
        None => println!("no slope fit (errors not strictly positive)"),
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdConfig {
    n: usize,
    c_grid: Vec<f64>,
    trials: usize,
    seed: u64,
}

pub fn threshold(a: ThresholdArgs) -> Result<()> {
    let mut o = Overrides::default();
    o.set("n", a.n).set("c_grid", a.c_grid).set("trials", a.trials).set("seed", a.seed);
    let cfg: ThresholdConfig = resolve(a.config.as_deref(), &o)?;
    let scan = threshold_scan(cfg.n, &cfg.c_grid, cfg.trials, cfg.seed, threads()?)?;

    create_dir(&a.out)?;
    let mut buf = Vec::new();
    write_threshold(&scan, &mut buf)?;
    write_file(&a.out.join("threshold.csv"), buf)?;
    let doc = json!({ "config": cfg, "points": scan.points, "crossing": scan.crossing() });
    write_file(&a.out.join("threshold.json"), pretty(&doc)?)?;
    for p in &scan.points {
        println!("c {} frequency {}", p.c, p.frequency);
    }
    Ok(())
}

fn refit(path: &Path) -> Result<specmix_core::scstc::SlopeFit> {
    let records = read_results(open(path)?).with_context(|| format!("cannot parse {}", path.display()))?;
    fit_summary(&summarize(&records)).with_context(|| format!("cannot fit a slope to {}", path.display()))
}

pub fn report(a: ReportArgs) -> Result<()> {
    let sparsity = refit(&a.sparsity)?;
    let separation = refit(&a.separation)?;
    let scan = read_threshold(open(&a.threshold)?).with_context(|| format!("cannot parse {}", a.threshold.display()))?;
    let verdict = scstc_report(Some(&sparsity), Some(&separation), Some(&scan))?;
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_file(&dir.join("verdict.json"), verdict.to_json()?)?;
        write_file(&dir.join("verdict.txt"), verdict.to_text())?;
    }
    print!("{}", verdict.to_text());
    Ok(())
}
