mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "specmix", version, about = "Mixed-membership network estimation and Monte Carlo sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a network with known memberships into a bundle directory.
    Generate(GenerateArgs),
    /// Estimate memberships from an edge list, optionally scoring against truth.
    Estimate(EstimateArgs),
    /// Run a parameter sweep and fit the log-log error slope.
    Sweep(SweepArgs),
    /// Scan connectivity frequency of G(n, c log(n)/n) over a grid of c.
    Threshold(ThresholdArgs),
    /// Combine two sweeps and a threshold scan into a verdict.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Mmsb,
    Dcmm,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Spacl,
    Svmcone,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Rho,
    Omega,
    N,
    Beta,
    P,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// JSON object with any of the fields below; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<Model>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    theta_lo_ratio: Option<f64>,
    #[arg(long)]
    frac_pure: Option<f64>,
    #[arg(long)]
    dirichlet_a: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct EstimateArgs {
    /// Bundle directory; supplies the edges, the truth and the default K.
    #[arg(long, conflicts_with = "edges", required_unless_present = "edges")]
    bundle: Option<PathBuf>,
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Membership CSV to score against.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "spacl")]
    algo: Algo,
    /// Clustering seed for the cone estimator.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<Model>,
    #[arg(long, value_enum)]
    estimator: Option<Algo>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    param: Option<Param>,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    record_eigenspace: Option<bool>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    no_plot: bool,
}

#[derive(Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    c_grid: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct ReportArgs {
    /// results.csv of a rho sweep.
    #[arg(long)]
    sparsity: PathBuf,
    /// results.csv of an omega sweep.
    #[arg(long)]
    separation: PathBuf,
    /// threshold.csv of a connectivity scan.
    #[arg(long)]
    threshold: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Threshold(a) => commands::threshold(a),
        Command::Report(a) => commands::report(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
