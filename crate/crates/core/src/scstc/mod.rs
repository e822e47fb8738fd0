//! Monte Carlo harness: seeded parameter sweeps with log-log slope fits,
//! connectivity threshold scans, and a PASS/FLAG verdict.
//!
//! Every trial is a pure function of `(config, grid index, trial index)`.
//! Trials run on a rayon pool and are merged in `(grid value, trial)` order,
//! so results do not depend on the number of threads.

mod fit;
mod report;
mod table;
mod threshold;

pub use fit::{fit_loglog_slope, SlopeFit};
pub use report::{scstc_report, Status, Verdict, VerdictEntry, SEPARATION_BAND, SPARSITY_BAND, THRESHOLD_BAND};
pub use table::{read_results, read_threshold, write_results, write_threshold, RESULTS_HEADER, THRESHOLD_HEADER};
pub use threshold::{threshold_scan, ThresholdPoint, ThresholdScan};

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{spacl_from_eigen, svmcone_from_eigen};
use crate::metrics::{eigenspace_error, instance_diagnostics, is_connected, membership_error, spectral_deviation, InstanceDiagnostics};
use crate::netmodels::{
    build_ptilde_offdiag, build_ptilde_standard, gate_sparsity, omega_dcmm, omega_mmsb, sample_adjacency,
    sample_degrees, sample_membership, MixingMatrix, ModelKind, PopulationMatrix,
};
use crate::numlin::sym_eigen_topk;
use crate::rng::{derive_seed, streams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Spacl,
    Svmcone,
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorKind::Spacl => "spacl",
            EstimatorKind::Svmcone => "svmcone",
        })
    }
}

/// The parameter varied along the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweptParam {
    Rho,
    Omega,
    N,
    Beta,
    P,
}

impl SweptParam {
    pub fn name(self) -> &'static str {
        match self {
            SweptParam::Rho => "rho",
            SweptParam::Omega => "omega",
            SweptParam::N => "n",
            SweptParam::Beta => "beta",
            SweptParam::P => "p",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "rho" => SweptParam::Rho,
            "omega" => SweptParam::Omega,
            "n" => SweptParam::N,
            "beta" => SweptParam::Beta,
            "p" => SweptParam::P,
            _ => return None,
        })
    }

    /// Abscissa of the log-log fit: `beta - 2` for `beta`, the value otherwise.
    pub fn abscissa(self, value: f64) -> f64 {
        match self {
            SweptParam::Beta => value - 2.0,
            _ => value,
        }
    }
}

impl fmt::Display for SweptParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Test mode: trials skip graph generation and report `coefficient * x^exponent`
/// as both error columns, with `x` the fit abscissa.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedLaw {
    pub coefficient: f64,
    pub exponent: f64,
}

fn default_theta_lo_ratio() -> f64 {
    0.5
}

fn default_frac_pure() -> f64 {
    0.5
}

fn default_dirichlet_a() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub estimator: EstimatorKind,
    /// Ignored (taken from the grid) when sweeping `n`.
    pub n: usize,
    pub k: usize,
    pub param: SweptParam,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Sparsity, or the squared scale of `theta` under DCMM.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Uses the off-diagonal mixing family when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default = "default_theta_lo_ratio")]
    pub theta_lo_ratio: f64,
    #[serde(default = "default_frac_pure")]
    pub frac_pure: f64,
    #[serde(default = "default_dirichlet_a")]
    pub dirichlet_a: f64,
    #[serde(default)]
    pub record_eigenspace: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<PlantedLaw>,
}

impl SweepConfig {
    /// A configuration with the documented defaults for everything optional.
    pub fn new(model: ModelKind, estimator: EstimatorKind, n: usize, k: usize, param: SweptParam, grid: Vec<f64>, trials: usize, seed: u64) -> Self {
        Self {
            model,
            estimator,
            n,
            k,
            param,
            grid,
            trials,
            seed,
            rho: None,
            omega: None,
            beta: None,
            theta_lo_ratio: default_theta_lo_ratio(),
            frac_pure: default_frac_pure(),
            dirichlet_a: default_dirichlet_a(),
            record_eigenspace: false,
            deviation_alpha: None,
            planted: None,
        }
    }

    /// Checks every field and every grid point; nothing runs unless this passes.
    pub fn validate(&self) -> Result<()> {
        let grid_str = || format!("{:?}", self.grid);
        if self.grid.len() < 3 {
            return Err(Error::rejected("grid", grid_str(), "need at least 3 points"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::rejected("grid", grid_str(), "values must be finite"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::rejected("grid", grid_str(), "values must be strictly increasing"));
        }
        if self.trials == 0 {
            return Err(Error::rejected("trials", 0, "need at least one trial"));
        }
        if self.k == 0 {
            return Err(Error::rejected("k", 0, "need at least one community"));
        }
        if !(0.0..=1.0).contains(&self.frac_pure) {
            return Err(Error::rejected("frac_pure", self.frac_pure, "must lie in [0, 1]"));
        }
        if !(self.dirichlet_a > 0.0 && self.dirichlet_a.is_finite()) {
            return Err(Error::rejected("dirichlet_a", self.dirichlet_a, "must be positive"));
        }
        if !(self.theta_lo_ratio > 0.0 && self.theta_lo_ratio <= 1.0) {
            return Err(Error::rejected("theta_lo_ratio", self.theta_lo_ratio, "must lie in (0, 1]"));
        }
        if let Some(a) = self.deviation_alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::rejected("deviation_alpha", a, "must be positive"));
            }
        }
        if let Some(p) = self.planted {
            if !(p.coefficient > 0.0 && p.coefficient.is_finite() && p.exponent.is_finite()) {
                return Err(Error::rejected("planted", format!("{p:?}"), "coefficient must be positive"));
            }
        }
        match self.param {
            SweptParam::P => {
                if self.k != 1 {
                    return Err(Error::rejected("k", self.k, "sweeping p requires K = 1"));
                }
                if self.model != ModelKind::Mmsb {
                    return Err(Error::rejected("model", self.model, "sweeping p requires the mmsb model"));
                }
            }
            SweptParam::Beta if self.model != ModelKind::Dcmm => {
                return Err(Error::rejected("model", self.model, "the beta family has off-diagonal entries above 1 and needs dcmm"));
            }
            _ => {}
        }
        for &v in &self.grid {
            self.instance(v)?;
        }
        Ok(())
    }

    /// Resolves the fixed and swept parameters at grid value `v` and checks
    /// the assumption gates there.
    fn instance(&self, v: f64) -> Result<Instance> {
        let at = |reason: &str| Error::rejected(format!("grid[{}]", self.param), v, reason);
        let n = if self.param == SweptParam::N {
            if v.fract() != 0.0 || v < self.k as f64 || v > u32::MAX as f64 {
                return Err(at("n must be an integer no smaller than K"));
            }
            v as usize
        } else {
            self.n
        };
        if n < self.k.max(2) {
            return Err(Error::rejected("n", n, "need n >= max(K, 2)"));
        }
        let rho = match self.param {
            SweptParam::Rho | SweptParam::P => v,
            _ => self.rho.ok_or_else(|| Error::rejected("rho", "missing", "required unless rho or p is swept"))?,
        };
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(if matches!(self.param, SweptParam::Rho | SweptParam::P) {
                at("must lie in (0, 1]")
            } else {
                Error::rejected("rho", rho, "must lie in (0, 1]")
            });
        }
        let mixing = match (self.param, self.beta) {
            (SweptParam::P, _) => MixingSpec::Standard(1.0),
            (SweptParam::Beta, _) => {
                if v <= 2.0 {
                    return Err(at("beta must exceed 2 (beta = 2 makes the mixing matrix singular)"));
                }
                MixingSpec::OffDiagonal(v)
            }
            (SweptParam::Omega, _) => {
                if !(v > 0.0 && v <= 1.0) {
                    return Err(at("omega must lie in (0, 1]"));
                }
                MixingSpec::Standard(v)
            }
            (_, Some(beta)) => {
                if self.model != ModelKind::Dcmm {
                    return Err(Error::rejected("beta", beta, "the beta family needs dcmm"));
                }
                if !(beta >= 1.0) || beta == 2.0 {
                    return Err(Error::rejected("beta", beta, "must be >= 1 and != 2"));
                }
                MixingSpec::OffDiagonal(beta)
            }
            (_, None) => {
                let w = self
                    .omega
                    .ok_or_else(|| Error::rejected("omega", "missing", "required unless omega or beta is set"))?;
                if !(w > 0.0 && w <= 1.0) {
                    return Err(Error::rejected("omega", w, "must lie in (0, 1]"));
                }
                MixingSpec::Standard(w)
            }
        };
        let p_max = mixing.max_entry();
        match self.model {
            ModelKind::Mmsb => {
                if rho * p_max > 1.0 {
                    return Err(at("rho * P_max exceeds 1"));
                }
                if !gate_sparsity(rho, n) {
                    return Err(at("violates rho n >= log n"));
                }
            }
            ModelKind::Dcmm => {
                if rho.sqrt() * p_max > 1.0 {
                    return Err(at("theta_max * P_max can exceed 1"));
                }
                // theta_max ||theta||_1 >= (lo sqrt(rho)) (n lo sqrt(rho)) for every draw
                let lo = self.theta_lo_ratio;
                if p_max * lo * lo * rho * (n as f64) < (n as f64).ln() {
                    return Err(at("cannot guarantee P_max theta_max ||theta||_1 >= log n"));
                }
            }
        }
        Ok(Instance { n, rho, mixing })
    }
}

#[derive(Clone, Copy, Debug)]
enum MixingSpec {
    Standard(f64),
    OffDiagonal(f64),
}

impl MixingSpec {
    fn max_entry(self) -> f64 {
        match self {
            MixingSpec::Standard(_) => 1.0,
            MixingSpec::OffDiagonal(b) => 1.0f64.max(b - 1.0),
        }
    }

    fn build(self, k: usize) -> Result<MixingMatrix<f64>> {
        match self {
            MixingSpec::Standard(w) => build_ptilde_standard(k, w),
            MixingSpec::OffDiagonal(b) => build_ptilde_offdiag(k, b),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Instance {
    n: usize,
    rho: f64,
    mixing: MixingSpec,
}

/// One row of the results table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub param: SweptParam,
    pub value: f64,
    pub trial: usize,
    pub seed: u64,
    pub max_l1_error: f64,
    pub mean_l1_error: f64,
    pub eig_error: Option<f64>,
    pub dev_ratio: Option<f64>,
    pub connected: Option<bool>,
    pub diagnostics: Option<RecordDiagnostics>,
}

/// The instance diagnostics carried in the results table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecordDiagnostics {
    pub sigma_k_p: f64,
    pub lambda_k_gram: f64,
    pub lambda_1_gram: f64,
    pub pi_min: f64,
    pub theta_max: Option<f64>,
    pub theta_min: Option<f64>,
}

impl From<InstanceDiagnostics> for RecordDiagnostics {
    fn from(d: InstanceDiagnostics) -> Self {
        Self {
            sigma_k_p: d.sigma_k_p,
            lambda_k_gram: d.lambda_k_gram,
            lambda_1_gram: d.lambda_1_gram,
            pi_min: d.pi_min,
            theta_max: d.theta_max,
            theta_min: d.theta_min,
        }
    }
}

/// Trial averages at one grid value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSummary {
    pub value: f64,
    /// Fit abscissa.
    pub x: f64,
    pub mean_l1_error: f64,
    pub max_l1_error: f64,
    pub trials: usize,
}

/// `omega sqrt(rho)` and `omega sqrt(rho n / log n)` at one grid value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationStat {
    pub omega: f64,
    pub separation: f64,
    pub alternative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub param: SweptParam,
    pub records: Vec<TrialRecord>,
    pub summary: Vec<GridSummary>,
    /// Absent when some averaged error is zero, which has no logarithm.
    pub fit: Option<SlopeFit>,
    pub separation: Vec<SeparationStat>,
}

/// Seed of trial `t`; shared by every grid value.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    derive_seed(master, &[trial as u64])
}

fn run_trial(cfg: &SweepConfig, value: f64, trial: usize) -> Result<TrialRecord> {
    let seed = trial_seed(cfg.seed, trial);
    let mut record = TrialRecord {
        param: cfg.param,
        value,
        trial,
        seed,
        max_l1_error: 0.0,
        mean_l1_error: 0.0,
        eig_error: None,
        dev_ratio: None,
        connected: None,
        diagnostics: None,
    };
    if let Some(law) = cfg.planted {
        let e = law.coefficient * cfg.param.abscissa(value).powf(law.exponent);
        record.max_l1_error = e;
        record.mean_l1_error = e;
        return Ok(record);
    }

    let inst = cfg.instance(value)?;
    let membership = sample_membership::<f64>(
        inst.n,
        cfg.k,
        cfg.frac_pure,
        cfg.dirichlet_a,
        derive_seed(seed, &[streams::MEMBERSHIP]),
    )?;
    let mixing = inst.mixing.build(cfg.k)?;
    let pop: PopulationMatrix<f64> = match cfg.model {
        ModelKind::Mmsb => omega_mmsb(inst.rho, &mixing, &membership)?,
        ModelKind::Dcmm => {
            let theta = sample_degrees(inst.n, inst.rho, cfg.theta_lo_ratio, derive_seed(seed, &[streams::DEGREES]))?;
            omega_dcmm(&theta, &mixing, &membership)?
        }
    };
    let a = sample_adjacency(pop.omega(), derive_seed(seed, &[streams::ADJACENCY]));

    let eigen = sym_eigen_topk(&a.to_matrix::<f64>(), cfg.k)?;
    let estimate = match cfg.estimator {
        EstimatorKind::Spacl => spacl_from_eigen(&eigen)?,
        EstimatorKind::Svmcone => svmcone_from_eigen(&eigen, derive_seed(seed, &[streams::CLUSTERING]))?,
    };
    let err = membership_error(&estimate.rows, membership.rows())?;
    record.max_l1_error = err.max_l1_error;
    record.mean_l1_error = err.mean_l1_error;
    if cfg.record_eigenspace {
        let truth = pop.compact_eigen()?;
        record.eig_error = Some(eigenspace_error(&eigen.vectors, &truth.vectors)?.value);
    }
    if let Some(alpha) = cfg.deviation_alpha {
        record.dev_ratio = Some(spectral_deviation(&a, &pop, alpha)?.ratio);
    }
    record.connected = Some(is_connected(&a));
    record.diagnostics = Some(instance_diagnostics(&membership, &mixing, pop.scale())?.into());
    Ok(record)
}

/// Builds a rayon pool with `threads` workers (at least one).
pub(crate) fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))
}

/// Runs every `(grid value, trial)` pair of a validated config and fits
/// `log(mean over trials of mean_l1_error)` against `log(x)`.
pub fn run_sweep(cfg: &SweepConfig, threads: usize) -> Result<SweepResult> {
    cfg.validate()?;
    let tasks: Vec<(f64, usize)> = cfg
        .grid
        .iter()
        .flat_map(|&v| (0..cfg.trials).map(move |t| (v, t)))
        .collect();
    let outcomes: Vec<Result<TrialRecord>> = pool(threads)?.install(|| {
        tasks
            .par_iter()
            .map(|&(v, t)| {
                run_trial(cfg, v, t).map_err(|e| Error::TrialFailed {
                    value: v,
                    trial: t,
                    source: Box::new(e),
                })
            })
            .collect()
    });
    let mut records = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.trial.cmp(&b.trial)));

    let summary = summarize(&records);
    let fit = fit_summary(&summary).ok();
    let separation = if cfg.param == SweptParam::Omega {
        cfg.grid
            .iter()
            .map(|&w| {
                // grid validation guarantees rho is present
                let inst = cfg.instance(w).expect("validated");
                separation_stat(w, inst.rho, inst.n)
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(SweepResult {
        param: cfg.param,
        records,
        summary,
        fit,
        separation,
    })
}

fn require_param(cfg: &SweepConfig, want: SweptParam) -> Result<()> {
    if cfg.param != want {
        return Err(Error::rejected("param", cfg.param, format!("this sweep varies {want}")));
    }
    Ok(())
}

/// Sweep over the sparsity `rho`.
pub fn sweep_sparsity(cfg: &SweepConfig, threads: usize) -> Result<SweepResult> {
    require_param(cfg, SweptParam::Rho)?;
    run_sweep(cfg, threads)
}

/// Sweep over `omega` in the standard mixing family; also reports the
/// separation statistics per grid value.
pub fn sweep_separation(cfg: &SweepConfig, threads: usize) -> Result<SweepResult> {
    require_param(cfg, SweptParam::Omega)?;
    run_sweep(cfg, threads)
}

/// Sweep over `beta > 2` in the off-diagonal family, fit against `beta - 2`.
pub fn sweep_beta(cfg: &SweepConfig, threads: usize) -> Result<SweepResult> {
    require_param(cfg, SweptParam::Beta)?;
    run_sweep(cfg, threads)
}

/// `|p_in - p_out| / sqrt(p_in)` and its `log(n)/n`-scaled variant for
/// `p_in = rho`, `p_out = rho (1 - omega)`.
pub fn separation_stat(omega: f64, rho: f64, n: usize) -> SeparationStat {
    let ln = (n as f64).ln();
    SeparationStat {
        omega,
        separation: omega * rho.sqrt(),
        alternative: omega * (rho * n as f64 / ln).sqrt(),
    }
}

/// Per-grid-value averages of records sorted by value.
pub fn summarize(records: &[TrialRecord]) -> Vec<GridSummary> {
    let mut out: Vec<GridSummary> = Vec::new();
    for r in records {
        match out.last_mut() {
            Some(s) if s.value == r.value => {
                s.mean_l1_error += r.mean_l1_error;
                s.max_l1_error += r.max_l1_error;
                s.trials += 1;
            }
            _ => out.push(GridSummary {
                value: r.value,
                x: r.param.abscissa(r.value),
                mean_l1_error: r.mean_l1_error,
                max_l1_error: r.max_l1_error,
                trials: 1,
            }),
        }
    }
    for s in &mut out {
        s.mean_l1_error /= s.trials as f64;
        s.max_l1_error /= s.trials as f64;
    }
    out
}

/// Log-log fit of the averaged mean-l1 error.
pub fn fit_summary(summary: &[GridSummary]) -> Result<SlopeFit> {
    let points: Vec<(f64, f64)> = summary.iter().map(|s| (s.x, s.mean_l1_error)).collect();
    fit_loglog_slope(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(param: SweptParam, grid: Vec<f64>, exponent: f64) -> SweepConfig {
        let mut c = SweepConfig::new(ModelKind::Mmsb, EstimatorKind::Spacl, 1000, 2, param, grid, 3, 11);
        c.rho = Some(0.3);
        c.omega = Some(0.9);
        c.planted = Some(PlantedLaw {
            coefficient: 0.7,
            exponent,
        });
        c
    }

    #[test]
    fn planted_power_laws_fit_exactly() {
        let r = sweep_sparsity(&planted(SweptParam::Rho, vec![0.05, 0.1, 0.2, 0.4], -0.5), 1).unwrap();
        let fit = r.fit.unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12 && (fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(r.records.len(), 12);

        let r = sweep_separation(&planted(SweptParam::Omega, vec![0.3, 0.45, 0.675, 1.0], -1.0), 1).unwrap();
        assert!((r.fit.unwrap().slope + 1.0).abs() < 1e-12);
        assert_eq!(r.separation.len(), 4);
        assert!((r.separation[3].separation - 0.3f64.sqrt()).abs() < 1e-15);

        let mut c = planted(SweptParam::Beta, vec![2.2, 2.4, 2.8, 3.6], -1.0);
        c.model = ModelKind::Dcmm;
        c.rho = Some(0.1);
        let r = sweep_beta(&c, 2).unwrap();
        assert!((r.fit.unwrap().slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejections_name_the_field() {
        let c = planted(SweptParam::Rho, vec![0.1, 0.2], -0.5);
        assert!(matches!(c.validate(), Err(Error::ConfigRejected { ref field, .. }) if field == "grid"));

        let c = planted(SweptParam::Rho, vec![0.001, 0.1, 0.2], -0.5);
        match c.validate() {
            Err(Error::ConfigRejected { field, value, .. }) => {
                assert_eq!(field, "grid[rho]");
                assert_eq!(value, "0.001");
            }
            other => panic!("{other:?}"),
        }

        let mut c = planted(SweptParam::Beta, vec![2.0, 2.5, 3.0], -1.0);
        c.model = ModelKind::Dcmm;
        c.rho = Some(0.1);
        match c.validate() {
            Err(Error::ConfigRejected { value, .. }) => assert_eq!(value, "2"),
            other => panic!("{other:?}"),
        }

        let c = planted(SweptParam::Rho, vec![0.3, 0.2, 0.4], -0.5);
        assert!(c.validate().is_err());
        assert!(sweep_beta(&planted(SweptParam::Rho, vec![0.1, 0.2, 0.4], -0.5), 1).is_err());
    }

    #[test]
    fn separation_statistics() {
        let s = separation_stat(0.5, 0.36, 1000);
        assert!((s.separation - 0.3).abs() < 1e-15);
        let alpha_in = 0.36 * 1000.0 / 1000f64.ln();
        let alpha_out = alpha_in * 0.5;
        assert!((s.alternative - (alpha_in - alpha_out) / alpha_in.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn small_real_sweep_is_thread_independent() {
        let mut c = SweepConfig::new(ModelKind::Mmsb, EstimatorKind::Spacl, 60, 2, SweptParam::Rho, vec![0.3, 0.5, 0.9], 2, 5);
        c.omega = Some(0.9);
        c.record_eigenspace = true;
        c.deviation_alpha = Some(1.0);
        let a = run_sweep(&c, 1).unwrap();
        let b = run_sweep(&c, 3).unwrap();
        assert_eq!(a, b);
        for r in &a.records {
            assert!((0.0..=2.0).contains(&r.max_l1_error));
            assert!(r.eig_error.is_some() && r.dev_ratio.is_some());
        }
    }
}
