use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::is_connected;
use crate::netmodels::sample_er;
use crate::rng::{derive_seed, streams};

use super::{pool, trial_seed};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    /// Multiplier of `log(n) / n`.
    pub c: f64,
    pub p: f64,
    pub trials: usize,
    pub connected: usize,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub n: usize,
    pub points: Vec<ThresholdPoint>,
    /// `flags[i][t]`: trial `t` connected at `c_grid[i]`.
    #[serde(skip)]
    pub flags: Vec<Vec<bool>>,
}

impl ThresholdScan {
    /// First `c` whose connectivity frequency reaches one half.
    pub fn crossing(&self) -> Option<f64> {
        self.points.iter().find(|p| p.frequency >= 0.5).map(|p| p.c)
    }
}

/// Connectivity frequency of `G(n, c log(n)/n)` for each `c`.
///
/// Trial `t` reuses one stream of uniform deviates for every `c`, so its
/// graphs are nested and its connectivity is monotone along the grid.
pub fn threshold_scan(n: usize, c_grid: &[f64], trials: usize, seed: u64, threads: usize) -> Result<ThresholdScan> {
    if n < 2 {
        return Err(Error::rejected("n", n, "need at least 2 nodes"));
    }
    if trials == 0 {
        return Err(Error::rejected("trials", 0, "need at least one trial"));
    }
    if c_grid.is_empty() {
        return Err(Error::rejected("c_grid", "[]", "need at least one multiplier"));
    }
    let scale = (n as f64).ln() / n as f64;
    let mut ps = Vec::with_capacity(c_grid.len());
    for &c in c_grid {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::rejected("c_grid", c, "multipliers must be finite and nonnegative"));
        }
        let p = c * scale;
        if p > 1.0 {
            return Err(Error::rejected("c_grid", c, format!("p = {p} exceeds 1")));
        }
        ps.push(p);
    }

    let per_trial: Vec<Result<Vec<bool>>> = pool(threads)?.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let s = derive_seed(trial_seed(seed, t), &[streams::ADJACENCY]);
                ps.iter().map(|&p| Ok(is_connected(&sample_er(n, p, s)?))).collect()
            })
            .collect()
    });
    let per_trial = per_trial.into_iter().collect::<Result<Vec<_>>>()?;

    let flags: Vec<Vec<bool>> = (0..c_grid.len())
        .map(|i| per_trial.iter().map(|row| row[i]).collect())
        .collect();
    let points = c_grid
        .iter()
        .zip(&ps)
        .zip(&flags)
        .map(|((&c, &p), f)| {
            let connected = f.iter().filter(|&&b| b).count();
            ThresholdPoint {
                c,
                p,
                trials,
                connected,
                frequency: connected as f64 / trials as f64,
            }
        })
        .collect();
    Ok(ThresholdScan { n, points, flags })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let n = 30;
        let c_full = n as f64 / (n as f64).ln();
        let s = threshold_scan(n, &[0.0, c_full], 5, 1, 1).unwrap();
        assert_eq!(s.points[0].frequency, 0.0);
        assert_eq!(s.points[1].frequency, 1.0);
        assert!(threshold_scan(n, &[c_full * 1.01], 5, 1, 1).is_err());
        assert!(threshold_scan(1, &[1.0], 5, 1, 1).is_err());
    }

    #[test]
    fn coupled_flags_are_monotone() {
        let s = threshold_scan(200, &[0.3, 0.6, 0.9, 1.2, 1.5, 2.0], 20, 9, 2).unwrap();
        for t in 0..20 {
            for i in 1..s.flags.len() {
                assert!(!s.flags[i - 1][t] || s.flags[i][t]);
            }
        }
        assert_eq!(s, threshold_scan(200, &[0.3, 0.6, 0.9, 1.2, 1.5, 2.0], 20, 9, 1).unwrap());
    }
}
