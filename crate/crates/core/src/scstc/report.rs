use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::fmt_sig;

use super::{SlopeFit, ThresholdScan};

/// Accepted slope range of error against `rho`.
pub const SPARSITY_BAND: (f64, f64) = (-0.65, -0.35);
/// Accepted slope range of error against `omega`.
pub const SEPARATION_BAND: (f64, f64) = (-1.25, -0.75);
/// Accepted range of the first `c` with connectivity frequency >= 1/2.
pub const THRESHOLD_BAND: (f64, f64) = (0.5, 2.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Flag,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Flag
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Flag => "FLAG",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictEntry {
    pub name: &'static str,
    pub status: Status,
    /// `None` when the statistic could not be formed (no crossing observed).
    pub statistic: Option<f64>,
    pub band: (f64, f64),
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub entries: Vec<VerdictEntry>,
    /// Setup assertions that hold by construction of the harness.
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            let stat = e.statistic.map_or_else(|| "none".to_string(), |v| fmt_sig(v, 6));
            let _ = writeln!(
                s,
                "{:<4} {:<10} {} in [{}, {}]  {}",
                e.status.as_str(),
                e.name,
                stat,
                e.band.0,
                e.band.1,
                e.detail
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "note {n}");
        }
        s
    }
}

fn in_band(v: f64, band: (f64, f64)) -> bool {
    v >= band.0 && v <= band.1
}

/// PASS/FLAG for the sparsity slope, the separation slope and the
/// connectivity crossing.
pub fn scstc_report(sparsity: Option<&SlopeFit>, separation: Option<&SlopeFit>, threshold: Option<&ThresholdScan>) -> Result<Verdict> {
    let sparsity = sparsity.ok_or_else(|| Error::invalid("missing sparsity fit"))?;
    let separation = separation.ok_or_else(|| Error::invalid("missing separation fit"))?;
    let threshold = threshold.ok_or_else(|| Error::invalid("missing threshold data"))?;
    if threshold.points.is_empty() {
        return Err(Error::invalid("threshold scan has no points"));
    }

    let fit_detail = |f: &SlopeFit| format!("r2 {} over {} points", fmt_sig(f.r_squared, 4), f.points);
    let crossing = threshold.crossing();
    let entries = vec![
        VerdictEntry {
            name: "sparsity",
            status: Status::of(in_band(sparsity.slope, SPARSITY_BAND)),
            statistic: Some(sparsity.slope),
            band: SPARSITY_BAND,
            detail: fit_detail(sparsity),
        },
        VerdictEntry {
            name: "separation",
            status: Status::of(in_band(separation.slope, SEPARATION_BAND)),
            statistic: Some(separation.slope),
            band: SEPARATION_BAND,
            detail: fit_detail(separation),
        },
        VerdictEntry {
            name: "threshold",
            status: Status::of(crossing.is_some_and(|c| in_band(c, THRESHOLD_BAND))),
            statistic: crossing,
            band: THRESHOLD_BAND,
            detail: format!("n {}, first c with frequency >= 0.5", threshold.n),
        },
    ];
    Ok(Verdict {
        entries,
        notes: vec![
            "error rate depends on sigma_K(P) through the standard mixing family omega I + (1 - omega) 11'".into(),
            "balanced setup: K fixed, memberships drawn identically for every node".into(),
        ],
    })
}
