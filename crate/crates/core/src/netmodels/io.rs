//! Text formats: edge lists, membership matrices, ground-truth bundles.
//!
//! Edge list: first line `n m`, then `m` lines `i j` with `0 <= i < j < n`.
//! Membership: one line per node, `K` comma-separated decimals at 12
//! significant digits. A bundle is a directory holding `edges.txt`,
//! `membership.csv` and `manifest.json`.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt12;
use crate::matrix::DenseMatrix;

use super::{
    build_ptilde_offdiag, build_ptilde_standard, omega_dcmm, omega_mmsb, sample_adjacency, sample_degrees,
    sample_membership, Adjacency, MixingMatrix, ModelKind,
};
use crate::rng::{derive_seed, streams};

pub const EDGES_FILE: &str = "edges.txt";
pub const MEMBERSHIP_FILE: &str = "membership.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn write_edge_list<W: Write>(mut w: W, a: &Adjacency) -> Result<()> {
    let edges: Vec<(usize, usize)> = a.edges().collect();
    writeln!(w, "{} {}", a.n(), edges.len())?;
    for (i, j) in edges {
        writeln!(w, "{i} {j}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: Read>(r: R) -> Result<Adjacency> {
    let mut lines = BufReader::new(r).lines();
    let header = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })??;
    let (n, m) = parse_pair(&header, 1)?;
    let mut edges = Vec::with_capacity(m);
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (i, j) = parse_pair(&line, idx + 2)?;
        if i >= j || j >= n {
            return Err(Error::Parse {
                line: idx + 2,
                message: format!("edge ({i},{j}) must satisfy i < j < {n}"),
            });
        }
        edges.push((i, j));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 1,
            message: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    Adjacency::from_edges(n, &edges)
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let bad = |msg: &str| Error::Parse {
        line: lineno,
        message: format!("{msg}: {line:?}"),
    };
    let a = it.next().ok_or_else(|| bad("expected two integers"))?;
    let b = it.next().ok_or_else(|| bad("expected two integers"))?;
    if it.next().is_some() {
        return Err(bad("trailing fields"));
    }
    let a = a.parse().map_err(|_| bad("not a non-negative integer"))?;
    let b = b.parse().map_err(|_| bad("not a non-negative integer"))?;
    Ok((a, b))
}

pub fn write_membership<W: Write>(mut w: W, rows: &DenseMatrix<f64>) -> Result<()> {
    for r in rows.rows_iter() {
        let fields: Vec<String> = r.iter().map(|&v| fmt12(v)).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn read_membership<R: Read>(r: R) -> Result<DenseMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| Error::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

/// Everything needed to regenerate a bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub model: ModelKind,
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta_lo_ratio: Option<f64>,
    pub frac_pure: f64,
    pub dirichlet_a: f64,
    pub seed: u64,
    pub edges: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta: Option<Vec<f64>>,
}

pub struct Bundle {
    pub manifest: Manifest,
    pub adjacency: Adjacency,
    pub membership: DenseMatrix<f64>,
}

fn default_lo_ratio() -> f64 {
    0.5
}

fn default_frac_pure() -> f64 {
    0.5
}

fn default_dirichlet_a() -> f64 {
    1.0
}

/// Parameters of one generated instance. `omega` selects the standard mixing
/// family, `beta` the off-diagonal one (DCMM only).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateParams {
    pub model: ModelKind,
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default = "default_lo_ratio")]
    pub theta_lo_ratio: f64,
    #[serde(default = "default_frac_pure")]
    pub frac_pure: f64,
    #[serde(default = "default_dirichlet_a")]
    pub dirichlet_a: f64,
    pub seed: u64,
}

/// Samples `Pi`, `theta` (DCMM), `Omega` and `A` from sub-streams of `seed`.
pub fn generate_bundle(params: &GenerateParams) -> Result<Bundle> {
    let rho = params.rho;
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidProbability(format!("rho = {rho} outside [0, 1]")));
    }
    let mixing: MixingMatrix<f64> = match (params.omega, params.beta) {
        (Some(_), Some(_)) => return Err(Error::invalid("give omega or beta, not both")),
        (Some(w), None) => build_ptilde_standard(params.k, w)?,
        (None, Some(b)) => build_ptilde_offdiag(params.k, b)?,
        (None, None) => return Err(Error::invalid("one of omega or beta is required")),
    };
    let seed = params.seed;
    let membership = sample_membership::<f64>(
        params.n,
        params.k,
        params.frac_pure,
        params.dirichlet_a,
        derive_seed(seed, &[streams::MEMBERSHIP]),
    )?;
    let (pop, theta) = match params.model {
        ModelKind::Mmsb => (omega_mmsb(rho, &mixing, &membership)?, None),
        ModelKind::Dcmm => {
            let theta = sample_degrees::<f64>(params.n, rho, params.theta_lo_ratio, derive_seed(seed, &[streams::DEGREES]))?;
            (omega_dcmm(&theta, &mixing, &membership)?, Some(theta.values().to_vec()))
        }
    };
    let adjacency = sample_adjacency(pop.omega(), derive_seed(seed, &[streams::ADJACENCY]));
    let manifest = Manifest {
        model: params.model,
        n: params.n,
        k: params.k,
        rho,
        omega: params.omega,
        beta: params.beta,
        theta_lo_ratio: theta.as_ref().map(|_| params.theta_lo_ratio),
        frac_pure: params.frac_pure,
        dirichlet_a: params.dirichlet_a,
        seed,
        edges: adjacency.edge_count(),
        theta,
    };
    Ok(Bundle {
        manifest,
        adjacency,
        membership: membership.rows().clone(),
    })
}

pub fn write_bundle(dir: &Path, bundle: &Bundle) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut edges = Vec::new();
    write_edge_list(&mut edges, &bundle.adjacency)?;
    fs::write(dir.join(EDGES_FILE), edges)?;
    let mut memb = Vec::new();
    write_membership(&mut memb, &bundle.membership)?;
    fs::write(dir.join(MEMBERSHIP_FILE), memb)?;
    let mut manifest = serde_json::to_string_pretty(&bundle.manifest)?;
    manifest.push('\n');
    fs::write(dir.join(MANIFEST_FILE), manifest)?;
    Ok(dir.to_path_buf())
}

pub fn read_bundle(dir: &Path) -> Result<Bundle> {
    let manifest: Manifest = serde_json::from_slice(&fs::read(dir.join(MANIFEST_FILE))?)?;
    let adjacency = read_edge_list(fs::File::open(dir.join(EDGES_FILE))?)?;
    let membership = read_membership(fs::File::open(dir.join(MEMBERSHIP_FILE))?)?;
    Ok(Bundle {
        manifest,
        adjacency,
        membership,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_format() {
        let a = Adjacency::from_edges(4, &[(2, 0), (1, 3)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &a).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "4 2\n0 2\n1 3\n");
        assert_eq!(read_edge_list(&buf[..]).unwrap(), a);
    }

    #[test]
    fn edge_list_errors() {
        assert!(read_edge_list(&b""[..]).is_err());
        assert!(read_edge_list(&b"3 1\n2 1\n"[..]).is_err());
        assert!(read_edge_list(&b"3 2\n0 1\n"[..]).is_err());
        assert!(read_edge_list(&b"3 1\n0 x\n"[..]).is_err());
    }

    #[test]
    fn generated_bundle_round_trip() {
        let params = GenerateParams {
            model: ModelKind::Dcmm,
            n: 40,
            k: 2,
            rho: 0.5,
            omega: Some(0.6),
            beta: None,
            theta_lo_ratio: 0.5,
            frac_pure: 0.5,
            dirichlet_a: 1.0,
            seed: 3,
        };
        let b = generate_bundle(&params).unwrap();
        assert_eq!(b.manifest.theta.as_ref().unwrap().len(), 40);
        assert_eq!(b.manifest.edges, b.adjacency.edge_count());
        let dir = tempfile::tempdir().unwrap();
        write_bundle(dir.path(), &b).unwrap();
        let back = read_bundle(dir.path()).unwrap();
        assert_eq!(back.manifest, b.manifest);
        assert_eq!(back.adjacency, b.adjacency);

        let bad = GenerateParams { rho: 1.5, ..params };
        assert!(matches!(generate_bundle(&bad), Err(Error::InvalidProbability(_))));
    }

    #[test]
    fn membership_format() {
        let m = DenseMatrix::from_f64_rows(&[[1.0, 0.0], [1.0 / 3.0, 2.0 / 3.0]]).unwrap();
        let mut buf = Vec::new();
        write_membership(&mut buf, &m).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "1,0\n0.333333333333,0.666666666667\n");
        let back = read_membership(&buf[..]).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-12);
        assert!(read_membership(&b"1,0\n0.5\n"[..]).is_err());
    }
}
