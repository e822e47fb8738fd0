//! CSV tables. Decimals carry 12 significant digits; inapplicable fields are
//! left empty.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::format::fmt12;

use super::{RecordDiagnostics, SweptParam, ThresholdPoint, ThresholdScan, TrialRecord};

pub const RESULTS_HEADER: [&str; 15] = [
    "param",
    "value",
    "trial",
    "seed",
    "max_l1_error",
    "mean_l1_error",
    "eig_error",
    "dev_ratio",
    "connected",
    "sigma_k_p",
    "lambda_k_gram",
    "lambda_1_gram",
    "pi_min",
    "theta_max",
    "theta_min",
];

pub const THRESHOLD_HEADER: [&str; 6] = ["n", "c", "p", "trials", "connected", "frequency"];

fn opt(v: Option<f64>) -> String {
    v.map(fmt12).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse {
            line,
            message: format!("{kind:?}"),
        },
    }
}

pub fn write_results<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER).map_err(csv_err)?;
    for r in records {
        let d = r.diagnostics.as_ref();
        w.write_record([
            r.param.name().to_string(),
            fmt12(r.value),
            r.trial.to_string(),
            r.seed.to_string(),
            fmt12(r.max_l1_error),
            fmt12(r.mean_l1_error),
            opt(r.eig_error),
            opt(r.dev_ratio),
            r.connected.map(|c| if c { "1" } else { "0" }.to_string()).unwrap_or_default(),
            opt(d.map(|d| d.sigma_k_p)),
            opt(d.map(|d| d.lambda_k_gram)),
            opt(d.map(|d| d.lambda_1_gram)),
            opt(d.map(|d| d.pi_min)),
            opt(d.and_then(|d| d.theta_max)),
            opt(d.and_then(|d| d.theta_min)),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

struct Fields<'a> {
    rec: &'a csv::StringRecord,
    line: usize,
}

impl Fields<'_> {
    fn err(&self, message: String) -> Error {
        Error::Parse {
            line: self.line,
            message,
        }
    }

    fn raw(&self, i: usize) -> &str {
        self.rec.get(i).unwrap_or("")
    }

    fn opt<T: std::str::FromStr>(&self, i: usize, name: &str) -> Result<Option<T>> {
        let s = self.raw(i);
        if s.is_empty() {
            return Ok(None);
        }
        s.parse()
            .map(Some)
            .map_err(|_| self.err(format!("cannot parse {name} from {s:?}")))
    }

    fn req<T: std::str::FromStr>(&self, i: usize, name: &str) -> Result<T> {
        self.opt(i, name)?.ok_or_else(|| self.err(format!("missing {name}")))
    }
}

fn check_header<R: Read>(r: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header, expected {}", expected.join(",")),
        });
    }
    Ok(())
}

pub fn read_results<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &RESULTS_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let f = Fields { rec: &rec, line: i + 2 };
        let param = SweptParam::parse(f.raw(0)).ok_or_else(|| f.err(format!("unknown param {:?}", f.raw(0))))?;
        let connected = match f.raw(8) {
            "" => None,
            "1" => Some(true),
            "0" => Some(false),
            s => return Err(f.err(format!("connected must be 0 or 1, got {s:?}"))),
        };
        let diagnostics = match f.opt::<f64>(9, "sigma_k_p")? {
            None => None,
            Some(sigma_k_p) => Some(RecordDiagnostics {
                sigma_k_p,
                lambda_k_gram: f.req(10, "lambda_k_gram")?,
                lambda_1_gram: f.req(11, "lambda_1_gram")?,
                pi_min: f.req(12, "pi_min")?,
                theta_max: f.opt(13, "theta_max")?,
                theta_min: f.opt(14, "theta_min")?,
            }),
        };
        out.push(TrialRecord {
            param,
            value: f.req(1, "value")?,
            trial: f.req(2, "trial")?,
            seed: f.req(3, "seed")?,
            max_l1_error: f.req(4, "max_l1_error")?,
            mean_l1_error: f.req(5, "mean_l1_error")?,
            eig_error: f.opt(6, "eig_error")?,
            dev_ratio: f.opt(7, "dev_ratio")?,
            connected,
            diagnostics,
        });
    }
    Ok(out)
}

pub fn write_threshold<W: Write>(scan: &ThresholdScan, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(THRESHOLD_HEADER).map_err(csv_err)?;
    for p in &scan.points {
        w.write_record([
            scan.n.to_string(),
            fmt12(p.c),
            fmt12(p.p),
            p.trials.to_string(),
            p.connected.to_string(),
            fmt12(p.frequency),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a threshold table; per-trial flags are not stored and come back empty.
pub fn read_threshold<R: Read>(input: R) -> Result<ThresholdScan> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &THRESHOLD_HEADER)?;
    let mut points = Vec::new();
    let mut n = None;
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let f = Fields { rec: &rec, line: i + 2 };
        let row_n: usize = f.req(0, "n")?;
        if *n.get_or_insert(row_n) != row_n {
            return Err(f.err("rows disagree on n".into()));
        }
        points.push(ThresholdPoint {
            c: f.req(1, "c")?,
            p: f.req(2, "p")?,
            trials: f.req(3, "trials")?,
            connected: f.req(4, "connected")?,
            frequency: f.req(5, "frequency")?,
        });
    }
    let n = n.unwrap_or(0);
    Ok(ThresholdScan {
        n,
        points,
        flags: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_round_trip() {
        let rec = TrialRecord {
            param: SweptParam::Rho,
            value: 0.1,
            trial: 3,
            seed: 42,
            max_l1_error: 0.25,
            mean_l1_error: 1.0 / 3.0,
            eig_error: None,
            dev_ratio: Some(0.5),
            connected: Some(true),
            diagnostics: Some(RecordDiagnostics {
                sigma_k_p: 0.9,
                lambda_k_gram: 300.0,
                lambda_1_gram: 400.0,
                pi_min: 450.5,
                theta_max: None,
                theta_min: None,
            }),
        };
        let mut buf = Vec::new();
        write_results(std::slice::from_ref(&rec), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "param,value,trial,seed,max_l1_error,mean_l1_error,eig_error,dev_ratio,connected,sigma_k_p,lambda_k_gram,lambda_1_gram,pi_min,theta_max,theta_min"
        );
        assert_eq!(lines.next().unwrap(), "rho,0.1,3,42,0.25,0.333333333333,,0.5,1,0.9,300,400,450.5,,");
        assert!(text.ends_with('\n') && !text.contains('\r'));

        let back = read_results(&buf[..]).unwrap();
        assert_eq!(back[0].mean_l1_error, 0.333333333333);
        let mut again = Vec::new();
        write_results(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn threshold_round_trip() {
        let scan = ThresholdScan {
            n: 50,
            points: vec![ThresholdPoint {
                c: 1.5,
                p: 0.1,
                trials: 4,
                connected: 3,
                frequency: 0.75,
            }],
            flags: vec![],
        };
        let mut buf = Vec::new();
        write_threshold(&scan, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "n,c,p,trials,connected,frequency\n50,1.5,0.1,4,3,0.75\n");
        assert_eq!(read_threshold(&buf[..]).unwrap(), scan);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(read_results("a,b\n1,2\n".as_bytes()).is_err());
        let bad = format!("{}\nrho,0.1,x,1,0,0,,,,,,,,,\n", RESULTS_HEADER.join(","));
        assert!(matches!(read_results(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
    }
}
