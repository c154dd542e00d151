use std::path::Path;

use crate::averaging::VerdictRow;
use crate::error::{Error, Result};
use crate::ode::Trajectory;
use crate::stability::StabilityRow;

pub const STABILITY_HEADER: &str = "phi,delta,real_part,bendixson_r,class";
pub const VERDICT_HEADER: &str = "k1,k2,k3,gamma,r,lam1,lam2,lam3,verdict";

/// Formats a number with 9 significant digits, `%g` style: fixed notation for
/// moderate exponents, scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig(v: f64) -> String {
    const DIGITS: i32 = 9;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..DIGITS).contains(&exp) {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Anything that serialises to one of the declared CSV schemas.
pub trait ToCsv {
    fn header(&self) -> Vec<String>;
    fn records(&self) -> Vec<Vec<String>>;

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        // Writing into memory cannot fail.
        w.write_record(self.header()).expect("in-memory write");
        for r in self.records() {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

fn numbers<'a>(values: impl IntoIterator<Item = &'a f64>) -> Vec<String> {
    values.into_iter().map(|v| fmt_sig(*v)).collect()
}

impl ToCsv for Trajectory {
    fn header(&self) -> Vec<String> {
        self.columns().to_vec()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows().map(numbers).collect()
    }
}

impl ToCsv for [StabilityRow] {
    fn header(&self) -> Vec<String> {
        STABILITY_HEADER.split(',').map(String::from).collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                let mut rec = numbers(&[r.phi, r.discriminant, r.real_part, r.bendixson_r]);
                rec.push(r.classification.as_str().into());
                rec
            })
            .collect()
    }
}

impl ToCsv for [VerdictRow] {
    fn header(&self) -> Vec<String> {
        VERDICT_HEADER.split(',').map(String::from).collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                let p = r.point;
                let mut rec = numbers([p.k1, p.k2, p.k3, p.gamma, p.r].iter().chain(&r.eigenvalues));
                rec.push(if r.stable { "stable" } else { "unstable" }.into());
                rec
            })
            .collect()
    }
}

/// A generic named-column table (used for the map table and summaries).
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ToCsv for Table {
    fn header(&self) -> Vec<String> {
        self.header.clone()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(numbers).collect()
    }
}

pub fn write_csv<T: ToCsv + ?Sized>(data: &T, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, data.to_csv())?;
    Ok(())
}

/// Reads a trajectory CSV as written by [`write_csv`]: header row, `t` first,
/// uniformly spaced samples.
pub fn read_trajectory_csv(path: &Path) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_trajectory_csv(&text)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    let msg = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("expected {expected_len} fields, got {len}"),
        _ => e.to_string(),
    };
    Error::Parse { line, msg }
}

pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let names: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(String::from)
        .collect();
    if names.first().map(String::as_str) != Some("t") || names.len() < 2 {
        return Err(Error::Parse {
            line: 1,
            msg: "header must start with `t` and name at least one signal".into(),
        });
    }
    let mut cols = vec![Vec::new(); names.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        for (c, f) in cols.iter_mut().zip(rec.iter()) {
            c.push(f.parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("`{f}` is not a number"),
            })?);
        }
    }
    let t = &cols[0];
    if t.len() < 2 {
        return Err(Error::Parse {
            line: 2,
            msg: "need at least two samples".into(),
        });
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if !(dt > 0.0) || t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt.max(1.0)) {
        return Err(Error::Parse {
            line: 2,
            msg: "time column must be strictly increasing and uniformly spaced".into(),
        });
    }
    Trajectory::from_columns(dt, names.into_iter().zip(cols).skip(1).collect())
}
