//! Result rows and their CSV / JSON renderings.
//!
//! CSV columns are `experiment`, then `param:*`, `metric:*` and `cert:*`,
//! each group sorted by name. A column missing from a row is left empty.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use ballspace_core::Certificate;
use serde::Serialize;

use crate::error::{CliError, Result};

/// An input parameter of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Param {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Param {
    fn rank(&self) -> u8 {
        match self {
            Param::Int(_) | Param::Real(_) => 0,
            Param::Text(_) => 1,
        }
    }

    fn as_f64(&self) -> Option<f64> {
        match *self {
            Param::Int(i) => Some(i as f64),
            Param::Real(x) => Some(x),
            Param::Text(_) => None,
        }
    }

    fn total_cmp(&self, other: &Param) -> Ordering {
        match (self, other) {
            (Param::Text(a), Param::Text(b)) => a.cmp(b),
            _ => match (self.as_f64(), other.as_f64()) {
                (Some(a), Some(b)) => a.total_cmp(&b),
                _ => self.rank().cmp(&other.rank()),
            },
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Int(i) => write!(f, "{i}"),
            Param::Real(x) => f.write_str(&format_real(*x)),
            Param::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Param {
    fn from(x: f64) -> Self {
        Param::Real(x)
    }
}

impl From<i64> for Param {
    fn from(i: i64) -> Self {
        Param::Int(i)
    }
}

impl From<usize> for Param {
    fn from(i: usize) -> Self {
        Param::Int(i as i64)
    }
}

impl From<&str> for Param {
    fn from(s: &str) -> Self {
        Param::Text(s.to_string())
    }
}

impl From<String> for Param {
    fn from(s: String) -> Self {
        Param::Text(s)
    }
}

/// Shortest round-trip decimal, switching to exponent form for very small or
/// very large magnitudes.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub inputs: BTreeMap<String, Param>,
    pub metrics: BTreeMap<String, f64>,
    pub certificates: BTreeMap<String, String>,
}

impl ResultRow {
    pub fn new(experiment: &str) -> Self {
        ResultRow {
            experiment: experiment.to_string(),
            inputs: BTreeMap::new(),
            metrics: BTreeMap::new(),
            certificates: BTreeMap::new(),
        }
    }

    pub fn param(mut self, name: &str, value: impl Into<Param>) -> Self {
        self.inputs.insert(name.to_string(), value.into());
        self
    }

    /// Adds a metric with its certificate. Non-finite values are rejected.
    pub fn metric(&mut self, name: &str, value: f64, cert: Certificate) -> Result<()> {
        if !value.is_finite() {
            return Err(CliError::Numerical(format!(
                "{}: metric {name} is not finite ({value})",
                self.experiment
            )));
        }
        self.metrics.insert(name.to_string(), value);
        self.certificates.insert(name.to_string(), cert.as_str().to_string());
        Ok(())
    }

    pub fn get(&self, name: &str) -> f64 {
        self.metrics[name]
    }

    fn sort_key_cmp(&self, other: &ResultRow) -> Ordering {
        self.experiment.cmp(&other.experiment).then_with(|| {
            let a = self.inputs.iter();
            let b = other.inputs.iter();
            for ((ka, va), (kb, vb)) in a.zip(b) {
                let o = ka.cmp(kb).then_with(|| va.total_cmp(vb));
                if o != Ordering::Equal {
                    return o;
                }
            }
            self.inputs.len().cmp(&other.inputs.len())
        })
    }
}

/// Sorts rows by experiment name, then by parameters.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| a.sort_key_cmp(b));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn render(rows: &[ResultRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(to_csv(rows)),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut params = BTreeSet::new();
    let mut metrics = BTreeSet::new();
    for r in rows {
        params.extend(r.inputs.keys().cloned());
        metrics.extend(r.metrics.keys().cloned());
    }
    let mut header = vec!["experiment".to_string()];
    header.extend(params.iter().map(|p| format!("param:{p}")));
    header.extend(metrics.iter().map(|m| format!("metric:{m}")));
    header.extend(metrics.iter().map(|m| format!("cert:{m}")));
    let mut out = String::new();
    let line = |cells: Vec<String>| {
        cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",") + "\n"
    };
    out.push_str(&line(header));
    for r in rows {
        let mut cells = vec![r.experiment.clone()];
        cells.extend(params.iter().map(|p| r.inputs.get(p).map(|v| v.to_string()).unwrap_or_default()));
        cells.extend(metrics.iter().map(|m| r.metrics.get(m).map(|&v| format_real(v)).unwrap_or_default()));
        cells.extend(metrics.iter().map(|m| r.certificates.get(m).cloned().unwrap_or_default()));
        out.push_str(&line(cells));
    }
    out
}
