//! Convergence reports, long-format CSV tables and the JSON summary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value ≤ bound`.
    AtMost,
    /// `value < bound`.
    Below,
    /// `value ≥ bound`.
    AtLeast,
    /// `value > bound`.
    Above,
}

/// One pass/fail check against a configured tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Gate {
    pub fn new(name: impl Into<String>, value: f64, comparison: Comparison, bound: f64) -> Self {
        let pass = match comparison {
            Comparison::AtMost => value <= bound,
            Comparison::Below => value < bound,
            Comparison::AtLeast => value >= bound,
            Comparison::Above => value > bound,
        };
        Self { name: name.into(), value, bound, comparison, pass }
    }

    /// `|value - target| ≤ tol`.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self::new(name, (value - target).abs(), Comparison::AtMost, tol)
    }

    /// Passes when `flag` holds; stored as `1 ≥ 1`.
    pub fn holds(name: impl Into<String>, flag: bool) -> Self {
        Self::new(name, if flag { 1.0 } else { 0.0 }, Comparison::AtLeast, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub k: usize,
    pub diagnostic: String,
    pub value: f64,
}

/// Least-squares fit `y ≈ c·x` with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub model: String,
    pub coefficient: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub weight: String,
    pub domain: String,
    pub n: usize,
    pub k_list: Vec<usize>,
    pub rows: Vec<Row>,
    pub scalars: BTreeMap<String, f64>,
    pub gates: Vec<Gate>,
    pub fit: Option<Fit>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(experiment: &str, cfg: &Config) -> Result<Self> {
        Ok(Self {
            experiment: experiment.to_string(),
            weight: cfg.weight_spec()?.to_string(),
            domain: cfg.domain_spec()?.to_string(),
            n: cfg.n()?,
            ..Self::default()
        })
    }

    pub fn push(&mut self, k: usize, diagnostic: &str, value: f64) {
        self.rows.push(Row { k, diagnostic: diagnostic.to_string(), value });
    }

    pub fn scalar(&mut self, name: &str, value: f64) {
        self.scalars.insert(name.to_string(), value);
    }

    pub fn gate(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn pass(&self) -> bool {
        self.gates.iter().all(|g| g.pass)
    }

    /// Distinct diagnostics in first-seen order.
    pub fn diagnostics(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.diagnostic.as_str()) {
                out.push(&r.diagnostic);
            }
        }
        out
    }

    /// Values of one diagnostic in `k_list` order.
    pub fn series(&self, diagnostic: &str) -> Vec<(usize, f64)> {
        self.rows.iter().filter(|r| r.diagnostic == diagnostic).map(|r| (r.k, r.value)).collect()
    }

    pub fn value(&self, k: usize, diagnostic: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.k == k && r.diagnostic == diagnostic).map(|r| r.value)
    }

    pub fn gate_named(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }
}

/// Machine and build description stored with every summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package: String,
    pub version: String,
    pub os: String,
    pub arch: String,
    pub family: String,
    pub threads: usize,
    pub debug_build: bool,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            family: std::env::consts::FAMILY.to_string(),
            threads: rayon::current_num_threads(),
            debug_build: cfg!(debug_assertions),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: bool,
    pub tolerances: BTreeMap<String, f64>,
    pub environment: Environment,
    pub reports: Vec<Report>,
}

impl Summary {
    pub fn new(reports: Vec<Report>, tolerances: BTreeMap<String, f64>) -> Self {
        Self { pass: reports.iter().all(Report::pass), tolerances, environment: Environment::current(), reports }
    }
}

/// `experiment,weight,domain,k,diagnostic,value`.
pub fn write_csv(path: &Path, report: &Report) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["experiment", "weight", "domain", "k", "diagnostic", "value"])?;
    for r in &report.rows {
        w.write_record([
            report.experiment.as_str(),
            report.weight.as_str(),
            report.domain.as_str(),
            &r.k.to_string(),
            &r.diagnostic,
            &format!("{:e}", r.value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<experiment>.csv` per report and `summary.json`; returns the
/// summary path.
pub fn emit_report(dir: &Path, reports: &[Report], tolerances: BTreeMap<String, f64>) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for r in reports {
        write_csv(&dir.join(format!("{}.csv", r.experiment)), r)?;
    }
    let summary = Summary::new(reports.to_vec(), tolerances);
    let path = dir.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary)?).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("morse", &Config::default_config()).unwrap();
        r.k_list = vec![8, 16];
        for k in [8, 16] {
            r.push(k, "a", 1.0 / k as f64);
            r.push(k, "b", k as f64);
        }
        r.scalar("total", 0.5);
        r.gate(Gate::near("g", 0.5004, 0.5, 1e-3));
        r
    }

    #[test]
    fn gate_comparisons() {
        assert!(Gate::new("x", 1.0, Comparison::AtMost, 1.0).pass);
        assert!(!Gate::new("x", 1.0, Comparison::Below, 1.0).pass);
        assert!(Gate::new("x", 1.0, Comparison::AtLeast, 1.0).pass);
        assert!(!Gate::new("x", 1.0, Comparison::Above, 1.0).pass);
        assert!(!Gate::new("x", f64::NAN, Comparison::AtMost, 1.0).pass);
        assert!(!Gate::holds("x", false).pass);
        assert!(Gate::near("x", 0.4995, 0.5, 1e-3).pass);
    }

    #[test]
    fn series_and_lookup() {
        let r = sample();
        assert_eq!(r.diagnostics(), ["a", "b"]);
        assert_eq!(r.series("b"), [(8, 8.0), (16, 16.0)]);
        assert_eq!(r.value(16, "a"), Some(0.0625));
        assert!(r.gate_named("g").unwrap().pass);
        assert!(r.pass());
    }

    #[test]
    fn emitted_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let r = sample();
        let path = emit_report(dir.path(), std::slice::from_ref(&r), Config::default_config().tolerances()).unwrap();
        let s = read_summary(&path).unwrap();
        assert!(s.pass);
        assert_eq!(s.reports, std::slice::from_ref(&r));
        let mut rd = csv::Reader::from_path(dir.path().join("morse.csv")).unwrap();
        assert_eq!(rd.headers().unwrap(), vec!["experiment", "weight", "domain", "k", "diagnostic", "value"]);
        let rows: Vec<csv::StringRecord> = rd.records().map(|x| x.unwrap()).collect();
        assert_eq!(rows.len(), r.k_list.len() * r.diagnostics().len());
        assert_eq!(rows[0][5].parse::<f64>().unwrap(), 0.125);
    }

    #[test]
    fn empty_summary_is_valid() {
        let dir = tempfile::tempdir().unwrap();
        let path = emit_report(dir.path(), &[], BTreeMap::new()).unwrap();
        let s = read_summary(&path).unwrap();
        assert!(s.pass && s.reports.is_empty());
    }
}
