//! Experiment results and their on-disk form: a long-format CSV and a JSON manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::RunError;

/// One observation in long format.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub replication: usize,
    pub t: f64,
    pub series: &'static str,
    pub value: f64,
}

impl Row {
    pub fn new(replication: usize, t: f64, series: &'static str, value: f64) -> Self {
        Self {
            replication,
            t,
            series,
            value,
        }
    }
}

/// A statistic compared against a closed interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub passed: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lower,
            upper,
            passed: value >= lower && value <= upper,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, upper: f64) -> Self {
        Self::within(name, value, f64::NEG_INFINITY, upper)
    }

    pub fn at_least(name: impl Into<String>, value: f64, lower: f64) -> Self {
        Self::within(name, value, lower, f64::INFINITY)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    /// Supporting statistics that are not pass/fail.
    pub diagnostics: BTreeMap<String, f64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn diagnostic(&mut self, name: impl Into<String>, value: f64) {
        self.diagnostics.insert(name.into(), value);
    }
}

pub const CSV_FILE: &str = "data.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// 17 significant digits, enough to round-trip any `f64`.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(path: &Path, experiment: &str, rows: &[Row]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| RunError::Output(e.to_string()))?;
    let out = |e: csv::Error| RunError::Output(e.to_string());
    w.write_record(["experiment", "replication", "t", "series", "value"]).map_err(out)?;
    for r in rows {
        w.write_record([
            experiment,
            &r.replication.to_string(),
            &fmt_f64(r.t),
            r.series,
            &fmt_f64(r.value),
        ])
        .map_err(out)?;
    }
    w.flush().map_err(|e| RunError::Output(e.to_string()))
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    version: &'a str,
    wall_time_seconds: f64,
    passed: bool,
    config: &'a ExperimentConfig,
    derived: &'a BTreeMap<String, f64>,
    checks: &'a [Check],
    diagnostics: &'a BTreeMap<String, f64>,
    files: Vec<&'a str>,
}

/// Writes `data.csv` and `manifest.json` into `config.out`; returns the two paths.
pub fn write_outputs(
    config: &ExperimentConfig,
    derived: &BTreeMap<String, f64>,
    report: &Report,
    wall_time_seconds: f64,
) -> Result<(PathBuf, PathBuf), RunError> {
    fs::create_dir_all(&config.out)
        .map_err(|e| RunError::Output(format!("cannot create {}: {e}", config.out.display())))?;
    let csv_path = config.out.join(CSV_FILE);
    write_csv(&csv_path, config.experiment.name(), &report.rows)?;
    let manifest = Manifest {
        experiment: config.experiment.name(),
        version: env!("CARGO_PKG_VERSION"),
        wall_time_seconds,
        passed: report.passed(),
        config,
        derived,
        checks: &report.checks,
        diagnostics: &report.diagnostics,
        files: vec![CSV_FILE],
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| RunError::Output(e.to_string()))?;
    let manifest_path = config.out.join(MANIFEST_FILE);
    fs::write(&manifest_path, json + "\n")
        .map_err(|e| RunError::Output(format!("cannot write {}: {e}", manifest_path.display())))?;
    Ok((csv_path, manifest_path))
}
