//! Experiment runner for the on-off traffic simulations: configuration,
//! parallel replication and CSV/JSON output.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

pub use config::{Experiment, ExperimentConfig};
pub use report::{Check, Report, Row};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Simulation(#[from] onoff_core::Error),
    #[error("output error: {0}")]
    Output(String),
}

/// Exit status for a run that completed but failed at least one check.
pub const EXIT_CHECK_FAILED: i32 = 2;
/// Exit status for configuration, simulation and output errors.
pub const EXIT_ERROR: i32 = 1;

/// Runs the experiment, on a dedicated pool when `threads` is set.
pub fn execute(config: &ExperimentConfig) -> Result<Report, RunError> {
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Config(format!("cannot build thread pool: {e}")))?
            .install(|| experiments::execute(config)),
        None => experiments::execute(config),
    }
}

pub struct Outcome {
    pub report: Report,
    pub csv: PathBuf,
    pub manifest: PathBuf,
}

/// Executes the experiment and writes `data.csv` and `manifest.json` into `config.out`.
pub fn run(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    config.validate()?;
    let derived = experiments::derived(config)?;
    let start = Instant::now();
    let report = execute(config)?;
    let (csv, manifest) = report::write_outputs(config, &derived, &report, start.elapsed().as_secs_f64())?;
    Ok(Outcome { report, csv, manifest })
}
