//! Experiment configuration: per-experiment presets, TOML loading and
//! command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use onoff_core::aggregate::{icr_scale, DEFAULT_SEGMENT_BUDGET};
use onoff_core::limits::{FpmPrecision, DEFAULT_POINT_BUDGET};
use onoff_core::SourceParams;
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Decomposition,
    Stationarity,
    VarianceAsymptotics,
    IcrConverge,
    GkConverge,
    FpmCheck,
    RegimeTable,
    AggregateSimilarity,
    Bridge,
    FcrHurst,
    ScrTail,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::Decomposition,
        Experiment::Stationarity,
        Experiment::VarianceAsymptotics,
        Experiment::IcrConverge,
        Experiment::GkConverge,
        Experiment::FpmCheck,
        Experiment::RegimeTable,
        Experiment::AggregateSimilarity,
        Experiment::Bridge,
        Experiment::FcrHurst,
        Experiment::ScrTail,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Decomposition => "decomposition",
            Experiment::Stationarity => "stationarity",
            Experiment::VarianceAsymptotics => "variance-asymptotics",
            Experiment::IcrConverge => "icr-converge",
            Experiment::GkConverge => "gk-converge",
            Experiment::FpmCheck => "fpm-check",
            Experiment::RegimeTable => "regime-table",
            Experiment::AggregateSimilarity => "aggregate-similarity",
            Experiment::Bridge => "bridge",
            Experiment::FcrHurst => "fcr-hurst",
            Experiment::ScrTail => "scr-tail",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| RunError::Config(format!("unknown experiment `{s}`")))
    }
}

/// Full description of one run. Every field is echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: SourceParams,
    /// Number of superposed sources.
    pub m: usize,
    /// Intermediate-regime constant; when set, the time scale is derived from it.
    pub c: Option<f64>,
    /// Time scale, used when `c` is absent.
    pub a: Option<f64>,
    /// Evaluation times (experiment-dependent meaning).
    pub times: Vec<f64>,
    pub t_max: f64,
    pub points: usize,
    pub replications: usize,
    /// Draws of the limit law used as a reference sample or for a marginal check.
    pub reference_samples: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub max_segment_budget: f64,
    pub epsilon: f64,
    pub point_budget: f64,
    /// Coarse truncation used by the refinement check of `fpm-check`.
    pub coarse_epsilon: f64,
    /// Dilation constants of the `bridge` experiment.
    pub scales: Vec<f64>,
    /// Fraction of the positive sample used as the Hill order `k`.
    pub hill_fraction: f64,
}

impl ExperimentConfig {
    /// Defaults for `experiment`, sized to run in minutes on one core.
    pub fn preset(experiment: Experiment) -> Self {
        let mut cfg = Self {
            experiment,
            params: SourceParams::standard(),
            m: 1,
            c: None,
            a: None,
            times: vec![1.0],
            t_max: 1.0,
            points: 2,
            replications: 1000,
            reference_samples: 0,
            seed: 20_240_611,
            out: PathBuf::from("runs").join(experiment.name()),
            threads: None,
            max_segment_budget: DEFAULT_SEGMENT_BUDGET,
            epsilon: FpmPrecision::default().epsilon,
            point_budget: DEFAULT_POINT_BUDGET,
            coarse_epsilon: 1e-2,
            scales: vec![1.0, 10.0, 100.0],
            hill_fraction: 0.1,
        };
        match experiment {
            Experiment::Decomposition => {
                cfg.times = vec![1.0, 10.0, 100.0];
                cfg.t_max = 100.0;
            }
            Experiment::Stationarity => {
                cfg.times = vec![0.0, 10.0, 50.0, 100.0];
                cfg.t_max = 100.0;
                cfg.replications = 100_000;
            }
            Experiment::VarianceAsymptotics => {
                cfg.times = vec![5000.0];
                cfg.t_max = 5000.0;
                cfg.replications = 20_000;
            }
            Experiment::IcrConverge | Experiment::GkConverge => {
                cfg.m = 525;
                cfg.c = Some(1.0);
                cfg.times = vec![0.5, 1.0];
                cfg.replications = 4000;
                cfg.reference_samples = 20_000;
            }
            Experiment::FpmCheck => {
                cfg.times = vec![1.0, 2.0];
                cfg.t_max = 2.0;
                cfg.replications = 10_000;
            }
            Experiment::RegimeTable => {
                cfg.m = 1000;
                cfg.a = Some(1e4);
                cfg.replications = 1;
            }
            Experiment::AggregateSimilarity => {
                cfg.m = 2;
                cfg.replications = 10_000;
            }
            Experiment::Bridge => {
                cfg.replications = 10_000;
            }
            Experiment::FcrHurst => {
                cfg.m = 10_000;
                cfg.a = Some(100.0);
                cfg.t_max = 128.0;
                cfg.points = 1025;
                cfg.replications = 16;
                cfg.reference_samples = 4000;
            }
            Experiment::ScrTail => {
                cfg.m = 10;
                cfg.a = Some(1e4);
                cfg.replications = 10_000;
            }
        }
        cfg
    }

    /// Reads a TOML file over the preset of the experiment it names (or of
    /// `fallback` when it names none).
    pub fn from_toml_str(text: &str, fallback: Option<Experiment>) -> Result<Self, RunError> {
        let file: toml::Table = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        let experiment = match (fallback, file.get("experiment")) {
            (Some(e), _) => e,
            (None, Some(toml::Value::String(s))) => s.parse()?,
            (None, Some(_)) => return Err(RunError::Config("`experiment` must be a string".into())),
            (None, None) => return Err(RunError::Config("config names no experiment".into())),
        };
        let mut merged = toml::Table::try_from(Self::preset(experiment))
            .map_err(|e| RunError::Config(e.to_string()))?;
        for (key, value) in file {
            let slot = merged.entry(key).or_insert(toml::Value::Table(Default::default()));
            merge(slot, value);
        }
        merged.insert("experiment".into(), toml::Value::String(experiment.name().into()));
        let cfg: Self = merged.try_into().map_err(|e: toml::de::Error| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path, fallback: Option<Experiment>) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text, fallback)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let fail = |msg: String| Err(RunError::Config(msg));
        if self.replications < 1 {
            return fail("replications must be >= 1".into());
        }
        if self.points < 2 {
            return fail(format!("grid needs at least 2 points, got {}", self.points));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return fail(format!("t_max must be finite and > 0, got {}", self.t_max));
        }
        if self.m < 1 {
            return fail("m must be >= 1".into());
        }
        if self.times.is_empty() || self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return fail("times must be a nonempty list of finite nonnegative values".into());
        }
        if self.times.windows(2).any(|w| w[0] >= w[1]) {
            return fail("times must be strictly increasing".into());
        }
        if let Some(0) = self.threads {
            return fail("threads must be >= 1".into());
        }
        if !(self.epsilon > 0.0 && self.coarse_epsilon > self.epsilon) {
            return fail("need 0 < epsilon < coarse_epsilon".into());
        }
        if !(self.hill_fraction > 0.0 && self.hill_fraction < 1.0) {
            return fail("hill_fraction must lie in (0, 1)".into());
        }
        if self.scales.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return fail("scales must be finite and > 0".into());
        }
        if !(self.max_segment_budget > 0.0) {
            return fail("max_segment_budget must be > 0".into());
        }
        if let (None, None) = (self.c, self.a) {
            if self.uses_time_scale() {
                return fail(format!("{} needs `c` or `a`", self.experiment));
            }
        }
        Ok(())
    }

    fn uses_time_scale(&self) -> bool {
        matches!(
            self.experiment,
            Experiment::IcrConverge
                | Experiment::GkConverge
                | Experiment::RegimeTable
                | Experiment::FcrHurst
                | Experiment::ScrTail
        )
    }

    /// The time scale: derived from `c` when given, else `a`.
    pub fn time_scale(&self) -> Result<f64, RunError> {
        match (self.c, self.a) {
            (Some(c), _) => Ok(icr_scale(self.m, c, &self.params)?),
            (None, Some(a)) => Ok(a),
            (None, None) => Err(RunError::Config("neither `c` nor `a` given".into())),
        }
    }

    pub fn precision(&self) -> FpmPrecision {
        FpmPrecision {
            epsilon: self.epsilon,
            point_budget: self.point_budget,
        }
    }
}

fn merge(slot: &mut toml::Value, value: toml::Value) {
    match (slot, value) {
        (toml::Value::Table(base), toml::Value::Table(over)) => {
            for (k, v) in over {
                let inner = base.entry(k).or_insert(toml::Value::Table(Default::default()));
                merge(inner, v);
            }
        }
        (slot, value) => *slot = value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for e in Experiment::ALL {
            ExperimentConfig::preset(e).validate().unwrap();
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("nope".parse::<Experiment>().is_err());
    }

    #[test]
    fn file_overrides_preset() {
        let cfg = ExperimentConfig::from_toml_str(
            "experiment = \"scr-tail\"\nreplications = 7\n[params.off]\nalpha = 1.9\n",
            None,
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::ScrTail);
        assert_eq!(cfg.replications, 7);
        assert_eq!(cfg.params.off().alpha(), 1.9);
        assert_eq!(cfg.params.off().scale(), 1.0);
        assert_eq!(cfg.m, 10);
    }

    #[test]
    fn bad_files_are_config_errors() {
        for text in [
            "experiment = \"nope\"",
            "replications = 3",
            "experiment = \"bridge\"\nreplications = 0",
            "experiment = \"bridge\"\npoints = 1",
            "experiment = \"bridge\"\nunknown_field = 1",
            "experiment = \"bridge\"\n[params.on]\nalpha = 1.9",
        ] {
            assert!(matches!(ExperimentConfig::from_toml_str(text, None), Err(RunError::Config(_))), "{text}");
        }
    }

    #[test]
    fn icr_time_scale_from_c() {
        let cfg = ExperimentConfig::preset(Experiment::IcrConverge);
        assert!((cfg.time_scale().unwrap() / 1e4 - 1.0).abs() < 1e-12);
    }
}
