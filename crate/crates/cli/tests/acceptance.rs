//! Acceptance gate: every criterion at its pinned tolerance, one line each.
//! Runs the full-size presets, so expect several minutes in release mode.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;

use onoff_cli::experiments::{self, icr_samples};
use onoff_cli::{run, Experiment, ExperimentConfig, Report};
use onoff_core::stats::{ecf, theta_grid};
use onoff_core::{derive_stream, StableSkewed};

const Z_BOUND: f64 = 3.0;
const DECOMPOSITION_TOLERANCE: f64 = 1e-8;
const VARIANCE_RATIO: (f64, f64) = (0.85, 1.15);
const LIMIT_VARIANCE_RATIO: (f64, f64) = (0.8, 1.2);
const ECF_TOLERANCE: f64 = 0.05;
const RESIDUAL_FRACTION: f64 = 0.1;
const KS_CRITICAL_COEFFICIENT: f64 = 1.628;
const HURST_BAND: (f64, f64) = (0.70, 0.80);
const GAUSSIAN_SKEWNESS: f64 = 0.15;
const TAIL_INDEX_BAND: (f64, f64) = (1.35, 1.65);
const STABLE_ECF_TOLERANCE: f64 = 0.02;
const STABLE_SAMPLES: u64 = 100_000;
const SEED: u64 = 20_240_611;

#[derive(Default)]
struct Gate {
    results: Vec<bool>,
}

/// One requirement inside a criterion: a statistic and its closed interval.
struct Req {
    label: String,
    value: f64,
    lower: f64,
    upper: f64,
}

impl Req {
    fn new(label: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self {
            label: label.into(),
            value,
            lower,
            upper,
        }
    }

    fn ok(&self) -> bool {
        self.value >= self.lower && self.value <= self.upper
    }
}

impl Gate {
    fn record(&mut self, name: &str, reqs: Vec<Req>) {
        let ok = !reqs.is_empty() && reqs.iter().all(Req::ok);
        let detail: Vec<String> = reqs
            .iter()
            .map(|r| {
                let mark = if r.ok() { "" } else { " (!)" };
                format!("{}={:.6} in [{}, {}]{mark}", r.label, r.value, r.lower, r.upper)
            })
            .collect();
        println!("{} {name}: {}", if ok { "PASS" } else { "FAIL" }, detail.join("; "));
        self.results.push(ok);
    }

    fn error(&mut self, name: &str, err: impl std::fmt::Display) {
        println!("FAIL {name}: error: {err}");
        self.results.push(false);
    }
}

fn value(report: &Report, check: &str) -> f64 {
    report.check(check).unwrap_or_else(|| panic!("missing check {check}")).value
}

fn preset(e: Experiment) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::preset(e);
    cfg.seed = SEED;
    cfg
}

fn z(report: &Report, check: &str) -> Req {
    Req::new(check, value(report, check), -Z_BOUND, Z_BOUND)
}

fn decomposition(gate: &mut Gate) {
    let name = "decomposition identity, 1000 paths, t in {1, 10, 100}";
    let mut cfg = preset(Experiment::Decomposition);
    cfg.replications = 1000;
    cfg.times = vec![1.0, 10.0, 100.0];
    match experiments::execute(&cfg) {
        Ok(r) => {
            let v = value(&r, "decomposition.max_scaled_discrepancy");
            gate.record(name, vec![Req::new("max |lhs-rhs|/(1+t)", v, 0.0, DECOMPOSITION_TOLERANCE)]);
        }
        Err(e) => gate.error(name, e),
    }
}

fn stationarity(gate: &mut Gate) {
    let mut cfg = preset(Experiment::Stationarity);
    cfg.replications = 100_000;
    cfg.times = vec![0.0, 10.0, 50.0, 100.0];
    match experiments::execute(&cfg) {
        Ok(r) => {
            gate.record(
                "stationarity P(on at t) = mu_on/mu, t in {0, 10, 50}, n=1e5",
                [0, 10, 50].iter().map(|t| z(&r, &format!("on_probability.z.t={t}"))).collect(),
            );
            gate.record(
                "mean renewal count E N(t) = t/mu, t in {10, 100}, n=1e5",
                [10, 100].iter().map(|t| z(&r, &format!("mean_count.z.t={t}"))).collect(),
            );
        }
        Err(e) => {
            gate.error("stationarity", &e);
            gate.error("mean renewal count", e);
        }
    }
}

fn variance_asymptotics(gate: &mut Gate) {
    let mut cfg = preset(Experiment::VarianceAsymptotics);
    cfg.replications = 20_000;
    cfg.times = vec![5000.0];
    let (lo, hi) = VARIANCE_RATIO;
    match experiments::execute(&cfg) {
        Ok(r) => {
            let c = "count.variance_ratio.t=5000";
            gate.record("Var N(t) ~ sigma^2 t^1.5 / mu^3 at t=5000", vec![Req::new(c, value(&r, c), lo, hi)]);
            let w = "workload.variance_ratio.t=5000";
            gate.record(
                "Var W(t) ~ sigma^2 mu_on^2 t^1.5 / mu^3 at t=5000",
                vec![Req::new(w, value(&r, w), lo, hi)],
            );
        }
        Err(e) => {
            gate.error("Var N(t) asymptotics", &e);
            gate.error("Var W(t) asymptotics", e);
        }
    }
}

fn fpm(gate: &mut Gate) {
    let name = "fractional Poisson motion moments, gamma=1.5, eps=1e-6, n=1e4";
    let mut cfg = preset(Experiment::FpmCheck);
    cfg.replications = 10_000;
    cfg.times = vec![1.0, 2.0];
    cfg.epsilon = 1e-6;
    match experiments::execute(&cfg) {
        Ok(r) => gate.record(
            name,
            vec![
                z(&r, "mean_z.t=1"),
                z(&r, "variance_z.t=1"),
                z(&r, "covariance_z.s=1.t=2"),
                Req::new("refinement.excess_z", value(&r, "refinement.excess_z"), f64::NEG_INFINITY, Z_BOUND),
            ],
        ),
        Err(e) => gate.error(name, e),
    }
}

fn intermediate_regime(gate: &mut Gate) {
    let counts = "ICR counts -> -(sigma/mu) P_H at t=1 (m=525, a=1e4)";
    let workload = "ICR workload -> sigma (mu_off/mu) P_H at t in {0.5, 1}";
    let residual = "ICR residual Var(W + mu_off N) <= 10% of Var(mu_off N) at t=1";
    let mut cfg = preset(Experiment::IcrConverge);
    cfg.m = 525;
    cfg.c = Some(1.0);
    cfg.times = vec![0.5, 1.0];
    let s = match icr_samples(&cfg) {
        Ok(s) => s,
        Err(e) => {
            for name in [counts, workload, residual] {
                gate.error(name, &e);
            }
            return;
        }
    };
    let (lo, hi) = LIMIT_VARIANCE_RATIO;
    match s.count_checks() {
        Ok(checks) => {
            let find = |n: &str| checks.iter().find(|c| c.name == n).expect("count check").value;
            gate.record(
                counts,
                vec![
                    Req::new("mean_z", find("count.mean_z.t=1"), -Z_BOUND, Z_BOUND),
                    Req::new("variance_ratio", find("count.variance_ratio.t=1"), lo, hi),
                    Req::new("ecf_distance", find("count.ecf_distance.t=1"), 0.0, ECF_TOLERANCE),
                ],
            );
        }
        Err(e) => gate.error(counts, e),
    }
    match s.workload_checks() {
        Ok(checks) => {
            let find = |n: &str| checks.iter().find(|c| c.name == n).expect("workload check").value;
            gate.record(
                workload,
                vec![
                    Req::new("variance_ratio(0.5)", find("workload.variance_ratio.t=0.5"), lo, hi),
                    Req::new("variance_ratio(1)", find("workload.variance_ratio.t=1"), lo, hi),
                    Req::new("ecf_distance(0.5)", find("workload.ecf_distance.t=0.5"), 0.0, ECF_TOLERANCE),
                    Req::new("ecf_distance(1)", find("workload.ecf_distance.t=1"), 0.0, ECF_TOLERANCE),
                    Req::new("skewness_sign_agreement", find("workload.skewness_sign_agreement.t=1"), 1.0, 1.0),
                ],
            );
        }
        Err(e) => gate.error(workload, e),
    }
    gate.record(residual, vec![Req::new("variance_fraction", s.residual_fraction(), 0.0, RESIDUAL_FRACTION)]);
}

fn aggregate_similarity(gate: &mut Gate) {
    let name = "aggregate similarity 4 P_H(1/4) = P_H(1) + P_H'(1), KS at 1%, n=1e4 per side";
    let mut cfg = preset(Experiment::AggregateSimilarity);
    cfg.m = 2;
    cfg.replications = 10_000;
    let critical = KS_CRITICAL_COEFFICIENT * (2.0 / 10_000.0f64).sqrt();
    match experiments::execute(&cfg) {
        Ok(r) => gate.record(name, vec![Req::new("ks", value(&r, "ks_statistic.t=1"), 0.0, critical)]),
        Err(e) => gate.error(name, e),
    }
}

fn bridge(gate: &mut Gate) {
    let name = "bridge c^H P_H(1/c), c in {1, 10, 100}: |skewness| decreasing, variance 1";
    let mut cfg = preset(Experiment::Bridge);
    cfg.scales = vec![1.0, 10.0, 100.0];
    cfg.replications = 10_000;
    match experiments::execute(&cfg) {
        Ok(r) => {
            let skew: Vec<f64> = cfg.scales.iter().map(|c| r.diagnostics[&format!("skewness.c={c}")].abs()).collect();
            let decreasing = skew.windows(2).all(|w| w[1] < w[0]);
            let mut reqs = vec![Req::new("abs_skewness_strictly_decreasing", decreasing as u8 as f64, 1.0, 1.0)];
            reqs.extend(cfg.scales.iter().map(|c| z(&r, &format!("variance_z.c={c}"))));
            gate.record(name, reqs);
        }
        Err(e) => gate.error(name, e),
    }
}

fn fast_regime(gate: &mut Gate) {
    let name = "FCR workload (m=1e4, a=1e2): Hurst index and near-Gaussian marginal";
    let mut cfg = preset(Experiment::FcrHurst);
    cfg.m = 10_000;
    cfg.a = Some(100.0);
    match experiments::execute(&cfg) {
        Ok(r) => {
            let (lo, hi) = HURST_BAND;
            gate.record(
                name,
                vec![
                    Req::new("hurst", value(&r, "hurst.variance_time"), lo, hi),
                    Req::new("abs_skewness(1)", value(&r, "marginal.abs_skewness.t=1"), 0.0, GAUSSIAN_SKEWNESS),
                ],
            );
        }
        Err(e) => gate.error(name, e),
    }
}

fn slow_regime(gate: &mut Gate) {
    let name = "SCR workload (m=10, a=1e4): Hill index of the positive part at t=1, n=1e4";
    let mut cfg = preset(Experiment::ScrTail);
    cfg.m = 10;
    cfg.a = Some(1e4);
    cfg.replications = 10_000;
    match experiments::execute(&cfg) {
        Ok(r) => {
            let (lo, hi) = TAIL_INDEX_BAND;
            gate.record(name, vec![Req::new("hill", value(&r, "hill_index.t=1"), lo, hi)]);
        }
        Err(e) => gate.error(name, e),
    }
}

fn stable_sampler(gate: &mut Gate) {
    let name = "skewed stable sampler alpha=1.5: ECF vs closed form, n=1e5";
    let alpha = 1.5;
    let stable = StableSkewed::new(alpha).expect("valid index");
    let mut rng = derive_stream(SEED, 0);
    let xs: Vec<f64> = (0..STABLE_SAMPLES).map(|_| stable.sample(&mut rng)).collect();
    let thetas = theta_grid();
    let empirical = ecf(&xs, &thetas).expect("nonempty");
    let tan = (FRAC_PI_2 * alpha).tan();
    let worst = thetas
        .iter()
        .zip(&empirical)
        .map(|(&th, e)| {
            let r = th.abs().powf(alpha);
            let modulus = (-r).exp();
            let phase = r * tan * th.signum();
            (e.re - modulus * phase.cos()).hypot(e.im - modulus * phase.sin())
        })
        .fold(0.0, f64::max);
    gate.record(name, vec![Req::new("max ecf distance", worst, 0.0, STABLE_ECF_TOLERANCE)]);
}

fn determinism(gate: &mut Gate) {
    let name = "determinism: identical CSV on rerun and across thread counts";
    let dir = tempfile::tempdir().expect("temp dir");
    let mut cfg = preset(Experiment::Decomposition);
    cfg.replications = 300;
    let mut bytes = Vec::new();
    let mut passes = Vec::new();
    for (k, threads) in [Some(1), Some(1), Some(4), None].into_iter().enumerate() {
        cfg.threads = threads;
        cfg.out = dir.path().join(format!("run{k}"));
        match run(&cfg) {
            Ok(outcome) => {
                bytes.push(std::fs::read(&outcome.csv).expect("csv written"));
                passes.push(outcome.report.checks);
            }
            Err(e) => return gate.error(name, e),
        }
    }
    let same_csv = bytes.windows(2).all(|w| w[0] == w[1]);
    let same_stats = passes.windows(2).all(|w| w[0] == w[1]);
    gate.record(
        name,
        vec![
            Req::new("identical_csv", same_csv as u8 as f64, 1.0, 1.0),
            Req::new("identical_statistics", same_stats as u8 as f64, 1.0, 1.0),
        ],
    );
}

fn main() -> ExitCode {
    let mut gate = Gate::default();
    decomposition(&mut gate);
    stationarity(&mut gate);
    variance_asymptotics(&mut gate);
    fpm(&mut gate);
    intermediate_regime(&mut gate);
    aggregate_similarity(&mut gate);
    bridge(&mut gate);
    fast_regime(&mut gate);
    slow_regime(&mut gate);
    stable_sampler(&mut gate);
    determinism(&mut gate);
    let failed = gate.results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} of {} criteria passed", gate.results.len() - failed, gate.results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
