//! The experiments. Each turns a validated config into rows, checks and
//! diagnostics; nothing here touches the filesystem.

use std::collections::BTreeMap;

use onoff_core::aggregate::{expected_cycles, fcr_normalization, superpose};
use onoff_core::heavytail::scr_normalization;
use onoff_core::limits::{
    aggregate_similarity_constant, aggregate_similarity_pair, fpm_covariance, hurst_of, sample_bridge,
    sample_fpm, sample_fpm_refinement, sigma_gamma, sigma_zero,
};
use onoff_core::stats::{
    covariance, ecf_distance, hill_tail_index, hurst_variance_time, ks_critical_1pct, ks_two_sample, mean,
    skewness, theta_grid, variance, MCEstimate,
};
use onoff_core::{
    derive_stream, BridgeMode, Error, FpmConfig, Grid, OnOffPath, PathKind, Regime, RegimeSpec, SourceParams,
    Stream,
};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::report::{Check, Report, Row};
use crate::RunError;

/// Runs `work(i, stream)` for `i` in `0..n` on the streams `base + i` of the
/// master seed, in parallel, returning results in index order.
fn par<T, F>(cfg: &ExperimentConfig, base: u64, n: usize, work: F) -> Result<Vec<T>, RunError>
where
    T: Send,
    F: Fn(usize, &mut Stream) -> Result<T, Error> + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| work(i, &mut derive_stream(cfg.seed, base + i as u64)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(RunError::from)
}

/// Stream-index offsets keeping independent sample families apart.
const REFERENCE_STREAMS: u64 = 1 << 40;
const FAMILY_STRIDE: u64 = 1 << 32;

/// Smallest uniform grid on `[0, max(times)]` through every time in `times`.
pub fn grid_through(times: &[f64]) -> Result<Grid, RunError> {
    let t_max = times.iter().copied().fold(0.0, f64::max);
    if t_max <= 0.0 {
        return Err(RunError::Config("need a positive evaluation time".into()));
    }
    for intervals in 1..=4096usize {
        let dt = t_max / intervals as f64;
        let fits = times.iter().all(|t| {
            let k = t / dt;
            (k - k.round()).abs() < 1e-9 * intervals as f64
        });
        if fits {
            return Ok(Grid::new(t_max, intervals + 1)?);
        }
    }
    Err(RunError::Config(format!("times {times:?} do not fit a uniform grid of at most 4096 intervals")))
}

fn at(path_values: &[f64], grid: &Grid, t: f64) -> f64 {
    path_values[grid.index_of(t).expect("time lies on the grid")]
}

fn last_time(cfg: &ExperimentConfig) -> f64 {
    *cfg.times.last().expect("validated nonempty")
}

fn gamma(cfg: &ExperimentConfig) -> f64 {
    cfg.params.on().alpha()
}

fn z_score(xs: &[f64], target: f64) -> Result<f64, RunError> {
    let est = MCEstimate::from_samples(xs, 0)?;
    Ok((est.mean - target) / est.std_error)
}

fn check_budget(cfg: &ExperimentConfig, a: f64, t_max: f64, replications: usize) -> Result<f64, RunError> {
    let expected = expected_cycles(&cfg.params, cfg.m, a, t_max) * replications as f64;
    if expected > cfg.max_segment_budget {
        return Err(Error::BudgetExceeded {
            expected,
            budget: cfg.max_segment_budget,
        }
        .into());
    }
    Ok(expected)
}

/// Closed-form constants echoed into the manifest.
pub fn derived(cfg: &ExperimentConfig) -> Result<BTreeMap<String, f64>, RunError> {
    let p = &cfg.params;
    let g = gamma(cfg);
    let mut d = BTreeMap::new();
    d.insert("mu_on".into(), p.mu_on());
    d.insert("mu_off".into(), p.mu_off());
    d.insert("mu".into(), p.mu());
    d.insert("p_on".into(), p.p_on());
    d.insert("hurst".into(), hurst_of(g));
    d.insert("sigma_gamma".into(), sigma_gamma(g)?);
    d.insert("sigma_zero".into(), sigma_zero(g)?);
    let fpm = cfg.precision().config(g, cfg.t_max)?;
    d.insert("epsilon".into(), fpm.epsilon());
    d.insert("region_mass".into(), fpm.region_mass());
    d.insert("compensator_mass".into(), fpm.compensator_mass());
    d.insert("truncation_variance".into(), fpm.error_variance());
    d.insert("exact_cutoff".into(), fpm.exact_cutoff());
    if cfg.c.is_some() || cfg.a.is_some() {
        let a = cfg.time_scale()?;
        let m = cfg.m as f64;
        d.insert("a".into(), a);
        d.insert("fcr_normalization".into(), fcr_normalization(p.on(), a, m));
        d.insert("scr_normalization".into(), scr_normalization(p.on(), a, m));
        d.insert("expected_cycles_per_replication".into(), expected_cycles(p, cfg.m, a, cfg.t_max));
    }
    Ok(d)
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Decomposition => decomposition(cfg),
        Experiment::Stationarity => stationarity(cfg),
        Experiment::VarianceAsymptotics => variance_asymptotics(cfg),
        Experiment::IcrConverge => {
            let s = icr_samples(cfg)?;
            let mut report = s.rows();
            report.checks.extend(s.workload_checks()?);
            report.checks.push(s.residual_check());
            s.add_diagnostics(&mut report)?;
            Ok(report)
        }
        Experiment::GkConverge => {
            let s = icr_samples(cfg)?;
            let mut report = s.rows();
            report.checks.extend(s.count_checks()?);
            s.add_diagnostics(&mut report)?;
            Ok(report)
        }
        Experiment::FpmCheck => fpm_check(cfg),
        Experiment::RegimeTable => regime_table(cfg),
        Experiment::AggregateSimilarity => aggregate_similarity(cfg),
        Experiment::Bridge => bridge(cfg),
        Experiment::FcrHurst => fcr_hurst(cfg),
        Experiment::ScrTail => scr_tail(cfg),
    }
}

/// Largest scaled discrepancy `|lhs - rhs| / (1 + t)` allowed.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-8;

fn decomposition(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let horizon = last_time(cfg);
    let per_rep = par(cfg, 0, cfg.replications, |_, rng| {
        let path = OnOffPath::generate(&cfg.params, horizon, rng)?;
        cfg.times.iter().map(|&t| path.decomposition_terms(&cfg.params, t)).collect::<Result<Vec<_>, _>>()
    })?;
    let mut report = Report::default();
    let mut worst: f64 = 0.0;
    for (i, terms) in per_rep.iter().enumerate() {
        for (d, &t) in terms.iter().zip(&cfg.times) {
            worst = worst.max(d.discrepancy() / (1.0 + t));
            report.rows.extend([
                Row::new(i, t, "lhs", d.lhs),
                Row::new(i, t, "count_term", d.count_term),
                Row::new(i, t, "ysum_term", d.ysum_term),
                Row::new(i, t, "remainder", d.remainder),
            ]);
        }
    }
    report.checks.push(Check::at_most("decomposition.max_scaled_discrepancy", worst, DECOMPOSITION_TOLERANCE));
    Ok(report)
}

fn stationarity(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let horizon = last_time(cfg).max(f64::MIN_POSITIVE);
    let per_rep = par(cfg, 0, cfg.replications, |_, rng| {
        let path = OnOffPath::generate(&cfg.params, horizon, rng)?;
        cfg.times
            .iter()
            .map(|&t| Ok((path.is_on(t)? as u8 as f64, path.renewal_count(t)? as f64)))
            .collect::<Result<Vec<_>, Error>>()
    })?;
    let mut report = Report::default();
    for (i, obs) in per_rep.iter().enumerate() {
        for ((on, n), &t) in obs.iter().zip(&cfg.times) {
            report.rows.push(Row::new(i, t, "on", *on));
            report.rows.push(Row::new(i, t, "count", *n));
        }
    }
    for (j, &t) in cfg.times.iter().enumerate() {
        let on: Vec<f64> = per_rep.iter().map(|o| o[j].0).collect();
        report.checks.push(Check::within(format!("on_probability.z.t={t}"), z_score(&on, cfg.params.p_on())?, -3.0, 3.0));
        report.diagnostic(format!("on_probability.t={t}"), mean(&on));
        if t > 0.0 {
            let n: Vec<f64> = per_rep.iter().map(|o| o[j].1).collect();
            report.checks.push(Check::within(format!("mean_count.z.t={t}"), z_score(&n, t / cfg.params.mu())?, -3.0, 3.0));
            report.diagnostic(format!("mean_count.t={t}"), mean(&n));
        }
    }
    Ok(report)
}

pub const VARIANCE_RATIO_BAND: (f64, f64) = (0.85, 1.15);

fn variance_asymptotics(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let p = &cfg.params;
    let horizon = last_time(cfg);
    let per_rep = par(cfg, 0, cfg.replications, |_, rng| {
        let path = OnOffPath::generate(p, horizon, rng)?;
        cfg.times
            .iter()
            .map(|&t| Ok((path.renewal_count(t)? as f64, path.workload_at(t)?)))
            .collect::<Result<Vec<_>, Error>>()
    })?;
    let mut report = Report::default();
    for (i, obs) in per_rep.iter().enumerate() {
        for ((n, w), &t) in obs.iter().zip(&cfg.times) {
            report.rows.push(Row::new(i, t, "count", *n));
            report.rows.push(Row::new(i, t, "workload", *w));
        }
    }
    let g = gamma(cfg);
    let s2 = sigma_gamma(g)?.powi(2);
    let (lo, hi) = VARIANCE_RATIO_BAND;
    for (j, &t) in cfg.times.iter().enumerate() {
        let n: Vec<f64> = per_rep.iter().map(|o| o[j].0).collect();
        let w: Vec<f64> = per_rep.iter().map(|o| o[j].1).collect();
        let base = s2 * t.powf(g) / p.mu().powi(3);
        let count_ratio = variance(&n) / base;
        let workload_ratio = variance(&w) / (base * p.mu_on().powi(2));
        report.checks.push(Check::within(format!("count.variance_ratio.t={t}"), count_ratio, lo, hi));
        report.checks.push(Check::within(format!("workload.variance_ratio.t={t}"), workload_ratio, lo, hi));
        report.diagnostic(format!("count.variance_ratio.std_error.t={t}"), MCEstimate::variance_std_error(&n) / base);
        report.diagnostic(
            format!("workload.variance_ratio.std_error.t={t}"),
            MCEstimate::variance_std_error(&w) / (base * p.mu_on().powi(2)),
        );
        report.diagnostic(
            format!("workload.variance_ratio_mu_off.t={t}"),
            variance(&w) / (base * p.mu_off().powi(2)),
        );
    }
    Ok(report)
}

pub const LIMIT_VARIANCE_BAND: (f64, f64) = (0.8, 1.2);
pub const ECF_TOLERANCE: f64 = 0.05;
pub const RESIDUAL_FRACTION: f64 = 0.1;

/// Scaled aggregate workload and counts in the intermediate regime, with a
/// reference sample of the fractional Poisson limit on the same times.
pub struct IcrSamples {
    pub params: SourceParams,
    pub spec: RegimeSpec,
    pub times: Vec<f64>,
    pub sigma: f64,
    pub hurst: f64,
    /// `workload[k][i]`: replication `i` at `times[k]`.
    pub workload: Vec<Vec<f64>>,
    pub count: Vec<Vec<f64>>,
    /// Draws of the standard fractional Poisson motion at `times`.
    pub limit: Vec<Vec<f64>>,
}

pub fn icr_samples(cfg: &ExperimentConfig) -> Result<IcrSamples, RunError> {
    let p = cfg.params;
    let a = cfg.time_scale()?;
    let spec = match cfg.c {
        Some(c) => RegimeSpec::icr(&p, cfg.m, c)?,
        None => RegimeSpec {
            regime: Regime::Icr,
            m: cfg.m,
            a,
            c: None,
            normalization: a,
        },
    };
    let grid = grid_through(&cfg.times)?;
    check_budget(cfg, a, grid.t_max(), cfg.replications)?;
    if cfg.reference_samples < 2 {
        return Err(RunError::Config("reference_samples must be >= 2".into()));
    }
    let paths = par(cfg, 0, cfg.replications, |_, rng| {
        let s = superpose(&p, cfg.m, a, &grid, rng, cfg.max_segment_budget)?;
        let w = s.rescaled(&spec, PathKind::Workload)?;
        let n = s.rescaled(&spec, PathKind::Count)?;
        Ok(cfg.times.iter().map(|&t| (at(&w.values, &grid, t), at(&n.values, &grid, t))).collect::<Vec<_>>())
    })?;
    let g = gamma(cfg);
    let fpm = cfg.precision().config(g, grid.t_max())?;
    let limit_paths = par(cfg, REFERENCE_STREAMS, cfg.reference_samples, |_, rng| {
        let path = sample_fpm(&fpm, &grid, rng)?;
        Ok(cfg.times.iter().map(|&t| at(&path.values, &grid, t)).collect::<Vec<_>>())
    })?;
    let k = cfg.times.len();
    let column = |f: &dyn Fn(usize) -> Vec<f64>| (0..k).map(f).collect::<Vec<_>>();
    Ok(IcrSamples {
        params: p,
        spec,
        times: cfg.times.clone(),
        sigma: sigma_gamma(g)?,
        hurst: hurst_of(g),
        workload: column(&|j| paths.iter().map(|r| r[j].0).collect()),
        count: column(&|j| paths.iter().map(|r| r[j].1).collect()),
        limit: column(&|j| limit_paths.iter().map(|r| r[j]).collect()),
    })
}

impl IcrSamples {
    fn last(&self) -> usize {
        self.times.len() - 1
    }

    /// Coefficient `k` with scaled counts tending to `k P_H`.
    pub fn count_coefficient(&self) -> f64 {
        -self.sigma / self.params.mu()
    }

    /// Coefficient `k` with scaled workload tending to `k P_H`.
    pub fn workload_coefficient(&self) -> f64 {
        self.sigma * self.params.mu_off() / self.params.mu()
    }

    fn limit_variance(&self, coefficient: f64, t: f64) -> f64 {
        coefficient.powi(2) * t.powf(2.0 * self.hurst)
    }

    fn scaled_limit(&self, j: usize, coefficient: f64) -> Vec<f64> {
        self.limit[j].iter().map(|x| coefficient * x).collect()
    }

    fn rows(&self) -> Report {
        let mut report = Report::default();
        let n = self.workload[0].len();
        for i in 0..n {
            for (j, &t) in self.times.iter().enumerate() {
                report.rows.push(Row::new(i, t, "workload", self.workload[j][i]));
                report.rows.push(Row::new(i, t, "count", self.count[j][i]));
            }
        }
        for i in 0..self.limit[0].len() {
            for (j, &t) in self.times.iter().enumerate() {
                report.rows.push(Row::new(i, t, "limit", self.limit[j][i]));
            }
        }
        report
    }

    /// Scaled counts at the last time against `count_coefficient * P_H`.
    pub fn count_checks(&self) -> Result<Vec<Check>, RunError> {
        let j = self.last();
        let t = self.times[j];
        let k = self.count_coefficient();
        let (lo, hi) = LIMIT_VARIANCE_BAND;
        let thetas = theta_grid();
        Ok(vec![
            Check::within(format!("count.mean_z.t={t}"), z_score(&self.count[j], 0.0)?, -3.0, 3.0),
            Check::within(
                format!("count.variance_ratio.t={t}"),
                variance(&self.count[j]) / self.limit_variance(k, t),
                lo,
                hi,
            ),
            Check::at_most(
                format!("count.ecf_distance.t={t}"),
                ecf_distance(&self.count[j], &self.scaled_limit(j, k), &thetas)?,
                ECF_TOLERANCE,
            ),
        ])
    }

    /// Scaled workload at every time against `workload_coefficient * P_H`,
    /// plus agreement of the skewness sign at the last time.
    pub fn workload_checks(&self) -> Result<Vec<Check>, RunError> {
        let k = self.workload_coefficient();
        let (lo, hi) = LIMIT_VARIANCE_BAND;
        let thetas = theta_grid();
        let mut checks = Vec::new();
        for (j, &t) in self.times.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            checks.push(Check::within(
                format!("workload.variance_ratio.t={t}"),
                variance(&self.workload[j]) / self.limit_variance(k, t),
                lo,
                hi,
            ));
            checks.push(Check::at_most(
                format!("workload.ecf_distance.t={t}"),
                ecf_distance(&self.workload[j], &self.scaled_limit(j, k), &thetas)?,
                ECF_TOLERANCE,
            ));
        }
        let j = self.last();
        let agreement = skewness(&self.workload[j])?.signum() * skewness(&self.scaled_limit(j, k))?.signum();
        checks.push(Check::within(format!("workload.skewness_sign_agreement.t={}", self.times[j]), agreement, 1.0, 1.0));
        Ok(checks)
    }

    /// `Var(scaled W + mu_off scaled N) / Var(mu_off scaled N)` at the last time.
    pub fn residual_fraction(&self) -> f64 {
        let j = self.last();
        let mu_off = self.params.mu_off();
        let count_term: Vec<f64> = self.count[j].iter().map(|n| mu_off * n).collect();
        let residual: Vec<f64> = self.workload[j].iter().zip(&count_term).map(|(w, c)| w + c).collect();
        variance(&residual) / variance(&count_term)
    }

    pub fn residual_check(&self) -> Check {
        Check::at_most(format!("residual.variance_fraction.t={}", self.times[self.last()]), self.residual_fraction(), RESIDUAL_FRACTION)
    }

    fn add_diagnostics(&self, report: &mut Report) -> Result<(), RunError> {
        let j = self.last();
        let t = self.times[j];
        report.diagnostic("a", self.spec.a);
        report.diagnostic(format!("workload.skewness.t={t}"), skewness(&self.workload[j])?);
        report.diagnostic(format!("count.skewness.t={t}"), skewness(&self.count[j])?);
        report.diagnostic(format!("limit.skewness.t={t}"), skewness(&self.limit[j])?);
        report.diagnostic(format!("limit.variance.t={t}"), variance(&self.limit[j]));
        report.diagnostic(format!("residual.variance_fraction.t={t}"), self.residual_fraction());
        report.diagnostic(
            format!("count_workload.correlation.t={t}"),
            covariance(&self.count[j], &self.workload[j])
                / (variance(&self.count[j]) * variance(&self.workload[j])).sqrt(),
        );
        Ok(())
    }
}

fn fpm_check(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let g = gamma(cfg);
    let h = hurst_of(g);
    let grid = grid_through(&cfg.times)?;
    let fpm = cfg.precision().config(g, grid.t_max())?;
    let draws = par(cfg, 0, cfg.replications, |_, rng| {
        let path = sample_fpm(&fpm, &grid, rng)?;
        Ok(cfg.times.iter().map(|&t| at(&path.values, &grid, t)).collect::<Vec<_>>())
    })?;
    let coarse = FpmConfig::with_point_budget(g, grid.t_max(), cfg.coarse_epsilon, cfg.point_budget)?;
    let diffs = par(cfg, REFERENCE_STREAMS, cfg.replications, |_, rng| {
        let (c, f) = sample_fpm_refinement(&coarse, cfg.epsilon, &grid, rng)?;
        Ok(c.values[grid.points() - 1] - f.values[grid.points() - 1])
    })?;
    let mut report = Report::default();
    for (i, d) in draws.iter().enumerate() {
        for (x, &t) in d.iter().zip(&cfg.times) {
            report.rows.push(Row::new(i, t, "fpm", *x));
        }
    }
    for (i, d) in diffs.iter().enumerate() {
        report.rows.push(Row::new(i, grid.t_max(), "refinement_difference", *d));
    }
    let n = cfg.replications as f64;
    let column = |j: usize| draws.iter().map(|d| d[j]).collect::<Vec<f64>>();
    for (j, &t) in cfg.times.iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        let x = column(j);
        let v = variance(&x);
        report.checks.push(Check::within(format!("mean_z.t={t}"), z_score(&x, 0.0)?, -3.0, 3.0));
        report.checks.push(Check::within(
            format!("variance_z.t={t}"),
            (v - fpm_covariance(t, t, h)) / MCEstimate::variance_std_error(&x),
            -3.0,
            3.0,
        ));
        report.diagnostic(format!("variance.t={t}"), v);
    }
    for j in 0..cfg.times.len() {
        for k in j + 1..cfg.times.len() {
            let (s, t) = (cfg.times[j], cfg.times[k]);
            if s == 0.0 {
                continue;
            }
            let (x, y) = (column(j), column(k));
            let (mx, my) = (mean(&x), mean(&y));
            let products: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).collect();
            let se = (variance(&products) / n).sqrt();
            let c = covariance(&x, &y);
            report.checks.push(Check::within(
                format!("covariance_z.s={s}.t={t}"),
                (c - fpm_covariance(s, t, h)) / se,
                -3.0,
                3.0,
            ));
            report.diagnostic(format!("covariance.s={s}.t={t}"), c);
        }
    }
    let bound = coarse.error_variance() / coarse.sigma().powi(2);
    let v = variance(&diffs);
    let se = MCEstimate::variance_std_error(&diffs);
    report.checks.push(Check::at_most("refinement.excess_z", (v - bound) / se, 3.0));
    report.diagnostic("refinement.variance", v);
    report.diagnostic("refinement.bound", bound);
    Ok(report)
}

fn regime_table(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let p = &cfg.params;
    let a = cfg.time_scale()?;
    let m = cfg.m;
    let fcr = RegimeSpec::fcr(p, m, a)?;
    let scr = RegimeSpec::scr(p, m, a)?;
    let on = p.on();
    let g = on.alpha() - 1.0;
    let implied_c = (m as f64 * on.slowly_varying_constant() / (p.mu() * a.powf(g))).powf(1.0 / g);
    let mut report = Report::default();
    report.rows.extend([
        Row::new(0, 0.0, "fcr_normalization", fcr.normalization),
        Row::new(0, 0.0, "scr_normalization", scr.normalization),
        Row::new(0, 0.0, "icr_normalization", a),
        Row::new(0, 0.0, "icr_c", implied_c),
        Row::new(0, 0.0, "connection_ratio", fcr.connection_ratio(p)),
    ]);
    Ok(report)
}

fn aggregate_similarity(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let g = gamma(cfg);
    let t = last_time(cfg);
    let precision = cfg.precision();
    let pairs = par(cfg, 0, cfg.replications, |_, rng| {
        let (l, r) = aggregate_similarity_pair(cfg.m, g, t, 1, &precision, rng)?;
        Ok((l[0], r[0]))
    })?;
    let lhs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let rhs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut report = Report::default();
    for (i, (l, r)) in pairs.iter().enumerate() {
        report.rows.push(Row::new(i, t, "dilated", *l));
        report.rows.push(Row::new(i, t, "sum", *r));
    }
    let n = cfg.replications;
    let d = ks_two_sample(&lhs, &rhs)?;
    report.checks.push(Check::at_most(format!("ks_statistic.t={t}"), d, ks_critical_1pct(n, n)));
    report.diagnostic("similarity_constant", aggregate_similarity_constant(cfg.m, g));
    report.diagnostic("dilated.variance", variance(&lhs));
    report.diagnostic("sum.variance", variance(&rhs));
    Ok(report)
}

fn bridge(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let g = gamma(cfg);
    let t = last_time(cfg);
    let precision = cfg.precision();
    let mut report = Report::default();
    let mut abs_skew = Vec::new();
    for (k, &c) in cfg.scales.iter().enumerate() {
        let xs = par(cfg, k as u64 * FAMILY_STRIDE, cfg.replications, |_, rng| {
            Ok(sample_bridge(g, c, BridgeMode::Gaussian, t, 1, &precision, rng)?[0])
        })?;
        for (i, x) in xs.iter().enumerate() {
            report.rows.push(Row::new(i, t, "bridge", *x));
        }
        let target = t.powf(2.0 * hurst_of(g));
        report.checks.push(Check::within(
            format!("variance_z.c={c}"),
            (variance(&xs) - target) / MCEstimate::variance_std_error(&xs),
            -3.0,
            3.0,
        ));
        let s = skewness(&xs)?;
        report.diagnostic(format!("skewness.c={c}"), s);
        report.diagnostic(format!("variance.c={c}"), variance(&xs));
        abs_skew.push(s.abs());
    }
    let decreasing = abs_skew.windows(2).all(|w| w[1] < w[0]);
    report.checks.push(Check::within("abs_skewness_strictly_decreasing", decreasing as u8 as f64, 1.0, 1.0));
    Ok(report)
}

pub const HURST_BAND: (f64, f64) = (0.70, 0.80);
pub const GAUSSIAN_SKEWNESS: f64 = 0.15;

fn fcr_hurst(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let p = cfg.params;
    let a = cfg.time_scale()?;
    let spec = RegimeSpec::fcr(&p, cfg.m, a)?;
    let grid = Grid::new(cfg.t_max, cfg.points)?;
    let marginal_grid = Grid::new(1.0, 2)?;
    check_budget(cfg, a, cfg.t_max, cfg.replications)?;
    check_budget(cfg, a, 1.0, cfg.reference_samples)?;
    if cfg.reference_samples < 3 {
        return Err(RunError::Config("reference_samples must be >= 3".into()));
    }
    let paths = par(cfg, 0, cfg.replications, |_, rng| {
        let s = superpose(&p, cfg.m, a, &grid, rng, cfg.max_segment_budget)?;
        Ok(s.rescaled(&spec, PathKind::Workload)?.values)
    })?;
    let marginals = par(cfg, REFERENCE_STREAMS, cfg.reference_samples, |_, rng| {
        let s = superpose(&p, cfg.m, a, &marginal_grid, rng, cfg.max_segment_budget)?;
        Ok(s.rescaled(&spec, PathKind::Workload)?.values[1])
    })?;
    let mut report = Report::default();
    for (i, values) in paths.iter().enumerate() {
        for (t, v) in grid.times().zip(values) {
            report.rows.push(Row::new(i, t, "workload", *v));
        }
    }
    for (i, v) in marginals.iter().enumerate() {
        report.rows.push(Row::new(i, 1.0, "marginal", *v));
    }
    let increments: Vec<Vec<f64>> = paths.iter().map(|v| v.windows(2).map(|w| w[1] - w[0]).collect()).collect();
    let refs: Vec<&[f64]> = increments.iter().map(Vec::as_slice).collect();
    let est = hurst_variance_time(&refs, Some(0.0))?;
    let (lo, hi) = HURST_BAND;
    report.checks.push(Check::within("hurst.variance_time", est.hurst, lo, hi));
    let s = skewness(&marginals)?;
    report.checks.push(Check::at_most("marginal.abs_skewness.t=1", s.abs(), GAUSSIAN_SKEWNESS));
    report.diagnostic("hurst.free_mean", hurst_variance_time(&refs, None)?.hurst);
    report.diagnostic("hurst.levels", est.levels.len() as f64);
    report.diagnostic("marginal.variance.t=1", variance(&marginals));
    report.diagnostic("marginal.skewness.t=1", s);
    Ok(report)
}

pub const TAIL_INDEX_BAND: (f64, f64) = (1.35, 1.65);

fn scr_tail(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let p = cfg.params;
    let a = cfg.time_scale()?;
    let spec = RegimeSpec::scr(&p, cfg.m, a)?;
    let t = last_time(cfg);
    let grid = Grid::new(t, 2)?;
    check_budget(cfg, a, t, cfg.replications)?;
    let xs = par(cfg, 0, cfg.replications, |_, rng| {
        let s = superpose(&p, cfg.m, a, &grid, rng, cfg.max_segment_budget)?;
        Ok(s.rescaled(&spec, PathKind::Workload)?.values[1])
    })?;
    let mut report = Report::default();
    for (i, x) in xs.iter().enumerate() {
        report.rows.push(Row::new(i, t, "workload", *x));
    }
    let positive: Vec<f64> = xs.iter().copied().filter(|x| *x > 0.0).collect();
    let k = (cfg.hill_fraction * positive.len() as f64).floor() as usize;
    let hill = hill_tail_index(&positive, k)?;
    let (lo, hi) = TAIL_INDEX_BAND;
    report.checks.push(Check::within(format!("hill_index.t={t}"), hill, lo, hi));
    report.diagnostic("positive_count", positive.len() as f64);
    report.diagnostic("hill_k", k as f64);
    report.diagnostic("normalization", spec.normalization);
    report.diagnostic("connection_ratio", spec.connection_ratio(&p));
    Ok(report)
}
