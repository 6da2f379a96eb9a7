//! The three limit processes of the aggregated on-off model: fractional
//! Poisson motion, fractional Brownian motion and the totally right-skewed
//! stable Levy motion, with their closed-form constants.
//!
//! Fractional Poisson motion is the compensated Poisson integral
//! `Y(t) = int int_0^t 1[x, x+u](y) dy (N(dx,du) - gamma dx u^(-gamma-1) du)`
//! scaled to unit variance at `t = 1`, i.e. `P_H = Y / sigma_gamma`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma as gamma_fn;

use crate::error::{invalid, Error, Result};
use crate::heavytail::{open_unit, StableSkewed};
use crate::path::{CompensatedSum, Grid, PathKind, SamplePath};

/// Largest grid accepted by [`FbmSampler`]; the factorisation is cubic.
pub const FBM_GRID_CAP: usize = 2048;

/// Expected Poisson points per path simulated exactly by default.
pub const DEFAULT_POINT_BUDGET: f64 = 2e4;

/// Truncation error variance targeted by [`FpmConfig::with_tolerance`] by default.
pub const DEFAULT_ERROR_VARIANCE: f64 = 1e-4;

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 1.0 && gamma < 2.0 {
        Ok(())
    } else {
        Err(invalid("gamma", format!("index must lie in (1, 2), got {gamma}")))
    }
}

/// Overlap of the session `[x, x + u]` with `[0, t]`.
#[inline]
pub fn kernel(x: f64, u: f64, t: f64) -> f64 {
    ((x + u).min(t) - x.max(0.0)).max(0.0)
}

/// `sigma_gamma = sqrt(2 / ((gamma-1)(2-gamma)(3-gamma)))`.
pub fn sigma_gamma(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok((2.0 / ((gamma - 1.0) * (2.0 - gamma) * (3.0 - gamma))).sqrt())
}

/// The same coefficient written in the Hurst index: `sqrt(1 / (2H(1-H)(2H-1)))`.
pub fn sigma_hurst(h: f64) -> Result<f64> {
    if !(h > 0.5 && h < 1.0) {
        return Err(invalid("hurst", format!("must lie in (1/2, 1), got {h}")));
    }
    Ok((1.0 / (2.0 * h * (1.0 - h) * (2.0 * h - 1.0))).sqrt())
}

pub fn hurst_of(gamma: f64) -> f64 {
    (3.0 - gamma) / 2.0
}

/// Scale of the slow-rate stable limit: the positive `alpha`-th root of
/// `Gamma(2-alpha) cos(pi alpha / 2) / (1 - alpha)`.
pub fn sigma_zero(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(invalid("alpha", format!("must lie in (1, 2), got {alpha}")));
    }
    Ok(sigma_zero_power(alpha).powf(1.0 / alpha))
}

/// `sigma_0^alpha` itself.
pub fn sigma_zero_power(alpha: f64) -> f64 {
    gamma_fn(2.0 - alpha) * (PI * alpha / 2.0).cos() / (1.0 - alpha)
}

/// `(|s|^2H + |t|^2H - |t-s|^2H) / 2`.
pub fn fpm_covariance(s: f64, t: f64, h: f64) -> f64 {
    let p = 2.0 * h;
    0.5 * (s.abs().powf(p) + t.abs().powf(p) - (t - s).abs().powf(p))
}

/// A point `(x, u)` of the Poisson measure: a session starting at `x` of length `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonPoint {
    pub x: f64,
    pub u: f64,
}

/// Intensity mass of `{u >= u_min, -u < x < horizon}`.
pub fn region_mass(gamma: f64, horizon: f64, u_min: f64) -> f64 {
    horizon * u_min.powf(-gamma) + gamma * u_min.powf(1.0 - gamma) / (gamma - 1.0)
}

/// Compensator `int int kernel(x,u,t) n(dx,du)` over `u >= u_min`.
pub fn compensator(gamma: f64, t: f64, u_min: f64) -> f64 {
    gamma * t * u_min.powf(1.0 - gamma) / (gamma - 1.0)
}

/// Variance at time `t` of the sessions shorter than `u_max <= t`.
pub fn truncation_variance(gamma: f64, t: f64, u_max: f64) -> f64 {
    gamma * t * u_max.powf(2.0 - gamma) / (2.0 - gamma)
        - gamma * u_max.powf(3.0 - gamma) / (3.0 * (3.0 - gamma))
}

/// Fractional Poisson motion simulation settings on `[0, horizon]`.
///
/// Sessions shorter than `epsilon` are dropped; the variance this removes
/// at the horizon is [`error_variance`](Self::error_variance). When the
/// expected number of retained sessions exceeds `point_budget`, sessions
/// longer than [`exact_cutoff`](Self::exact_cutoff) are simulated
/// individually and the band `[epsilon, exact_cutoff)` is replaced by a
/// Brownian term of the same variance rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpmConfig {
    gamma: f64,
    horizon: f64,
    epsilon: f64,
    point_budget: f64,
    exact_cutoff: f64,
}

impl FpmConfig {
    pub fn new(gamma: f64, horizon: f64, epsilon: f64) -> Result<Self> {
        Self::with_point_budget(gamma, horizon, epsilon, DEFAULT_POINT_BUDGET)
    }

    pub fn with_point_budget(gamma: f64, horizon: f64, epsilon: f64, point_budget: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid("horizon", format!("must be finite and > 0, got {horizon}")));
        }
        if !(epsilon > 0.0 && epsilon <= horizon) {
            return Err(invalid("epsilon", format!("must lie in (0, horizon], got {epsilon}")));
        }
        if !(point_budget >= 1.0) {
            return Err(invalid("point_budget", format!("must be >= 1, got {point_budget}")));
        }
        let lambda = region_mass(gamma, horizon, epsilon);
        if !lambda.is_finite() {
            return Err(invalid("epsilon", format!("intensity mass overflows at epsilon = {epsilon}")));
        }
        let exact_cutoff = if lambda <= point_budget {
            epsilon
        } else {
            solve_decreasing(|u| region_mass(gamma, horizon, u) - point_budget, epsilon, 1e12)
        };
        Ok(Self {
            gamma,
            horizon,
            epsilon,
            point_budget,
            exact_cutoff,
        })
    }

    /// Largest `epsilon` whose truncation variance at the horizon is at most `tolerance`.
    pub fn with_tolerance(gamma: f64, horizon: f64, tolerance: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !(tolerance > 0.0) {
            return Err(invalid("tolerance", "must be > 0"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid("horizon", format!("must be finite and > 0, got {horizon}")));
        }
        let eps = if truncation_variance(gamma, horizon, horizon) <= tolerance {
            horizon
        } else {
            // v is increasing in epsilon on (0, horizon]
            solve_decreasing(|e| tolerance - truncation_variance(gamma, horizon, e), 1e-300, horizon)
        };
        Self::new(gamma, horizon, eps)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn point_budget(&self) -> f64 {
        self.point_budget
    }

    pub fn hurst(&self) -> f64 {
        hurst_of(self.gamma)
    }

    pub fn sigma(&self) -> f64 {
        sigma_gamma(self.gamma).expect("gamma checked")
    }

    /// `Lambda(eps, T) = T eps^-gamma + gamma eps^(1-gamma) / (gamma-1)`.
    pub fn region_mass(&self) -> f64 {
        region_mass(self.gamma, self.horizon, self.epsilon)
    }

    /// `M(eps, T) = gamma T eps^(1-gamma) / (gamma-1)`.
    pub fn compensator_mass(&self) -> f64 {
        compensator(self.gamma, self.horizon, self.epsilon)
    }

    /// `v(eps, T) = gamma T eps^(2-gamma)/(2-gamma) - gamma eps^(3-gamma)/(3(3-gamma))`.
    pub fn error_variance(&self) -> f64 {
        truncation_variance(self.gamma, self.horizon, self.epsilon)
    }

    /// Shortest session simulated as an individual Poisson point.
    pub fn exact_cutoff(&self) -> f64 {
        self.exact_cutoff
    }

    /// Variance per unit time of the Brownian term standing in for
    /// sessions in `[epsilon, exact_cutoff)`, in units of `Y`.
    pub fn band_variance_rate(&self) -> f64 {
        band_rate(self.gamma, self.epsilon, self.exact_cutoff)
    }
}

fn band_rate(gamma: f64, lo: f64, hi: f64) -> f64 {
    gamma * (hi.powf(2.0 - gamma) - lo.powf(2.0 - gamma)) / (2.0 - gamma)
}

/// Root of a function decreasing in `u`, bracketed by `[lo, hi]` (bisection in log space).
fn solve_decreasing(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid.exp()) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.exp()
}

/// Sessions with `u >= u_min` that overlap `[0, horizon]`.
///
/// The restricted intensity splits into sessions starting inside the
/// window (mass `T u_min^-gamma`, lengths Pareto(gamma), start uniform on
/// `(0, T)`) and sessions already running at 0 (mass
/// `gamma u_min^(1-gamma)/(gamma-1)`, lengths Pareto(gamma-1), start uniform
/// on `(-u, 0)`).
pub fn sample_points<R: Rng + ?Sized>(
    gamma: f64,
    horizon: f64,
    u_min: f64,
    rng: &mut R,
) -> Result<Vec<PoissonPoint>> {
    let inside = horizon * u_min.powf(-gamma);
    let total = region_mass(gamma, horizon, u_min);
    let count = draw_poisson(total, rng)?;
    let p_inside = inside / total;
    Ok((0..count)
        .map(|_| {
            if rng.random::<f64>() < p_inside {
                PoissonPoint {
                    x: horizon * rng.random::<f64>(),
                    u: u_min * open_unit(rng).powf(-1.0 / gamma),
                }
            } else {
                let u = u_min * open_unit(rng).powf(-1.0 / (gamma - 1.0));
                PoissonPoint {
                    x: -u * rng.random::<f64>(),
                    u,
                }
            }
        })
        .collect())
}

fn draw_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| invalid("intensity", e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}

/// Sums `kernel(x, u, t_j)` over points for every grid time, in O(points + grid).
struct KernelAccumulator {
    grid: Grid,
    slopes: Vec<f64>,
    offsets: Vec<f64>,
}

impl KernelAccumulator {
    fn new(grid: &Grid) -> Self {
        Self {
            grid: *grid,
            slopes: vec![0.0; grid.points()],
            offsets: vec![0.0; grid.points()],
        }
    }

    /// Adds `sign * (t - start)_+`.
    #[inline]
    fn hinge(&mut self, start: f64, sign: f64) {
        let t_max = self.grid.t_max();
        if start >= t_max {
            return;
        }
        let j = (start / self.grid.dt()).floor() as usize + 1;
        if j < self.slopes.len() {
            self.slopes[j] += sign;
            self.offsets[j] += sign * start;
        }
    }

    fn add(&mut self, session_start: f64, session_end: f64) {
        let a = session_start.max(0.0);
        if session_end <= a {
            return;
        }
        self.hinge(a, 1.0);
        self.hinge(session_end, -1.0);
    }

    fn finish(self) -> Vec<f64> {
        let mut slope = CompensatedSum::default();
        let mut offset = CompensatedSum::default();
        self.grid
            .times()
            .enumerate()
            .map(|(j, t)| {
                slope.add(self.slopes[j]);
                offset.add(self.offsets[j]);
                t * slope.value() - offset.value()
            })
            .collect()
    }
}

/// Centred Poisson integral `Y` (not yet divided by `sigma_gamma`) from
/// sessions with `u >= u_min`, on `grid`.
fn centred_poisson_integral(gamma: f64, grid: &Grid, points: &[PoissonPoint], u_min: f64) -> Vec<f64> {
    let mut acc = KernelAccumulator::new(grid);
    for p in points {
        acc.add(p.x, p.x + p.u);
    }
    let mut values = acc.finish();
    for (v, t) in values.iter_mut().zip(grid.times()) {
        *v -= compensator(gamma, t, u_min);
    }
    values
}

fn add_brownian<R: Rng + ?Sized>(values: &mut [f64], grid: &Grid, rate: f64, rng: &mut R) {
    if rate <= 0.0 {
        return;
    }
    let sd = (rate * grid.dt()).sqrt();
    let mut level = 0.0;
    for v in values.iter_mut().skip(1) {
        let z: f64 = StandardNormal.sample(rng);
        level += sd * z;
        *v += level;
    }
}

fn check_grid_within(grid: &Grid, horizon: f64) -> Result<()> {
    if grid.t_max() > horizon * (1.0 + 1e-12) {
        return Err(invalid(
            "grid",
            format!("grid end {} exceeds horizon {horizon}", grid.t_max()),
        ));
    }
    Ok(())
}

fn limit_path(grid: &Grid, values: Vec<f64>) -> SamplePath {
    SamplePath {
        grid: *grid,
        values,
        kind: PathKind::Limit,
        scaling: None,
    }
}

/// One path of standard fractional Poisson motion on `grid`.
pub fn sample_fpm<R: Rng + ?Sized>(config: &FpmConfig, grid: &Grid, rng: &mut R) -> Result<SamplePath> {
    check_grid_within(grid, config.horizon)?;
    let cutoff = config.exact_cutoff;
    let points = sample_points(config.gamma, config.horizon, cutoff, rng)?;
    let mut values = centred_poisson_integral(config.gamma, grid, &points, cutoff);
    add_brownian(&mut values, grid, config.band_variance_rate(), rng);
    let sigma = config.sigma();
    values.iter_mut().for_each(|v| *v /= sigma);
    values[0] = 0.0;
    Ok(limit_path(grid, values))
}

/// Coupled paths at a coarse and a fine truncation level sharing every
/// session longer than the coarse cutoff. The coarse level must fit the
/// point budget so that it is simulated without a Brownian band.
pub fn sample_fpm_refinement<R: Rng + ?Sized>(
    coarse: &FpmConfig,
    fine_epsilon: f64,
    grid: &Grid,
    rng: &mut R,
) -> Result<(SamplePath, SamplePath)> {
    check_grid_within(grid, coarse.horizon)?;
    if !(fine_epsilon > 0.0 && fine_epsilon < coarse.epsilon) {
        return Err(invalid("fine_epsilon", "must lie in (0, coarse epsilon)"));
    }
    if coarse.exact_cutoff > coarse.epsilon {
        return Err(Error::BudgetExceeded {
            expected: coarse.region_mass(),
            budget: coarse.point_budget,
        });
    }
    let (g, t_end) = (coarse.gamma, coarse.horizon);
    let shared = sample_points(g, t_end, coarse.epsilon, rng)?;
    let coarse_values = centred_poisson_integral(g, grid, &shared, coarse.epsilon);

    // extra sessions in [fine_epsilon, coarse.epsilon): exact up to the budget, Brownian below
    let fine_cfg = FpmConfig::with_point_budget(g, t_end, fine_epsilon, coarse.point_budget)?;
    let lo = fine_cfg.exact_cutoff.min(coarse.epsilon);
    let band_mass = region_mass(g, t_end, lo) - region_mass(g, t_end, coarse.epsilon);
    let count = draw_poisson(band_mass, rng)?;
    let inner = band_points(g, t_end, lo, coarse.epsilon, count, rng);
    let mut extra = KernelAccumulator::new(grid);
    for p in &inner {
        extra.add(p.x, p.x + p.u);
    }
    let mut fine_values: Vec<f64> = extra
        .finish()
        .iter()
        .zip(grid.times())
        .zip(&coarse_values)
        .map(|((e, t), c)| c + e - (compensator(g, t, lo) - compensator(g, t, coarse.epsilon)))
        .collect();
    add_brownian(&mut fine_values, grid, band_rate(g, fine_epsilon, lo), rng);

    let sigma = coarse.sigma();
    let finish = |mut v: Vec<f64>| {
        v.iter_mut().for_each(|x| *x /= sigma);
        v[0] = 0.0;
        limit_path(grid, v)
    };
    Ok((finish(coarse_values), finish(fine_values)))
}

/// `count` sessions with `lo <= u < hi` overlapping `[0, horizon]`.
fn band_points<R: Rng + ?Sized>(
    gamma: f64,
    horizon: f64,
    lo: f64,
    hi: f64,
    count: u64,
    rng: &mut R,
) -> Vec<PoissonPoint> {
    // Within the band the x-extent is T + u; sample u from the band density
    // proportional to (T + u) u^(-gamma-1) by mixing the two pieces.
    let inside = horizon * (lo.powf(-gamma) - hi.powf(-gamma));
    let running = gamma * (lo.powf(1.0 - gamma) - hi.powf(1.0 - gamma)) / (gamma - 1.0);
    let p_inside = inside / (inside + running);
    let truncated = |shape: f64, rng: &mut R| {
        // inverse CDF of a Pareto(shape, lo) conditioned on u < hi
        let tail_hi = (lo / hi).powf(shape);
        let v = 1.0 - rng.random::<f64>() * (1.0 - tail_hi);
        lo * v.powf(-1.0 / shape)
    };
    (0..count)
        .map(|_| {
            if rng.random::<f64>() < p_inside {
                PoissonPoint {
                    x: horizon * rng.random::<f64>(),
                    u: truncated(gamma, rng),
                }
            } else {
                let u = truncated(gamma - 1.0, rng);
                PoissonPoint {
                    x: -u * rng.random::<f64>(),
                    u,
                }
            }
        })
        .collect()
}

/// `P_H(t)` alone, using a two-point grid on `[0, t]`.
pub fn sample_fpm_marginal<R: Rng + ?Sized>(precision: &FpmPrecision, gamma: f64, t: f64, rng: &mut R) -> Result<f64> {
    let config = precision.config(gamma, t)?;
    let grid = Grid::new(t, 2)?;
    Ok(sample_fpm(&config, &grid, rng)?.values[1])
}

/// Truncation level and point budget used when a sampler builds its own [`FpmConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpmPrecision {
    pub epsilon: f64,
    pub point_budget: f64,
}

impl Default for FpmPrecision {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            point_budget: DEFAULT_POINT_BUDGET,
        }
    }
}

impl FpmPrecision {
    pub fn config(&self, gamma: f64, horizon: f64) -> Result<FpmConfig> {
        FpmConfig::with_point_budget(gamma, horizon, self.epsilon.min(horizon), self.point_budget)
    }
}

/// Exact fractional Brownian motion on a grid via Cholesky factorisation of
/// the covariance matrix. The factor is computed once and reused.
#[derive(Debug, Clone)]
pub struct FbmSampler {
    hurst: f64,
    grid: Grid,
    factor: DMatrix<f64>,
}

impl FbmSampler {
    pub fn new(hurst: f64, grid: &Grid) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(invalid("hurst", format!("must lie in (0, 1), got {hurst}")));
        }
        if grid.points() > FBM_GRID_CAP {
            return Err(invalid(
                "grid",
                format!("{} points exceeds the cap of {FBM_GRID_CAP}", grid.points()),
            ));
        }
        let times: Vec<f64> = grid.times().skip(1).collect();
        let n = times.len();
        let cov = DMatrix::from_fn(n, n, |i, j| fpm_covariance(times[i], times[j], hurst));
        let chol = cov
            .cholesky()
            .ok_or_else(|| Error::Factorization(format!("fBm covariance not positive definite (H={hurst}, n={n})")))?;
        Ok(Self {
            hurst,
            grid: *grid,
            factor: chol.unpack(),
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SamplePath {
        let n = self.factor.nrows();
        let z = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let x = &self.factor * z;
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        values.extend(x.iter().copied());
        limit_path(&self.grid, values)
    }
}

/// One fBm path; builds a fresh factorisation, so prefer [`FbmSampler`] in loops.
pub fn sample_fbm<R: Rng + ?Sized>(hurst: f64, grid: &Grid, rng: &mut R) -> Result<SamplePath> {
    Ok(FbmSampler::new(hurst, grid)?.sample(rng))
}

/// Standard `alpha`-stable Levy motion totally skewed to the right: independent
/// increments `dt^(1/alpha) S_alpha(1, 1, 0)`.
pub fn sample_stable_levy<R: Rng + ?Sized>(alpha: f64, grid: &Grid, rng: &mut R) -> Result<SamplePath> {
    let stable = StableSkewed::new(alpha)?;
    let step = grid.dt().powf(1.0 / alpha);
    let mut values = Vec::with_capacity(grid.points());
    let mut level = 0.0;
    values.push(0.0);
    for _ in 1..grid.points() {
        level += step * stable.sample(rng);
        values.push(level);
    }
    Ok(limit_path(grid, values))
}

/// `c_m = m^(1/(gamma-1))`.
pub fn aggregate_similarity_constant(m: usize, gamma: f64) -> f64 {
    (m as f64).powf(1.0 / (gamma - 1.0))
}

/// `n` draws of `c_m P_H(t / c_m)` and `n` draws of `sum_{i<=m} P_H^i(t)`;
/// both sides share one law.
pub fn aggregate_similarity_pair<R: Rng + ?Sized>(
    m: usize,
    gamma: f64,
    t: f64,
    n: usize,
    precision: &FpmPrecision,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_gamma(gamma)?;
    if m == 0 {
        return Err(invalid("m", "need m >= 1"));
    }
    let c = aggregate_similarity_constant(m, gamma);
    let lhs = (0..n)
        .map(|_| Ok(c * sample_fpm_marginal(precision, gamma, t / c, rng)?))
        .collect::<Result<Vec<_>>>()?;
    let rhs = (0..n)
        .map(|_| {
            (0..m).try_fold(0.0, |acc, _| Ok(acc + sample_fpm_marginal(precision, gamma, t, rng)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BridgeMode {
    /// `c^H P_H(t/c)`, tending to fBm as `c -> infinity`.
    Gaussian,
    /// `c^(1/gamma) P_H(t/c)`, tending to stable Levy motion as `c -> 0`.
    Stable,
}

pub fn bridge_scale(c: f64, mode: BridgeMode, gamma: f64) -> f64 {
    match mode {
        BridgeMode::Gaussian => c.powf(hurst_of(gamma)),
        BridgeMode::Stable => c.powf(1.0 / gamma),
    }
}

/// Rescales draws of `P_H(t/c)` into draws of the bridge family at `t`.
pub fn bridge_transform(samples: &[f64], c: f64, mode: BridgeMode, gamma: f64) -> Result<Vec<f64>> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid("c", format!("must be finite and > 0, got {c}")));
    }
    let k = bridge_scale(c, mode, gamma);
    Ok(samples.iter().map(|x| k * x).collect())
}

/// `n` draws of the bridge family at time `t`.
pub fn sample_bridge<R: Rng + ?Sized>(
    gamma: f64,
    c: f64,
    mode: BridgeMode,
    t: f64,
    n: usize,
    precision: &FpmPrecision,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let raw = (0..n)
        .map(|_| sample_fpm_marginal(precision, gamma, t / c, rng))
        .collect::<Result<Vec<_>>>()?;
    bridge_transform(&raw, c, mode, gamma)
}
