//! A single stationary on-off source.
//!
//! Cycle `k` is the pair `(X_k, Y_k)` of an on-period followed by an
//! off-period. Cycle 0 is the stationary delay: with probability
//! `mu_on / mu` the source starts on, `X_0` is drawn from the on-law's
//! equilibrium distribution and `Y_0` from the off-law, otherwise `X_0 = 0`
//! and `Y_0` comes from the off-law's equilibrium distribution. Renewal
//! epochs are `S_0 = X_0 + Y_0` and `S_k = S_{k-1} + X_k + Y_k`, and
//! `N(t) = #{k >= 0 : S_k <= t}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::heavytail::SourceParams;
use crate::path::{Grid, PathKind, SamplePath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum State {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub state: State,
    pub duration: f64,
}

/// One on-period followed by one off-period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub on: f64,
    pub off: f64,
}

impl Cycle {
    pub fn length(&self) -> f64 {
        self.on + self.off
    }
}

/// Draws the stationary delay cycle; returns the initial-state flag with it.
pub fn draw_initial_cycle<R: Rng + ?Sized>(params: &SourceParams, rng: &mut R) -> (bool, Cycle) {
    let starts_on = rng.random::<f64>() < params.p_on();
    (starts_on, draw_initial_cycle_given(params, starts_on, rng))
}

fn draw_initial_cycle_given<R: Rng + ?Sized>(
    params: &SourceParams,
    starts_on: bool,
    rng: &mut R,
) -> Cycle {
    if starts_on {
        Cycle {
            on: params.on().sample_equilibrium_with(rng),
            off: params.off().sample(rng),
        }
    } else {
        Cycle {
            on: 0.0,
            off: params.off().sample_equilibrium_with(rng),
        }
    }
}

#[inline]
pub fn draw_cycle<R: Rng + ?Sized>(params: &SourceParams, rng: &mut R) -> Cycle {
    Cycle {
        on: params.on().sample(rng),
        off: params.off().sample(rng),
    }
}

/// Streams a source against ascending evaluation times, calling
/// `sink(j, workload, count)` once per time. Cycles are drawn until the
/// last renewal epoch exceeds the final time, exactly as
/// [`OnOffPath::generate`] does, so both see the same random draws.
pub fn stream_on_times<R, F>(params: &SourceParams, times: &[f64], rng: &mut R, mut sink: F)
where
    R: Rng + ?Sized,
    F: FnMut(usize, f64, u64),
{
    let Some(&last) = times.last() else { return };
    let (_, mut cycle) = draw_initial_cycle(params, rng);
    let mut start = 0.0;
    let mut worked = 0.0;
    let mut index = 0u64;
    let mut j = 0;
    loop {
        let end = start + cycle.length();
        while j < times.len() && times[j] < end {
            let w = worked + (times[j] - start).min(cycle.on);
            sink(j, w, index);
            j += 1;
        }
        if end > last {
            return;
        }
        worked += cycle.on;
        start = end;
        index += 1;
        cycle = draw_cycle(params, rng);
    }
}

/// Exact segment list of one stationary source up to (and past) a horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnOffPath {
    starts_on: bool,
    cycles: Vec<Cycle>,
    /// `epochs[k] = S_k`.
    epochs: Vec<f64>,
    /// `on_before[k]` = total on-time of cycles `0..k`.
    on_before: Vec<f64>,
    horizon: f64,
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(invalid("horizon", format!("must be finite and > 0, got {horizon}")))
    }
}

impl OnOffPath {
    /// Stationary path covering `[0, horizon]`; cycles are drawn until
    /// some renewal epoch lies strictly beyond `horizon`.
    pub fn generate<R: Rng + ?Sized>(
        params: &SourceParams,
        horizon: f64,
        rng: &mut R,
    ) -> Result<Self> {
        check_horizon(horizon)?;
        let (starts_on, first) = draw_initial_cycle(params, rng);
        Ok(Self::extend_from(params, starts_on, first, horizon, rng))
    }

    /// As [`generate`](Self::generate) with the initial state fixed.
    pub fn generate_with_initial_state<R: Rng + ?Sized>(
        params: &SourceParams,
        starts_on: bool,
        horizon: f64,
        rng: &mut R,
    ) -> Result<Self> {
        check_horizon(horizon)?;
        let first = draw_initial_cycle_given(params, starts_on, rng);
        Ok(Self::extend_from(params, starts_on, first, horizon, rng))
    }

    fn extend_from<R: Rng + ?Sized>(
        params: &SourceParams,
        starts_on: bool,
        first: Cycle,
        horizon: f64,
        rng: &mut R,
    ) -> Self {
        let mut cycles = vec![first];
        let mut end = first.length();
        while end <= horizon {
            let c = draw_cycle(params, rng);
            end += c.length();
            cycles.push(c);
        }
        Self::assemble(starts_on, cycles, horizon)
    }

    fn assemble(starts_on: bool, cycles: Vec<Cycle>, horizon: f64) -> Self {
        let mut epochs = Vec::with_capacity(cycles.len());
        let mut on_before = Vec::with_capacity(cycles.len());
        let (mut end, mut on) = (0.0, 0.0);
        for c in &cycles {
            on_before.push(on);
            on += c.on;
            end += c.length();
            epochs.push(end);
        }
        Self {
            starts_on,
            cycles,
            epochs,
            on_before,
            horizon,
        }
    }

    /// Builds a path from explicit cycles. Cycle 0 may have a zero on-part
    /// (source starts off); every later duration must be positive.
    pub fn from_cycles(cycles: Vec<Cycle>, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        let Some(first) = cycles.first() else {
            return Err(invalid("cycles", "at least one cycle required"));
        };
        if !(first.on >= 0.0 && first.off > 0.0) {
            return Err(invalid("cycles", "initial cycle needs on >= 0 and off > 0"));
        }
        if cycles[1..].iter().any(|c| !(c.on > 0.0 && c.off > 0.0)) {
            return Err(invalid("cycles", "durations after the delay cycle must be > 0"));
        }
        let total: f64 = cycles.iter().map(Cycle::length).sum();
        if total < horizon {
            return Err(invalid("horizon", "cycles do not cover the horizon"));
        }
        Ok(Self::assemble(first.on > 0.0, cycles, horizon))
    }

    pub fn starts_on(&self) -> bool {
        self.starts_on
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    /// Renewal epochs `S_0, S_1, ...`.
    pub fn epochs(&self) -> &[f64] {
        &self.epochs
    }

    /// Off-durations `Y_0, Y_1, ...`.
    pub fn off_durations(&self) -> impl Iterator<Item = f64> + '_ {
        self.cycles.iter().map(|c| c.off)
    }

    /// Alternating on/off segments; a zero initial on-period is omitted.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(2 * self.cycles.len());
        for (k, c) in self.cycles.iter().enumerate() {
            if k > 0 || c.on > 0.0 {
                out.push(Segment {
                    state: State::On,
                    duration: c.on,
                });
            }
            out.push(Segment {
                state: State::Off,
                duration: c.off,
            });
        }
        out
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t >= 0.0 && t <= self.horizon {
            Ok(())
        } else {
            Err(Error::OutsideHorizon {
                t,
                horizon: self.horizon,
            })
        }
    }

    #[inline]
    fn cycle_start(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.epochs[k - 1]
        }
    }

    /// `N(t)`: number of renewal epochs in `(0, t]`.
    pub fn renewal_count(&self, t: f64) -> Result<u64> {
        self.check_time(t)?;
        Ok(self.count_unchecked(t) as u64)
    }

    #[inline]
    fn count_unchecked(&self, t: f64) -> usize {
        self.epochs.partition_point(|&s| s <= t)
    }

    /// `W(t) = int_0^t I(s) ds`, integrated exactly over segments.
    pub fn workload_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let k = self.count_unchecked(t);
        Ok(self.on_before[k] + (t - self.cycle_start(k)).min(self.cycles[k].on))
    }

    /// `I(t)`: whether the source is on at time `t`.
    pub fn is_on(&self, t: f64) -> Result<bool> {
        self.check_time(t)?;
        let k = self.count_unchecked(t);
        Ok(t - self.cycle_start(k) < self.cycles[k].on)
    }

    /// Splits the centred workload `W(t) - (mu_on/mu) t` into its
    /// renewal-count, off-period-sum and boundary parts.
    pub fn decomposition_terms(&self, params: &SourceParams, t: f64) -> Result<Decomposition> {
        self.check_time(t)?;
        let n = self.count_unchecked(t);
        if n >= self.epochs.len() {
            return Err(Error::HorizonTooShort { t });
        }
        let (mu, mu_off) = (params.mu(), params.mu_off());
        let lhs = self.workload_at(t)? - params.p_on() * t;
        let count_term = -mu_off * (n as f64 - t / mu);
        let ysum_term = -self.cycles[1..=n]
            .iter()
            .map(|c| c.off - mu_off)
            .sum::<f64>();
        let remainder = (self.epochs[n] - t).min(self.cycles[n].off) - self.cycles[0].off;
        Ok(Decomposition {
            lhs,
            count_term,
            ysum_term,
            remainder,
        })
    }

    /// Workload sampled on `grid` (must lie within the horizon).
    pub fn workload_path(&self, grid: &Grid) -> Result<SamplePath> {
        self.check_time(grid.t_max())?;
        let values = grid.times().map(|t| self.workload_at(t)).collect::<Result<_>>()?;
        Ok(SamplePath {
            grid: *grid,
            values,
            kind: PathKind::Workload,
            scaling: None,
        })
    }

    /// Renewal count sampled on `grid`.
    pub fn count_path(&self, grid: &Grid) -> Result<SamplePath> {
        self.check_time(grid.t_max())?;
        let values = grid
            .times()
            .map(|t| self.renewal_count(t).map(|n| n as f64))
            .collect::<Result<_>>()?;
        Ok(SamplePath {
            grid: *grid,
            values,
            kind: PathKind::Count,
            scaling: None,
        })
    }
}

/// Terms of `W(t) - (mu_on/mu) t = count_term + ysum_term + remainder`, where
/// `count_term = -mu_off (N(t) - t/mu)`,
/// `ysum_term = -sum_{i=1}^{N(t)} (Y_i - mu_off)` and
/// `remainder = (S_{N(t)} - t) min Y_{N(t)} - Y_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub lhs: f64,
    pub count_term: f64,
    pub ysum_term: f64,
    pub remainder: f64,
}

impl Decomposition {
    pub fn rhs(&self) -> f64 {
        self.count_term + self.ysum_term + self.remainder
    }

    pub fn discrepancy(&self) -> f64 {
        (self.lhs - self.rhs()).abs()
    }
}
