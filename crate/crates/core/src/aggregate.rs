//! Superposition of independent sources and the regime normalisations
//! applied to the centred aggregate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::heavytail::{scr_normalization, SourceParams, TailLaw};
use crate::onoff::stream_on_times;
use crate::path::{CompensatedSum, Grid, PathKind, SamplePath, Scaling};

/// Default cap on expected renewal cycles for one call.
pub const DEFAULT_SEGMENT_BUDGET: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Fast connection rate: `m L / a^(alpha_on - 1) -> infinity`.
    Fcr,
    /// Slow connection rate: `m L / a^(alpha_on - 1) -> 0`.
    Scr,
    /// Intermediate connection rate: `m L / a^(alpha_on - 1) -> mu c^(alpha_on - 1)`.
    Icr,
}

/// Scaling regime together with the source count, time scale and normaliser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub regime: Regime,
    pub m: usize,
    pub a: f64,
    pub c: Option<f64>,
    pub normalization: f64,
}

fn check_counts(m: usize, a: f64) -> Result<()> {
    if m == 0 {
        return Err(invalid("m", "need at least one source"));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(invalid("a", format!("time scale must be finite and > 0, got {a}")));
    }
    Ok(())
}

/// Time scale making the intermediate relation exact:
/// `a = (m L_on / (mu c^(alpha_on - 1)))^(1 / (alpha_on - 1))`.
pub fn icr_scale(m: usize, c: f64, params: &SourceParams) -> Result<f64> {
    if m == 0 {
        return Err(invalid("m", "need at least one source"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(invalid("c", format!("must be finite and > 0, got {c}")));
    }
    let on = params.on();
    let g = on.alpha() - 1.0;
    Ok((m as f64 * on.slowly_varying_constant() / (params.mu() * c.powf(g))).powf(1.0 / g))
}

/// Fast-rate normaliser `(a^(3 - alpha_on) L_on m)^(1/2)`.
pub fn fcr_normalization(law_on: &TailLaw, a: f64, m: f64) -> f64 {
    (a.powf(3.0 - law_on.alpha()) * law_on.slowly_varying_constant() * m).sqrt()
}

impl RegimeSpec {
    pub fn fcr(params: &SourceParams, m: usize, a: f64) -> Result<Self> {
        check_counts(m, a)?;
        Ok(Self {
            regime: Regime::Fcr,
            m,
            a,
            c: None,
            normalization: fcr_normalization(params.on(), a, m as f64),
        })
    }

    pub fn scr(params: &SourceParams, m: usize, a: f64) -> Result<Self> {
        check_counts(m, a)?;
        Ok(Self {
            regime: Regime::Scr,
            m,
            a,
            c: None,
            normalization: scr_normalization(params.on(), a, m as f64),
        })
    }

    /// Intermediate regime; the time scale is derived with [`icr_scale`]
    /// and the normaliser is `a` itself.
    pub fn icr(params: &SourceParams, m: usize, c: f64) -> Result<Self> {
        let a = icr_scale(m, c, params)?;
        Ok(Self {
            regime: Regime::Icr,
            m,
            a,
            c: Some(c),
            normalization: a,
        })
    }

    /// `m L_on / a^(alpha_on - 1)`, the quantity that separates the regimes.
    pub fn connection_ratio(&self, params: &SourceParams) -> f64 {
        let on = params.on();
        self.m as f64 * on.slowly_varying_constant() / self.a.powf(on.alpha() - 1.0)
    }
}

/// Expected number of renewal cycles needed to cover `[0, a t_max]` with `m` sources.
pub fn expected_cycles(params: &SourceParams, m: usize, a: f64, t_max: f64) -> f64 {
    m as f64 * (a * t_max / params.mu() + 1.0)
}

/// Workload and renewal-count sums of `m` sources on the grid `a * t_j`.
///
/// Alongside the raw sums it keeps per-source centred sums
/// `sum_j (W^j(a t) - a t mu_on/mu)` and `sum_j (N^j(a t) - a t/mu)`,
/// accumulated with compensated summation, because the raw totals can be
/// many orders of magnitude larger than their fluctuation.
#[derive(Debug, Clone, PartialEq)]
pub struct Superposed {
    grid: Grid,
    scaling: Scaling,
    workload: Vec<f64>,
    count: Vec<f64>,
    centered_workload: Vec<f64>,
    centered_count: Vec<f64>,
}

pub fn superpose<R: Rng + ?Sized>(
    params: &SourceParams,
    m: usize,
    a: f64,
    grid: &Grid,
    rng: &mut R,
    budget: f64,
) -> Result<Superposed> {
    check_counts(m, a)?;
    let expected = expected_cycles(params, m, a, grid.t_max());
    if expected > budget {
        return Err(Error::BudgetExceeded { expected, budget });
    }
    let times: Vec<f64> = grid.times().map(|t| a * t).collect();
    let k = times.len();
    let (p_on, inv_mu) = (params.p_on(), 1.0 / params.mu());
    let mut w = vec![CompensatedSum::default(); k];
    let mut n = vec![CompensatedSum::default(); k];
    let mut wc = vec![CompensatedSum::default(); k];
    let mut nc = vec![CompensatedSum::default(); k];
    for _ in 0..m {
        stream_on_times(params, &times, rng, |j, work, count| {
            let count = count as f64;
            w[j].add(work);
            n[j].add(count);
            wc[j].add(work - times[j] * p_on);
            nc[j].add(count - times[j] * inv_mu);
        });
    }
    let collect = |v: Vec<CompensatedSum>| v.iter().map(CompensatedSum::value).collect();
    Ok(Superposed {
        grid: *grid,
        scaling: Scaling {
            sources: m,
            time_scale: a,
        },
        workload: collect(w),
        count: collect(n),
        centered_workload: collect(wc),
        centered_count: collect(nc),
    })
}

impl Superposed {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    /// `W_m(a t)` on the grid.
    pub fn workload_path(&self) -> SamplePath {
        self.path(self.workload.clone(), PathKind::Workload)
    }

    /// `N_m(a t)` on the grid.
    pub fn count_path(&self) -> SamplePath {
        self.path(self.count.clone(), PathKind::Count)
    }

    fn path(&self, values: Vec<f64>, kind: PathKind) -> SamplePath {
        SamplePath {
            grid: self.grid,
            values,
            kind,
            scaling: Some(self.scaling),
        }
    }

    /// Centred and normalised path from the per-source centred sums.
    pub fn rescaled(&self, spec: &RegimeSpec, kind: PathKind) -> Result<SamplePath> {
        check_scaling(Some(self.scaling), spec)?;
        let source = match kind {
            PathKind::Workload => &self.centered_workload,
            PathKind::Count => &self.centered_count,
            PathKind::Limit => return Err(Error::Mismatch("limit paths are not superposed".into())),
        };
        let values = source.iter().map(|v| v / spec.normalization).collect();
        Ok(self.path(values, kind))
    }
}

/// `W_m(a t)` for `m` fresh sources.
pub fn superpose_workload<R: Rng + ?Sized>(
    params: &SourceParams,
    m: usize,
    a: f64,
    grid: &Grid,
    rng: &mut R,
    budget: f64,
) -> Result<SamplePath> {
    Ok(superpose(params, m, a, grid, rng, budget)?.workload_path())
}

/// `N_m(a t)` for `m` fresh sources.
pub fn superpose_counts<R: Rng + ?Sized>(
    params: &SourceParams,
    m: usize,
    a: f64,
    grid: &Grid,
    rng: &mut R,
    budget: f64,
) -> Result<SamplePath> {
    Ok(superpose(params, m, a, grid, rng, budget)?.count_path())
}

fn check_scaling(scaling: Option<Scaling>, spec: &RegimeSpec) -> Result<()> {
    let Some(s) = scaling else {
        return Err(Error::Mismatch("path carries no superposition scaling".into()));
    };
    if s.sources != spec.m {
        return Err(Error::Mismatch(format!(
            "path has {} sources, regime expects {}",
            s.sources, spec.m
        )));
    }
    if (s.time_scale - spec.a).abs() > 1e-12 * spec.a {
        return Err(Error::Mismatch(format!(
            "path time scale {} differs from regime time scale {}",
            s.time_scale, spec.a
        )));
    }
    Ok(())
}

/// `(path(t) - m a t centering) / normalization`, with centering `mu_on/mu`
/// for workload and `1/mu` for counts.
pub fn center_rescale(
    path: &SamplePath,
    spec: &RegimeSpec,
    params: &SourceParams,
) -> Result<SamplePath> {
    check_scaling(path.scaling, spec)?;
    let centering = match path.kind {
        PathKind::Workload => params.p_on(),
        PathKind::Count => 1.0 / params.mu(),
        PathKind::Limit => return Err(Error::Mismatch("limit paths are already centred".into())),
    };
    let drift = spec.m as f64 * spec.a * centering;
    let values = path
        .grid
        .times()
        .zip(&path.values)
        .map(|(t, v)| (v - drift * t) / spec.normalization)
        .collect();
    Ok(SamplePath {
        grid: path.grid,
        values,
        kind: path.kind,
        scaling: path.scaling,
    })
}
