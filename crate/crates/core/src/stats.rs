//! Estimators and two-sample statistics used by the verification experiments.
//! Everything here is a pure function of its input samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Unbiased sample covariance of paired samples.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "paired samples differ in length");
    let (mx, my) = (mean(xs), mean(ys));
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    covariance(xs, ys) / (variance(xs) * variance(ys)).sqrt()
}

/// Standardised third central moment (moment estimator).
pub fn skewness(xs: &[f64]) -> Result<f64> {
    if xs.len() < 3 {
        return Err(invalid("samples", "skewness needs at least 3 samples"));
    }
    let n = xs.len() as f64;
    let m = mean(xs);
    let (m2, m3) = xs.iter().fold((0.0, 0.0), |(a, b), x| {
        let d = x - m;
        (a + d * d, b + d * d * d)
    });
    let (m2, m3) = (m2 / n, m3 / n);
    if m2 <= 0.0 {
        return Err(Error::Degenerate("zero variance".into()));
    }
    Ok(m3 / m2.powf(1.5))
}

/// Monte Carlo summary of one scalar quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl MCEstimate {
    pub fn from_samples(xs: &[f64], seed: u64) -> Result<Self> {
        if xs.len() < 2 {
            return Err(invalid("samples", "need at least 2 replications"));
        }
        let variance = variance(xs);
        Ok(Self {
            n: xs.len(),
            mean: mean(xs),
            variance,
            std_error: (variance / xs.len() as f64).sqrt(),
            seed,
        })
    }

    /// Whether `target` lies within `k` standard errors of the mean.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }

    /// Approximate standard error of the sample variance, using the sample fourth moment.
    pub fn variance_std_error(xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let m = mean(xs);
        let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
        let v = variance(xs);
        ((m4 - v * v * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt()
    }
}

/// The comparison grid `{-5, -4.5, ..., 5}`.
pub fn theta_grid() -> Vec<f64> {
    (-10..=10).map(|k| k as f64 * 0.5).collect()
}

/// Empirical characteristic function `(1/n) sum exp(i theta x_j)` at each theta.
pub fn ecf(samples: &[f64], thetas: &[f64]) -> Result<Vec<Complex64>> {
    if samples.is_empty() {
        return Err(invalid("samples", "empty sample"));
    }
    let n = samples.len() as f64;
    Ok(thetas
        .iter()
        .map(|&th| {
            if th == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let (re, im) = samples.iter().fold((0.0, 0.0), |(re, im), &x| {
                let (s, c) = (th * x).sin_cos();
                (re + c, im + s)
            });
            Complex64::new(re / n, im / n)
        })
        .collect())
}

/// `max_theta |ecf_a(theta) - ecf_b(theta)|` over `thetas`.
pub fn ecf_distance(a: &[f64], b: &[f64], thetas: &[f64]) -> Result<f64> {
    let (ea, eb) = (ecf(a, thetas)?, ecf(b, thetas)?);
    Ok(ea.iter().zip(&eb).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("samples", "both samples must be nonempty"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Asymptotic 1% critical value `1.628 sqrt((n+m)/(n m))`.
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Minimum number of blocks at every aggregation level.
pub const MIN_BLOCKS: usize = 32;
/// Minimum number of aggregation levels.
pub const MIN_LEVELS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub hurst: f64,
    pub slope: f64,
    /// `(block size, variance of block means)` per level.
    pub levels: Vec<(usize, f64)>,
}

/// Variance-time estimate of the Hurst index from one or more independent
/// increment series of a stationary-increment process.
///
/// Block sizes run over powers of two while every series still has at
/// least [`MIN_BLOCKS`] blocks. At each level the variance of block means is
/// pooled across series, about `known_mean` when given and about each
/// series' own mean otherwise. The slope of log-variance against log block
/// size gives `H = 1 + slope / 2`.
pub fn hurst_variance_time(series: &[&[f64]], known_mean: Option<f64>) -> Result<HurstEstimate> {
    let Some(shortest) = series.iter().map(|s| s.len()).min() else {
        return Err(invalid("series", "no series given"));
    };
    let mut levels = Vec::new();
    let mut k = 1usize;
    while shortest / k >= MIN_BLOCKS {
        let mut pooled = 0.0;
        for s in series {
            let blocks = s.len() / k;
            let means: Vec<f64> = s.chunks_exact(k).map(|c| c.iter().sum::<f64>() / k as f64).collect();
            pooled += match known_mean {
                Some(mu) => means.iter().map(|m| (m - mu).powi(2)).sum::<f64>() / blocks as f64,
                None => variance(&means),
            };
        }
        let v = pooled / series.len() as f64;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Degenerate(format!("block-mean variance {v} at block size {k}")));
        }
        levels.push((k, v));
        k *= 2;
    }
    if levels.len() < MIN_LEVELS {
        return Err(invalid(
            "series",
            format!(
                "length {shortest} gives {} aggregation levels; need {MIN_LEVELS} with {MIN_BLOCKS} blocks each",
                levels.len()
            ),
        ));
    }
    let xs: Vec<f64> = levels.iter().map(|(k, _)| (*k as f64).ln()).collect();
    let ys: Vec<f64> = levels.iter().map(|(_, v)| v.ln()).collect();
    let slope = covariance(&xs, &ys) / variance(&xs);
    Ok(HurstEstimate {
        hurst: 1.0 + slope / 2.0,
        slope,
        levels,
    })
}

/// Hill estimator from the `k` largest observations:
/// `[ (1/k) sum_{i<=k} ln X_(i) - ln X_(k+1) ]^(-1)` with `X_(1) >= X_(2) >= ...`.
pub fn hill_tail_index(samples: &[f64], k: usize) -> Result<f64> {
    if k < 50 {
        return Err(invalid("k", format!("need k >= 50, got {k}")));
    }
    if k >= samples.len() {
        return Err(invalid("k", format!("k = {k} must be below the sample size {}", samples.len())));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let threshold = sorted[k];
    if !(threshold > 0.0) {
        return Err(invalid("samples", "top order statistics must be positive"));
    }
    let spacing = sorted[..k].iter().map(|x| (x / threshold).ln()).sum::<f64>() / k as f64;
    if !(spacing > 0.0) {
        return Err(Error::Degenerate("zero log-spacings among the top order statistics".into()));
    }
    Ok(1.0 / spacing)
}
