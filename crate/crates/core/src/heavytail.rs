//! Pareto-type duration laws, their equilibrium (integrated-tail) versions,
//! and totally right-skewed stable variates.
//!
//! The tail of a [`TailLaw`] is exactly `(scale / x)^alpha` above `scale`, so
//! the slowly varying factor of the regularly varying tail is the constant
//! `scale^alpha` and every normalisation below has a closed form.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform draw on `(0, 1]`.
#[inline]
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

fn check_index(name: &'static str, alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("tail index must lie in (1, 2), got {alpha}")))
    }
}

/// Pareto law with `P(X > x) = (scale / x)^alpha` for `x > scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTailLaw")]
pub struct TailLaw {
    alpha: f64,
    scale: f64,
}

#[derive(Deserialize)]
struct RawTailLaw {
    alpha: f64,
    scale: f64,
}

impl TryFrom<RawTailLaw> for TailLaw {
    type Error = crate::Error;

    fn try_from(raw: RawTailLaw) -> Result<Self> {
        TailLaw::new(raw.alpha, raw.scale)
    }
}

impl TailLaw {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        check_index("alpha", alpha)?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(invalid("scale", format!("must be finite and > 0, got {scale}")));
        }
        Ok(Self { alpha, scale })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Constant slowly varying factor `L = scale^alpha`.
    pub fn slowly_varying_constant(&self) -> f64 {
        self.scale.powf(self.alpha)
    }

    pub fn mean(&self) -> f64 {
        self.alpha * self.scale / (self.alpha - 1.0)
    }

    /// Survival function `P(X > x)`.
    pub fn tail(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(invalid("x", format!("must be >= 0, got {x}")));
        }
        Ok(self.tail_unchecked(x))
    }

    #[inline]
    fn tail_unchecked(&self, x: f64) -> f64 {
        if x <= self.scale {
            1.0
        } else {
            (self.scale / x).powf(self.alpha)
        }
    }

    /// Inverse-transform sample from a uniform `u` in `(0, 1]`.
    pub fn sample_duration(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(invalid("u", format!("must lie in (0, 1], got {u}")));
        }
        Ok(self.quantile_of_tail(u))
    }

    #[inline]
    fn quantile_of_tail(&self, u: f64) -> f64 {
        self.scale * u.powf(-1.0 / self.alpha)
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile_of_tail(open_unit(rng))
    }

    /// `F^eq(x) = (1/mean) * int_0^x tail(s) ds`.
    pub fn equilibrium_cdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(invalid("x", format!("must be >= 0, got {x}")));
        }
        let (a, b) = (self.alpha, self.scale);
        let integrated = if x <= b {
            x
        } else {
            b + b / (a - 1.0) * (1.0 - (b / x).powf(a - 1.0))
        };
        Ok(integrated / self.mean())
    }

    /// Survival function of the equilibrium law. Above the scale this is
    /// exactly `scale^alpha * x^(1-alpha) / (mean * (alpha-1))`.
    pub fn equilibrium_tail(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(invalid("x", format!("must be >= 0, got {x}")));
        }
        let (a, b) = (self.alpha, self.scale);
        Ok(if x <= b {
            1.0 - x / self.mean()
        } else {
            b * (b / x).powf(a - 1.0) / ((a - 1.0) * self.mean())
        })
    }

    /// Exact inverse of [`equilibrium_cdf`](Self::equilibrium_cdf) for `u` in `(0, 1)`.
    pub fn sample_equilibrium(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(invalid("u", format!("must lie in (0, 1), got {u}")));
        }
        Ok(self.equilibrium_from_complement(1.0 - u))
    }

    /// Inverse in terms of `v = 1 - u`; the upper branch simplifies to
    /// `scale * (alpha * v)^(-1/(alpha-1))`, which stays accurate as `v -> 0`.
    #[inline]
    fn equilibrium_from_complement(&self, v: f64) -> f64 {
        let a = self.alpha;
        if a * v >= 1.0 {
            (1.0 - v) * self.mean()
        } else {
            self.scale * (a * v).powf(-1.0 / (a - 1.0))
        }
    }

    #[inline]
    pub fn sample_equilibrium_with<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.equilibrium_from_complement(open_unit(rng))
    }
}

/// On- and off-period laws of one source. The on-periods carry the heavier tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSourceParams")]
pub struct SourceParams {
    on: TailLaw,
    off: TailLaw,
}

#[derive(Deserialize)]
struct RawSourceParams {
    on: TailLaw,
    off: TailLaw,
}

impl TryFrom<RawSourceParams> for SourceParams {
    type Error = crate::Error;

    fn try_from(raw: RawSourceParams) -> Result<Self> {
        SourceParams::new(raw.on, raw.off)
    }
}

impl SourceParams {
    pub fn new(on: TailLaw, off: TailLaw) -> Result<Self> {
        if !(on.alpha < off.alpha) {
            return Err(invalid(
                "alpha_on",
                format!(
                    "on index must be strictly below off index ({} >= {})",
                    on.alpha, off.alpha
                ),
            ));
        }
        Ok(Self { on, off })
    }

    /// `alpha_on = 1.5`, `alpha_off = 1.8`, unit scales.
    pub fn standard() -> Self {
        Self::new(
            TailLaw::new(1.5, 1.0).expect("valid law"),
            TailLaw::new(1.8, 1.0).expect("valid law"),
        )
        .expect("valid params")
    }

    pub fn on(&self) -> &TailLaw {
        &self.on
    }

    pub fn off(&self) -> &TailLaw {
        &self.off
    }

    pub fn mu_on(&self) -> f64 {
        self.on.mean()
    }

    pub fn mu_off(&self) -> f64 {
        self.off.mean()
    }

    /// Mean cycle length `mu_on + mu_off`.
    pub fn mu(&self) -> f64 {
        self.mu_on() + self.mu_off()
    }

    /// Stationary probability of the on-state.
    pub fn p_on(&self) -> f64 {
        self.mu_on() / self.mu()
    }
}

/// Chambers-Mallows-Stuck sampler for `S_alpha(1, 1, 0)`, whose
/// characteristic function is `exp(-|t|^alpha (1 - i tan(pi alpha / 2) sgn t))`.
#[derive(Debug, Clone, Copy)]
pub struct StableSkewed {
    alpha: f64,
    shift: f64,
    factor: f64,
}

impl StableSkewed {
    pub fn new(alpha: f64) -> Result<Self> {
        check_index("alpha", alpha)?;
        let tan = (FRAC_PI_2 * alpha).tan();
        Ok(Self {
            alpha,
            shift: tan.atan() / alpha,
            factor: (1.0 + tan * tan).powf(0.5 / alpha),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = self.alpha;
        let v = PI * (rng.random::<f64>() - 0.5);
        let w: f64 = Exp1.sample(rng);
        let rotated = a * (v + self.shift);
        self.factor * rotated.sin() / v.cos().powf(1.0 / a)
            * ((v - rotated).cos() / w).powf((1.0 - a) / a)
    }
}

/// One draw from `S_alpha(1, 1, 0)`; see [`StableSkewed`].
pub fn sample_stable_skewed<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    Ok(StableSkewed::new(alpha)?.sample(rng))
}

/// Slow-connection-rate normaliser `(1/tail)^{<-}(a m)`, which for the
/// constant-factor Pareto tail is `scale * (a m)^(1/alpha)`.
pub fn scr_normalization(law_on: &TailLaw, a: f64, m: f64) -> f64 {
    let am = a * m;
    if am < 1.0 {
        law_on.scale
    } else {
        law_on.scale * am.powf(1.0 / law_on.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::derive_stream;
    use num_complex::Complex64;

    fn law(a: f64, b: f64) -> TailLaw {
        TailLaw::new(a, b).unwrap()
    }

    /// Composite Simpson on `[lo, hi]` with a log-spaced change of variables.
    fn integrate_log(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
        let (a, b) = (lo.ln(), hi.ln());
        let h = (b - a) / n as f64;
        let g = |s: f64| {
            let x = s.exp();
            f(x) * x
        };
        let mut acc = g(a) + g(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * g(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn pareto_means() {
        assert_eq!(law(1.5, 1.0).mean(), 3.0);
        assert!((law(1.8, 1.0).mean() - 2.25).abs() < 1e-15);
        assert_eq!(law(1.5, 2.0).mean(), 6.0);
    }

    #[test]
    fn construction_rejects_out_of_range() {
        assert!(TailLaw::new(1.0, 1.0).is_err());
        assert!(TailLaw::new(2.0, 1.0).is_err());
        assert!(TailLaw::new(1.5, 0.0).is_err());
        assert!(TailLaw::new(1.5, -1.0).is_err());
        let on = law(1.8, 1.0);
        let off = law(1.5, 1.0);
        assert!(SourceParams::new(on, off).is_err());
        assert!(SourceParams::new(on, on).is_err());
    }

    #[test]
    fn source_params_derived_means() {
        let p = SourceParams::standard();
        assert_eq!(p.mu_on(), 3.0);
        assert!((p.mu() - 5.25).abs() < 1e-15);
        assert!((p.p_on() * p.mu() - p.mu_on()).abs() < 1e-15);
        assert!(p.p_on() > 0.0 && p.p_on() < 1.0);
    }

    #[test]
    fn tail_values() {
        assert!((law(1.5, 1.0).tail(4.0).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(law(1.5, 1.0).tail(0.5).unwrap(), 1.0);
        assert_eq!(law(1.8, 2.0).tail(2.0).unwrap(), 1.0);
        assert!(law(1.5, 1.0).tail(-1.0).is_err());
    }

    #[test]
    fn inverse_transform_values() {
        let l = law(1.5, 1.0);
        assert!((l.sample_duration(0.125).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(l.sample_duration(1.0).unwrap(), 1.0);
        assert!((l.sample_duration(0.25).unwrap() - 2.519_842_099_789_746).abs() < 1e-12);
        assert!(l.sample_duration(0.0).is_err());
        assert!(l.sample_duration(1.5).is_err());
    }

    #[test]
    fn equilibrium_cdf_values() {
        let l = law(1.5, 1.0);
        assert!((l.equilibrium_cdf(1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((l.equilibrium_cdf(4.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(l.equilibrium_cdf(0.0).unwrap(), 0.0);
        assert!(l.equilibrium_cdf(-0.1).is_err());
    }

    #[test]
    fn equilibrium_cdf_matches_quadrature_of_tail() {
        for l in [law(1.5, 1.0), law(1.8, 2.0), law(1.2, 0.5)] {
            for x in [0.3f64, 1.0, 4.0, 37.0, 1e3] {
                let lo = x.min(l.scale());
                let head = lo; // tail == 1 below the scale
                let body = if x > l.scale() {
                    integrate_log(|s| l.tail(s).unwrap(), l.scale(), x, 2000)
                } else {
                    0.0
                };
                let numeric = (head + body) / l.mean();
                let closed = l.equilibrium_cdf(x).unwrap();
                assert!((numeric - closed).abs() < 1e-9, "{x}: {numeric} vs {closed}");
            }
        }
    }

    #[test]
    fn equilibrium_inverse_values() {
        let l = law(1.5, 1.0);
        assert!((l.sample_equilibrium(2.0 / 3.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((l.sample_equilibrium(1.0 / 3.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((l.sample_equilibrium(1.0 / 6.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(l.sample_equilibrium(0.0).is_err());
        assert!(l.sample_equilibrium(1.0).is_err());
    }

    #[test]
    fn equilibrium_inverse_round_trips() {
        for l in [law(1.5, 1.0), law(1.8, 2.0), law(1.05, 3.0)] {
            for i in 1..200 {
                let u = i as f64 / 200.0;
                let x = l.sample_equilibrium(u).unwrap();
                assert!((l.equilibrium_cdf(x).unwrap() - u).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tail_integrates_to_mean() {
        for l in [law(1.5, 1.0), law(1.8, 1.0), law(1.5, 2.0)] {
            let x_max = 1e6;
            let numeric = l.scale() + integrate_log(|s| l.tail(s).unwrap(), l.scale(), x_max, 4000);
            let remainder = l.scale().powf(l.alpha()) * x_max.powf(1.0 - l.alpha()) / (l.alpha() - 1.0);
            assert!(((numeric + remainder) / l.mean() - 1.0).abs() < 1e-8);
            assert!((numeric / l.mean() - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn karamata_tail_of_equilibrium_law() {
        let l = law(1.8, 1.0);
        let x = 1e4;
        // numeric tail: (1/mean) int_x^inf tail, split at a far cutoff with the exact remainder
        let far = 1e12;
        let numeric = (integrate_log(|s| l.tail(s).unwrap(), x, far, 4000)
            + far.powf(1.0 - l.alpha()) / (l.alpha() - 1.0))
            / l.mean();
        let asymptotic = x.powf(-(l.alpha() - 1.0)) * l.slowly_varying_constant()
            / (l.mean() * (l.alpha() - 1.0));
        assert!((numeric / asymptotic - 1.0).abs() < 0.02);
        assert!((l.equilibrium_tail(x).unwrap() / asymptotic - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_tail_within_three_standard_errors() {
        let l = law(1.5, 1.0);
        let n = 100_000;
        let mut rng = derive_stream(11, 0);
        let draws: Vec<f64> = (0..n).map(|_| l.sample(&mut rng)).collect();
        for x in [2.0, 4.0, 8.0] {
            let p = l.tail(x).unwrap();
            let hat = draws.iter().filter(|&&d| d > x).count() as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((hat - p).abs() <= 3.0 * se, "x={x}: {hat} vs {p}");
        }
    }

    #[test]
    fn empirical_equilibrium_cdf_within_three_standard_errors() {
        let l = law(1.5, 1.0);
        let n = 100_000;
        let mut rng = derive_stream(12, 0);
        let draws: Vec<f64> = (0..n).map(|_| l.sample_equilibrium_with(&mut rng)).collect();
        for i in 1..=10 {
            let q = i as f64 / 11.0;
            let x = l.sample_equilibrium(q).unwrap();
            let hat = draws.iter().filter(|&&d| d <= x).count() as f64 / n as f64;
            let se = (q * (1.0 - q) / n as f64).sqrt();
            assert!((hat - q).abs() <= 3.0 * se, "q={q}: {hat}");
        }
    }

    fn target_cf(alpha: f64, theta: f64) -> Complex64 {
        let tan = (PI * alpha / 2.0).tan();
        let s = theta.signum();
        (-theta.abs().powf(alpha) * Complex64::new(1.0, -tan * s)).exp()
    }

    #[test]
    fn stable_sampler_matches_characteristic_function() {
        let alpha = 1.5;
        let sampler = StableSkewed::new(alpha).unwrap();
        let mut rng = derive_stream(13, 0);
        let draws: Vec<f64> = (0..100_000).map(|_| sampler.sample(&mut rng)).collect();
        let thetas = crate::stats::theta_grid();
        let ecf = crate::stats::ecf(&draws, &thetas).unwrap();
        for (th, e) in thetas.iter().zip(&ecf) {
            let d = (e - target_cf(alpha, *th)).norm();
            assert!(d <= 0.02, "theta={th}: {d}");
        }
        assert_eq!(crate::stats::ecf(&draws, &[0.0]).unwrap()[0], Complex64::new(1.0, 0.0));
        let one = crate::stats::ecf(&draws, &[1.0]).unwrap()[0];
        assert!((one.norm() - (-1f64).exp()).abs() < 0.02);
        let median = {
            let mut s = draws.clone();
            s.sort_by(f64::total_cmp);
            s[s.len() / 2]
        };
        // right-skewed: heavy right tail pulls far quantiles apart asymmetrically
        assert!(crate::stats::skewness(&draws).unwrap() > 0.0);
        let mut sorted = draws;
        sorted.sort_by(f64::total_cmp);
        let q01 = sorted[1_000];
        let q99 = sorted[99_000];
        assert!(q99 - median > median - q01);
    }

    #[test]
    fn stable_rejects_bad_index() {
        let mut rng = derive_stream(0, 0);
        assert!(sample_stable_skewed(2.0, &mut rng).is_err());
        assert!(sample_stable_skewed(0.9, &mut rng).is_err());
    }

    #[test]
    fn scr_normaliser_values() {
        assert!((scr_normalization(&law(1.5, 1.0), 1e3, 1e3) - 1e4).abs() < 1e-8);
        assert!((scr_normalization(&law(1.5, 2.0), 1e3, 1e3) - 2e4).abs() < 1e-8);
        assert_eq!(scr_normalization(&law(1.5, 1.0), 1.0, 1.0), 1.0);
        assert_eq!(scr_normalization(&law(1.5, 3.0), 0.1, 1.0), 3.0);
        // defining property: tail(b) = 1/(am)
        let l = law(1.7, 2.5);
        let b = scr_normalization(&l, 37.0, 91.0);
        assert!((l.tail(b).unwrap() * 37.0 * 91.0 - 1.0).abs() < 1e-12);
    }
}
