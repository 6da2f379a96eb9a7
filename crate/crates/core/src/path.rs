//! Uniform time grids and processes sampled on them.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform grid `0 = t_0 < t_1 < ... < t_{points-1} = t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    t_max: f64,
    points: usize,
}

impl Grid {
    /// Number of intervals used when only the horizon is given.
    pub const DEFAULT_INTERVALS: usize = 512;

    pub fn new(t_max: f64, points: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(invalid("t_max", format!("must be finite and > 0, got {t_max}")));
        }
        if points < 2 {
            return Err(invalid("points", format!("need at least 2, got {points}")));
        }
        Ok(Self { t_max, points })
    }

    pub fn with_default_resolution(t_max: f64) -> Result<Self> {
        Self::new(t_max, Self::DEFAULT_INTERVALS + 1)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dt(&self) -> f64 {
        self.t_max / (self.points - 1) as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        if j + 1 == self.points {
            self.t_max
        } else {
            j as f64 * self.dt()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|j| self.time(j))
    }

    /// Index of the grid point equal to `t` (within roundoff), if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let j = (t / self.dt()).round();
        if j < 0.0 || j as usize >= self.points {
            return None;
        }
        let j = j as usize;
        ((self.time(j) - t).abs() <= 1e-9 * self.t_max.max(1.0)).then_some(j)
    }
}

/// What a sampled path represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Workload,
    Count,
    Limit,
}

/// Source count and time scale a superposed path was produced with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub sources: usize,
    pub time_scale: f64,
}

/// A process evaluated on every point of a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub kind: PathKind,
    pub scaling: Option<Scaling>,
}

impl SamplePath {
    pub fn dt(&self) -> f64 {
        self.grid.dt()
    }

    /// Value at grid time `t`; `None` when `t` is not a grid point.
    pub fn at(&self, t: f64) -> Option<f64> {
        self.grid.index_of(t).map(|j| self.values[j])
    }

    /// Successive differences `values[j+1] - values[j]`.
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = Grid::new(1.0, 513).unwrap();
        assert_eq!(g.time(0), 0.0);
        assert_eq!(g.time(512), 1.0);
        assert_eq!(g.index_of(0.5), Some(256));
        assert_eq!(g.index_of(0.5001), None);
        assert!((g.dt() - 1.0 / 512.0).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_bad_inputs() {
        assert!(Grid::new(0.0, 10).is_err());
        assert!(Grid::new(1.0, 1).is_err());
        assert!(Grid::new(f64::NAN, 10).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }
}
