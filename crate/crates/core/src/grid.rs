//! Functions sampled on a uniform grid of [0, 1].

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("non-finite value at grid index {0}")]
    NonFinite(usize),
    #[error("grid sizes differ ({0} vs {1})")]
    Mismatch(usize, usize),
    #[error("window [{0}, {1}] is empty or outside [0, 1]")]
    EmptyWindow(f64, f64),
}

/// Values at `t_i = i / (n - 1)`, `i = 0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

pub const MIN_GRID_POINTS: usize = 3;

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() < MIN_GRID_POINTS {
            return Err(GridError::TooFewPoints {
                min: MIN_GRID_POINTS,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(GridError::NonFinite(i));
        }
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self, GridError> {
        Self::new((0..n).map(|i| f(grid_point(n, i))).collect())
    }

    pub fn constant(n: usize, c: f64) -> Result<Self, GridError> {
        Self::from_fn(n, |_| c)
    }

    pub fn zeros(n: usize) -> Result<Self, GridError> {
        Self::constant(n, 0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.len() - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        grid_point(self.len(), i)
    }

    pub fn ts(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.t(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Piecewise-linear interpolant at `x`, clamped to [0, 1].
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.len();
        let pos = x.clamp(0.0, 1.0) * (n - 1) as f64;
        let cell = (pos.floor() as usize).min(n - 2);
        let lambda = pos - cell as f64;
        (1.0 - lambda) * self.values[cell] + lambda * self.values[cell + 1]
    }

    /// `‖w‖_∞` over the grid values.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Minimum over grid points in `[a, b]`, with fractional endpoints
    /// included through linear interpolation.
    pub fn min_on_window(&self, a: f64, b: f64) -> Result<f64, GridError> {
        if !(a <= b) || a < 0.0 || b > 1.0 {
            return Err(GridError::EmptyWindow(a, b));
        }
        let mut m = self.interpolate(a).min(self.interpolate(b));
        for (t, &x) in self.ts().zip(&self.values) {
            if t >= a && t <= b {
                m = m.min(x);
            }
        }
        Ok(m)
    }

    pub fn distance(&self, other: &Self) -> Result<f64, GridError> {
        if self.len() != other.len() {
            return Err(GridError::Mismatch(self.len(), other.len()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Resamples onto an `n`-point grid by linear interpolation.
    pub fn resample(&self, n: usize) -> Result<Self, GridError> {
        Self::from_fn(n, |t| self.interpolate(t))
    }
}

pub(crate) fn grid_point(n: usize, i: usize) -> f64 {
    if i + 1 == n {
        1.0
    } else {
        i as f64 / (n - 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn norms_and_windows() {
        let w = GridFunction::from_fn(1025, |t| t * (1.0 - t)).unwrap();
        assert!((w.sup_norm() - 0.25).abs() < 1e-6);
        assert!((w.min_on_window(0.25, 0.75).unwrap() - 3.0 / 16.0).abs() < 1e-15);

        let c = GridFunction::constant(17, 5.0).unwrap();
        assert_eq!(c.sup_norm(), 5.0);
        assert_eq!(c.min_on_window(0.25, 0.75).unwrap(), 5.0);

        let s = GridFunction::from_fn(1025, |t| (PI * t).sin()).unwrap();
        assert!((s.sup_norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn fractional_window_endpoints_interpolate() {
        let w = GridFunction::from_fn(3, |t| t).unwrap();
        // grid {0, .5, 1}; window [0.1, 0.4] holds no grid point
        assert!((w.min_on_window(0.1, 0.4).unwrap() - 0.1).abs() < 1e-15);
        assert!(w.min_on_window(0.6, 0.4).is_err());
        assert!(w.min_on_window(-0.1, 0.4).is_err());
    }

    #[test]
    fn construction_errors() {
        assert!(GridFunction::new(vec![0.0, 1.0]).is_err());
        assert_eq!(
            GridFunction::new(vec![0.0, f64::NAN, 1.0]).unwrap_err(),
            GridError::NonFinite(1)
        );
    }

    #[test]
    fn interpolation_is_exact_for_lines() {
        let w = GridFunction::from_fn(9, |t| 2.0 * t - 1.0).unwrap();
        for x in [0.0, 0.1, 0.33, 0.5, 0.999, 1.0] {
            assert!((w.interpolate(x) - (2.0 * x - 1.0)).abs() < 1e-14);
        }
        assert_eq!(w.t(8), 1.0);
    }
}
