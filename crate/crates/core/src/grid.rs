//! Uniform node-centred discretisation of a 1-D trait interval and the
//! trapezoid quadrature used for every integral in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[x_min, x_max]` with `n_points` nodes, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {n_points}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "empty or non-finite interval [{x_min}, {x_max}]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    /// Node `k`, computed directly from the index so there is no drift.
    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.node(k)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_points).map(|k| f(self.node(k))).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Index of the node nearest to `x`, clamped to the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let k = ((x - self.x_min) / self.spacing()).round();
        k.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Trapezoid weights: `h/2` at both ends, `h` elsewhere.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.n_points];
        w[0] = 0.5 * h;
        w[self.n_points - 1] = 0.5 * h;
        w
    }

    /// Composite trapezoid rule `h (v_0/2 + v_1 + ... + v_{K-1}/2)`.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        let last = values.len() - 1;
        let inner: f64 = values[1..last].iter().sum();
        self.spacing() * (0.5 * (values[0] + values[last]) + inner)
    }

    /// Weighted inner product `∫ u v` under the trapezoid rule.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let last = u.len() - 1;
        let inner: f64 = (1..last).map(|k| u[k] * v[k]).sum();
        self.spacing() * (0.5 * (u[0] * v[0] + u[last] * v[last]) + inner)
    }

    /// Exact integral over `[a, b]` of the piecewise-linear interpolant of
    /// `values`. Over the full interval it reduces to the trapezoid rule, and
    /// integrals over adjacent sub-intervals add up.
    pub fn integrate_between(&self, values: &[f64], a: f64, b: f64) -> f64 {
        let a = a.max(self.x_min);
        let b = b.min(self.x_max);
        if b <= a {
            return 0.0;
        }
        let h = self.spacing();
        let first = (((a - self.x_min) / h).floor() as usize).min(self.n_points - 2);
        let last = (((b - self.x_min) / h).ceil() as usize).min(self.n_points - 1);
        let mut total = 0.0;
        for k in first..last {
            let x0 = self.node(k);
            let x1 = self.node(k + 1);
            let lo = a.max(x0);
            let hi = b.min(x1);
            if hi <= lo {
                continue;
            }
            let slope = (values[k + 1] - values[k]) / (x1 - x0);
            let at = |x: f64| values[k] + slope * (x - x0);
            total += 0.5 * (hi - lo) * (at(lo) + at(hi));
        }
        total
    }

    /// Integrals over the sub-intervals cut by `splits` (sorted ascending).
    pub fn region_masses(&self, values: &[f64], splits: &[f64]) -> Vec<f64> {
        let mut edges = Vec::with_capacity(splits.len() + 2);
        edges.push(self.x_min);
        edges.extend_from_slice(splits);
        edges.push(self.x_max);
        edges
            .windows(2)
            .map(|w| self.integrate_between(values, w[0], w[1]))
            .collect()
    }
}
