//! Population states, sampling plans and recorded trajectories, plus the
//! forward-Euler engine shared by the selection and selection-mutation
//! solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::landscape::Landscape;

/// Negative values above `-NEGATIVITY_TOL * max(n)` are rounding noise and
/// get clamped; anything below is a scheme violation.
pub const NEGATIVITY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationState {
    pub grid: Grid1D,
    pub density: Vec<f64>,
    pub time: f64,
}

impl PopulationState {
    pub fn new(grid: Grid1D, density: Vec<f64>, time: f64) -> Result<Self> {
        validate_density(&grid, &density)?;
        Ok(Self {
            grid,
            density,
            time,
        })
    }

    /// Total mass `ρ` by the trapezoid rule.
    pub fn mass(&self) -> f64 {
        self.grid.trapezoid(&self.density)
    }
}

/// Non-negative, finite, not identically zero, one value per node.
pub fn validate_density(grid: &Grid1D, density: &[f64]) -> Result<()> {
    if density.len() != grid.len() {
        return Err(Error::InvalidInput(format!(
            "density has {} values for {} grid nodes",
            density.len(),
            grid.len()
        )));
    }
    if density.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidInput(
            "density must be finite and non-negative".into(),
        ));
    }
    if density.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidInput("density is identically zero".into()));
    }
    Ok(())
}

/// Which steps get recorded: every step up to `dense_until`, then every
/// `interval`, plus full density snapshots at `snapshot_times`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub dense_until: f64,
    pub interval: f64,
    pub snapshot_times: Vec<f64>,
    /// Points cutting the domain into regions whose masses are tracked.
    pub splits: Vec<f64>,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            dense_until: 1.0,
            interval: 0.1,
            snapshot_times: Vec::new(),
            splits: Vec::new(),
        }
    }
}

impl SamplingPlan {
    pub fn with_splits(mut self, splits: &[f64]) -> Self {
        self.splits = splits.to_vec();
        self
    }

    pub fn with_snapshots(mut self, times: &[f64]) -> Self {
        self.snapshot_times = times.to_vec();
        self
    }

    pub fn with_interval(mut self, interval: f64) -> Self {
        self.interval = interval;
        self
    }

    fn validate(&self, grid: &Grid1D, t_final: f64) -> Result<()> {
        if !(self.interval > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sampling interval must be positive, got {}",
                self.interval
            )));
        }
        if let Some(s) = self.splits.iter().find(|s| !grid.contains(**s)) {
            return Err(Error::InvalidInput(format!(
                "split point {s} outside the domain"
            )));
        }
        if self.splits.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "split points must be strictly increasing".into(),
            ));
        }
        if let Some(t) = self
            .snapshot_times
            .iter()
            .find(|t| !(**t >= 0.0 && **t <= t_final))
        {
            return Err(Error::InvalidInput(format!(
                "snapshot time {t} outside [0, {t_final}]"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub dt: f64,
    /// Mutation rate; zero for the pure selection model.
    pub beta: f64,
    pub splits: Vec<f64>,
    pub times: Vec<f64>,
    pub rho: Vec<f64>,
    /// `regions[k][i]`: mass of region `i` at `times[k]`.
    pub regions: Vec<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: PopulationState,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectories hold at least one sample")
    }

    pub fn final_rho(&self) -> f64 {
        *self
            .rho
            .last()
            .expect("trajectories hold at least one sample")
    }

    pub fn final_regions(&self) -> &[f64] {
        self.regions.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Time series of region `i`.
    pub fn region_series(&self, i: usize) -> Vec<f64> {
        self.regions.iter().map(|r| r[i]).collect()
    }

    /// Region masses of every stored snapshot for an arbitrary split.
    pub fn masses_in_regions(&self, splits: &[f64]) -> Vec<(f64, Vec<f64>)> {
        self.snapshots
            .iter()
            .map(|s| (s.time, masses_in_regions(&self.grid, &s.density, splits)))
            .collect()
    }
}

/// Trapezoid masses of `density` over the sub-intervals cut by `splits`.
pub fn masses_in_regions(grid: &Grid1D, density: &[f64], splits: &[f64]) -> Vec<f64> {
    grid.region_masses(density, splits)
}

/// Forward Euler for `∂n/∂t = βΔ_h n + (r - ρ(t)) n` with `ρ` taken from
/// the start-of-step density. `beta == 0` skips the diffusion term.
pub(crate) fn integrate(
    landscape: &Landscape,
    beta: f64,
    initial: &[f64],
    dt: f64,
    t_final: f64,
    plan: &SamplingPlan,
) -> Result<Trajectory> {
    let grid = *landscape.grid();
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "t_final must be positive, got {t_final}"
        )));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "mutation rate must be non-negative, got {beta}"
        )));
    }
    validate_density(&grid, initial)?;
    plan.validate(&grid, t_final)?;

    let steps = (t_final / dt).round() as usize;
    let stride = ((plan.interval / dt).round() as usize).max(1);
    let dense_steps = (plan.dense_until / dt).round().max(0.0) as usize;
    let mut snapshot_steps: Vec<usize> = plan
        .snapshot_times
        .iter()
        .map(|t| (t / dt).round() as usize)
        .collect();
    snapshot_steps.sort_unstable();
    snapshot_steps.dedup();

    let r = landscape.values();
    let len = grid.len();
    let last = len - 1;
    let diffusion = beta / (grid.spacing() * grid.spacing());

    let mut n = initial.to_vec();
    let mut next = vec![0.0; len];
    let mut times = Vec::new();
    let mut rho_series = Vec::new();
    let mut regions = Vec::new();
    let mut snapshots = Vec::new();
    let mut snap_iter = snapshot_steps.iter().peekable();

    for k in 0..=steps {
        let t = k as f64 * dt;
        let rho = grid.trapezoid(&n);
        if !rho.is_finite() {
            return Err(Error::Instability {
                t,
                reason: format!("total mass became {rho}; dt = {dt} is too large"),
            });
        }
        if k <= dense_steps || k % stride == 0 || k == steps {
            times.push(t);
            rho_series.push(rho);
            regions.push(grid.region_masses(&n, &plan.splits));
        }
        while snap_iter.next_if(|&&s| s == k).is_some() {
            snapshots.push(Snapshot {
                time: t,
                density: n.clone(),
            });
        }
        if k == steps {
            break;
        }

        if beta == 0.0 {
            for j in 0..len {
                next[j] = n[j] + dt * ((r[j] - rho) * n[j]);
            }
        } else {
            next[0] = n[0] + dt * (diffusion * (2.0 * n[1] - 2.0 * n[0]) + (r[0] - rho) * n[0]);
            for j in 1..last {
                let lap = (n[j - 1] + n[j + 1]) - 2.0 * n[j];
                next[j] = n[j] + dt * (diffusion * lap + (r[j] - rho) * n[j]);
            }
            next[last] = n[last]
                + dt * (diffusion * (2.0 * n[last - 1] - 2.0 * n[last])
                    + (r[last] - rho) * n[last]);
        }

        let scale = n.iter().copied().fold(0.0, f64::max);
        for (j, v) in next.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v < -NEGATIVITY_TOL * scale {
                    return Err(Error::NegativeDensity {
                        t: t + dt,
                        node: j,
                        value: *v,
                    });
                }
                *v = 0.0;
            }
        }
        std::mem::swap(&mut n, &mut next);
    }

    let final_time = steps as f64 * dt;
    Ok(Trajectory {
        grid,
        dt,
        beta,
        splits: plan.splits.clone(),
        times,
        rho: rho_series,
        regions,
        snapshots,
        final_state: PopulationState {
            grid,
            density: n,
            time: final_time,
        },
    })
}
