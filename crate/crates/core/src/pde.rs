//! Selection with mutation: `∂n/∂t - βΔn = (r(x) - ρ(t)) n` under a
//! zero-flux boundary, discretised by the method of lines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::landscape::Landscape;
use crate::trajectory::{integrate, validate_density, SamplingPlan, Trajectory};

/// Safety factor applied to both explicit-Euler step limits.
pub const STABILITY_SAFETY: f64 = 0.9;

/// Second-difference Laplacian with mirrored ghost nodes: interior stencil
/// `(1, -2, 1)/h²`, boundary rows `(-2, 2)/h²`. Self-adjoint in the
/// trapezoid inner product, so it conserves trapezoid mass exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeumannLaplacian {
    grid: Grid1D,
}

impl NeumannLaplacian {
    pub fn new(grid: Grid1D) -> Self {
        Self { grid }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let h = self.grid.spacing();
        let inv_h2 = 1.0 / (h * h);
        let last = u.len() - 1;
        out[0] = inv_h2 * (2.0 * u[1] - 2.0 * u[0]);
        for j in 1..last {
            out[j] = inv_h2 * ((u[j - 1] + u[j + 1]) - 2.0 * u[j]);
        }
        out[last] = inv_h2 * (2.0 * u[last - 1] - 2.0 * u[last]);
    }

    /// Diagonal and super-/sub-diagonal of the operator as a (non-symmetric)
    /// tridiagonal matrix: `(lower, diag, upper)`.
    pub fn bands(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let len = self.grid.len();
        let inv_h2 = 1.0 / (self.grid.spacing() * self.grid.spacing());
        let diag = vec![-2.0 * inv_h2; len];
        let mut lower = vec![inv_h2; len - 1];
        let mut upper = vec![inv_h2; len - 1];
        upper[0] = 2.0 * inv_h2;
        lower[len - 2] = 2.0 * inv_h2;
        (lower, diag, upper)
    }
}

/// Largest stable forward-Euler step: `0.9 · min(h²/(2β), 1/(r_M + ρ_M))`.
pub fn stability_bound(beta: f64, h: f64, r_max: f64, rho_max: f64) -> f64 {
    let diffusive = if beta > 0.0 {
        h * h / (2.0 * beta)
    } else {
        f64::INFINITY
    };
    let reactive = 1.0 / (r_max + rho_max);
    STABILITY_SAFETY * diffusive.min(reactive)
}

/// Bound for a concrete problem, with `ρ_M = max(r_M, ρ(0))`.
pub fn stability_bound_for(landscape: &Landscape, beta: f64, initial: &[f64]) -> f64 {
    let grid = landscape.grid();
    let r_max = landscape.grid_max();
    let rho_max = r_max.max(grid.trapezoid(initial));
    stability_bound(beta, grid.spacing(), r_max, rho_max)
}

/// Forward-Euler method-of-lines solution. `dt` above [`stability_bound_for`]
/// is rejected before any step is taken.
pub fn simulate_pde(
    landscape: &Landscape,
    beta: f64,
    initial: &[f64],
    dt: f64,
    t_final: f64,
    plan: &SamplingPlan,
) -> Result<Trajectory> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "mutation rate must be non-negative, got {beta}"
        )));
    }
    validate_density(landscape.grid(), initial)?;
    let bound = stability_bound_for(landscape, beta, initial);
    if dt > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }
    integrate(landscape, beta, initial, dt, t_final, plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ide::simulate_ide;
    use crate::presets;

    #[test]
    fn laplacian_kills_constants() {
        let grid = Grid1D::new(-1.0, 2.0, 50).unwrap();
        let lap = NeumannLaplacian::new(grid);
        let mut out = vec![1.0; 50];
        lap.apply(&[3.5; 50], &mut out);
        assert!(out.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn laplacian_is_trapezoid_mass_free() {
        let grid = Grid1D::new(-1.0, 2.0, 200).unwrap();
        let lap = NeumannLaplacian::new(grid);
        let u = grid.sample(|x| (5.0 * x).cos() + x * x * x);
        let mut out = vec![0.0; 200];
        lap.apply(&u, &mut out);
        let scale: f64 = out.iter().map(|v| v.abs()).sum::<f64>() * grid.spacing();
        assert!(grid.trapezoid(&out).abs() <= 1e-13 * scale);
    }

    #[test]
    fn bound_examples() {
        let h = 3.0 / 999.0;
        let b = stability_bound(1e-6, h, 1.0, 2.0);
        assert!((b - 0.3).abs() < 1e-12);
        assert_eq!(stability_bound(0.0, h, 1.0, 2.0), 0.9 / 3.0);
        let b = stability_bound(1e-3, h, 1.0, 2.0);
        assert!((b - 0.9 * h * h / 2e-3).abs() < 1e-15);
        assert!((b - 4.06e-3).abs() < 1e-5);
    }

    #[test]
    fn unstable_step_is_rejected_up_front() {
        let r = presets::asymmetric_landscape();
        let n0 = presets::uniform_initial(r.grid());
        match simulate_pde(&r, 1e-3, &n0, 0.01, 1.0, &SamplingPlan::default()) {
            Err(Error::StepTooLarge { dt, bound }) => {
                assert_eq!(dt, 0.01);
                assert!(bound < 0.005);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn zero_mutation_matches_selection_bitwise() {
        let r = presets::asymmetric_landscape();
        let n0 = presets::uniform_initial(r.grid());
        let plan = SamplingPlan::default()
            .with_splits(&[0.5])
            .with_snapshots(&[3.0]);
        let a = simulate_pde(&r, 0.0, &n0, 0.01, 5.0, &plan).unwrap();
        let b = simulate_ide(&r, &n0, 0.01, 5.0, &plan).unwrap();
        assert_eq!(a.rho, b.rho);
        assert_eq!(a.regions, b.regions);
        assert_eq!(a.final_state, b.final_state);
    }

    #[test]
    fn pure_diffusion_spreads_towards_uniform() {
        let grid = Grid1D::new(0.0, 1.0, 101).unwrap();
        // r tiny and flat: dynamics dominated by diffusion
        let r = Landscape::constant(1e-12, grid).unwrap();
        let n0 = grid.sample(|x| if x < 0.3 { 1.0 } else { 0.0 });
        let traj = simulate_pde(&r, 1e-2, &n0, 4e-3, 80.0, &SamplingPlan::default()).unwrap();
        let n = &traj.final_state.density;
        let (lo, hi) = n
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
        assert!(hi - lo < 0.05 * hi);
    }
}
