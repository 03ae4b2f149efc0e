//! Fixed workloads shared by the benchmarks.

use selmut_core::{presets, Landscape, SamplingPlan};

pub struct Workload {
    pub landscape: Landscape,
    pub initial: Vec<f64>,
    pub plan: SamplingPlan,
}

/// The asymmetric reference problem on the reference grid.
pub fn reference() -> Workload {
    let landscape = presets::asymmetric_landscape();
    let initial = presets::uniform_initial(landscape.grid());
    Workload {
        landscape,
        initial,
        plan: SamplingPlan::default().with_splits(&[presets::SPLIT]),
    }
}

/// The same landscape on a grid with `n_points` nodes.
pub fn refined(n_points: usize) -> Workload {
    let grid = selmut_core::Grid1D::new(presets::X_MIN, presets::X_MAX, n_points)
        .expect("benchmark grid is valid");
    let landscape = presets::asymmetric_landscape_on(grid);
    let initial = presets::uniform_initial(&grid);
    Workload {
        landscape,
        initial,
        plan: SamplingPlan::default(),
    }
}
