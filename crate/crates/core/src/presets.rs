//! The two benchmark landscapes and the reference discretisation.

use crate::grid::Grid1D;
use crate::landscape::{GaussianBump, Landscape};

pub const X_MIN: f64 = -1.0;
pub const X_MAX: f64 = 2.0;
pub const N_POINTS: usize = 1000;
pub const DT: f64 = 0.01;
/// Uniform initial level giving total mass 2 on `[-1, 2]`.
pub const INITIAL_LEVEL: f64 = 2.0 / 3.0;
pub const MUTATION_RATE: f64 = 1e-6;
pub const SPLIT: f64 = 0.5;

pub fn grid() -> Grid1D {
    Grid1D::new(X_MIN, X_MAX, N_POINTS).expect("reference grid is valid")
}

fn bump(a: f64, c: f64, s: f64) -> GaussianBump {
    GaussianBump::new(a, c, s).expect("preset bump is valid")
}

/// A narrow peak at -0.5 (`r'' = -200`) and a wide one at 1 (`r'' = -20`).
pub fn asymmetric_landscape() -> Landscape {
    asymmetric_landscape_on(grid())
}

pub fn asymmetric_landscape_on(grid: Grid1D) -> Landscape {
    Landscape::new(vec![bump(1.0, -0.5, 0.01), bump(1.0, 1.0, 0.1)], 0.0, grid)
        .expect("preset landscape is valid")
}

/// Two identical narrow peaks at -0.5 and 1.5, mirror images about 0.5.
pub fn symmetric_landscape() -> Landscape {
    symmetric_landscape_on(grid())
}

pub fn symmetric_landscape_on(grid: Grid1D) -> Landscape {
    Landscape::new(vec![bump(1.0, -0.5, 0.01), bump(1.0, 1.5, 0.01)], 0.0, grid)
        .expect("preset landscape is valid")
}

pub fn uniform_initial(grid: &Grid1D) -> Vec<f64> {
    vec![INITIAL_LEVEL; grid.len()]
}
