//! Concentration of populations under selection and mutation: simulation of
//! the selection equation and its diffusive counterpart, the principal
//! eigenproblem of the mutation-selection operator, and the long-time
//! predictions they are checked against.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod grid;
pub mod ide;
pub mod landscape;
pub mod pde;
pub mod presets;
pub mod spectral;
pub mod trajectory;
pub mod tridiag;

pub use asymptotics::{
    concentration_report, fit_algebraic, fit_exponential, predict_weights, predict_weights_with,
    select_surviving_peak, ConcentrationReport, RateFit, RateModel, Selection, WeightPrediction,
};
pub use error::{Error, Result};
pub use grid::Grid1D;
pub use ide::{explicit_solution, simulate_ide};
pub use landscape::{argmin_zeta, zeta, Curvature, GaussianBump, Landscape, Peak, ZetaValue};
pub use pde::{simulate_pde, stability_bound, stability_bound_for, NeumannLaplacian};
pub use spectral::{
    epsilon_sweep, principal_eigenpair, project_second, rayleigh_quotient, second_eigenvalue,
    spectral_gap, EigenPair, EpsilonSweep, Normalization, SpectralProblem, SpectralSummary,
    SweepPoint,
};
pub use trajectory::{PopulationState, SamplingPlan, Snapshot, Trajectory};
