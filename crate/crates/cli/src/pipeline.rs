//! simulate → analyse → report for one configuration.

use serde::Serialize;

use selmut_core::asymptotics::predicted_exponential_rate;
use selmut_core::landscape::PEAK_REL_TOL;
use selmut_core::{
    concentration_report, fit_algebraic, fit_exponential, predict_weights_with,
    select_surviving_peak, simulate_ide, simulate_pde, zeta, ConcentrationReport, Landscape, Peak,
    RateFit, Result, Selection, SpectralProblem, SpectralSummary, Trajectory, WeightPrediction,
};

use crate::config::{Model, RunConfig};

/// Relative tolerance for accepting the domain midpoint as a mirror axis.
const MIRROR_TOL: f64 = 1e-10;
const RATE_LAW_TARGET: f64 = 0.5;
const RATE_LAW_TOL: f64 = 0.1;
const WEIGHT_TOL: f64 = 0.05;
const EQUAL_SPLIT_TOL: f64 = 0.02;
const TOTAL_MASS_TOL: f64 = 0.05;
const EXTINCTION_TOL: f64 = 0.15;
const OFF_PEAK_TOL: f64 = 0.01;

#[derive(Debug, Clone, Serialize)]
pub struct PeakReport {
    pub location: f64,
    pub value: f64,
    pub curvature: Vec<f64>,
    pub zeta: Option<f64>,
    pub is_interior: bool,
    pub is_stationary: bool,
}

impl PeakReport {
    pub fn new(index: usize, peak: &Peak) -> Self {
        Self {
            location: peak.location,
            value: peak.value,
            curvature: peak.curvature.eigenvalues(),
            zeta: zeta(index, peak).ok().map(|z| z.value),
            is_interior: peak.is_interior,
            is_stationary: peak.is_stationary,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub target: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Prediction {
    pub peaks: Vec<PeakReport>,
    pub r_max: f64,
    pub weights: Option<WeightPrediction>,
    pub selection: Option<Selection>,
    pub mirror_center: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub name: String,
    pub model: &'static str,
    pub beta: f64,
    pub dt: f64,
    pub t_final: f64,
    pub stability_bound: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub splits: Vec<f64>,
    pub prediction: Prediction,
    /// Predicted share of the mass in each region, from the weights.
    pub predicted_region_fractions: Option<Vec<f64>>,
    pub final_rho: f64,
    pub region_masses: Vec<f64>,
    pub region_fractions: Vec<f64>,
    pub concentration: Option<ConcentrationReport>,
    pub algebraic_fit: Option<RateFit>,
    pub exponential_fit: Option<RateFit>,
    pub spectral: Option<SpectralSummary>,
    pub predicted_rate: Option<f64>,
    pub notes: Vec<String>,
    pub checks: Vec<CheckResult>,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub struct RunOutcome {
    pub report: RunReport,
    pub trajectory: Trajectory,
}

/// Peaks, Dirac weights and the predicted survivor for a configuration.
pub fn predict(cfg: &RunConfig) -> Result<Prediction> {
    let landscape = cfg.landscape()?;
    let peaks = landscape.find_peaks(PEAK_REL_TOL)?;
    let mut notes = Vec::new();
    let r_max = peaks
        .iter()
        .map(|p| p.value)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(landscape.grid_max());
    let weights = match predict_weights_with(&peaks, |x| cfg.initial_at(x)) {
        Ok(w) => Some(w),
        Err(e) => {
            notes.push(format!("weights unavailable: {e}"));
            None
        }
    };
    let grid = landscape.grid();
    let center = 0.5 * (grid.x_min() + grid.x_max());
    let mirror_center = landscape
        .check_symmetry(center, MIRROR_TOL)
        .then_some(center);
    let selection = if peaks.is_empty() {
        None
    } else {
        match select_surviving_peak(&peaks, mirror_center, grid) {
            Ok(s) => Some(s),
            Err(e) => {
                notes.push(format!("selection unavailable: {e}"));
                None
            }
        }
    };
    Ok(Prediction {
        peaks: peaks
            .iter()
            .enumerate()
            .map(|(i, p)| PeakReport::new(i, p))
            .collect(),
        r_max,
        weights,
        selection,
        mirror_center,
        notes,
    })
}

fn region_of(x: f64, splits: &[f64]) -> usize {
    splits.iter().filter(|s| x >= **s).count()
}

fn check(name: &str, passed: bool, value: f64, target: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        value,
        target,
    }
}

pub fn run(cfg: &RunConfig, evaluate_checks: bool) -> Result<RunOutcome> {
    cfg.validate()?;
    let landscape: Landscape = cfg.landscape()?;
    let n0 = cfg.initial_density()?;
    let plan = cfg.sampling_plan();
    let prediction = predict(cfg)?;
    let mut notes = prediction.notes.clone();
    let r_max = prediction.r_max;

    let beta = match cfg.model {
        Model::Ide => 0.0,
        Model::Pde => cfg.beta,
    };
    let trajectory = match cfg.model {
        Model::Ide => simulate_ide(&landscape, &n0, cfg.dt, cfg.t_final, &plan)?,
        Model::Pde => simulate_pde(&landscape, beta, &n0, cfg.dt, cfg.t_final, &plan)?,
    };

    let final_rho = trajectory.final_rho();
    let region_masses = trajectory.final_regions().to_vec();
    let region_fractions: Vec<f64> = region_masses.iter().map(|m| m / final_rho).collect();
    let locations: Vec<f64> = prediction.peaks.iter().map(|p| p.location).collect();

    let predicted_region_fractions = prediction.weights.as_ref().map(|w| {
        let mut fractions = vec![0.0; cfg.splits.len() + 1];
        for (loc, a) in locations.iter().zip(&w.weights) {
            fractions[region_of(*loc, &cfg.splits)] += a;
        }
        fractions
    });

    let concentration = if locations.is_empty() {
        None
    } else {
        match concentration_report(
            landscape.grid(),
            &trajectory.final_state.density,
            &locations,
            cfg.check_radius,
        ) {
            Ok(c) => Some(c),
            Err(e) => {
                notes.push(format!("concentration unavailable: {e}"));
                None
            }
        }
    };

    let mut algebraic_fit = None;
    let mut exponential_fit = None;
    let mut spectral = None;
    let mut predicted_rate = None;
    match cfg.model {
        Model::Ide => match fit_algebraic(&trajectory.times, &trajectory.rho, r_max, 0.5) {
            Ok(f) => algebraic_fit = Some(f),
            Err(e) => notes.push(format!("algebraic fit unavailable: {e}")),
        },
        Model::Pde if beta > 0.0 => {
            let summary = SpectralProblem::new(&landscape, beta)?.summary(Some(&n0))?;
            match fit_exponential(&trajectory.times, &trajectory.rho, -summary.lambda) {
                Ok(f) => exponential_fit = Some(f),
                Err(e) => notes.push(format!("exponential fit unavailable: {e}")),
            }
            let projected = summary.projection.is_some_and(|p| p != 0.0);
            if projected && !summary.degenerate {
                predicted_rate = Some(predicted_exponential_rate(summary.lambda, summary.gamma));
            } else {
                notes.push("no rate prediction: gap unresolved or no second-mode component".into());
            }
            spectral = Some(summary);
        }
        Model::Pde => {}
    }

    let mut checks = Vec::new();
    if evaluate_checks {
        let c = &cfg.checks;
        if c.rate_law {
            let value = algebraic_fit
                .as_ref()
                .and_then(|f| f.mean_scaled)
                .unwrap_or(f64::NAN);
            let (lo, hi) = (
                RATE_LAW_TARGET * (1.0 - RATE_LAW_TOL),
                RATE_LAW_TARGET * (1.0 + RATE_LAW_TOL),
            );
            checks.push(check(
                "rate_law",
                (lo..=hi).contains(&value),
                value,
                format!("mean (r_M - rho) t in [{lo}, {hi}]"),
            ));
        }
        if c.weights {
            let value = match &predicted_region_fractions {
                Some(p) => p
                    .iter()
                    .zip(&region_fractions)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
                None => f64::NAN,
            };
            checks.push(check(
                "weights",
                value <= WEIGHT_TOL,
                value,
                format!("max |rho_i/rho - a_i| <= {WEIGHT_TOL}"),
            ));
        }
        if c.equal_split {
            let hi = region_masses
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            let lo = region_masses.iter().copied().fold(f64::INFINITY, f64::min);
            let value = hi - lo;
            checks.push(check(
                "equal_split",
                value <= EQUAL_SPLIT_TOL * r_max,
                value,
                format!("max rho_i - min rho_i <= {EQUAL_SPLIT_TOL} r_M"),
            ));
        }
        if c.total_mass {
            let value = (final_rho - r_max).abs();
            checks.push(check(
                "total_mass",
                value <= TOTAL_MASS_TOL * r_max,
                value,
                format!("|rho - r_M| <= {TOTAL_MASS_TOL} r_M"),
            ));
        }
        if let Some(k) = c.extinct_region {
            let value = region_masses[k - 1];
            checks.push(check(
                "extinct_region",
                value <= EXTINCTION_TOL * r_max,
                value,
                format!("rho_{k} <= {EXTINCTION_TOL} r_M"),
            ));
        }
        if c.selection {
            let (passed, value) = match (&prediction.selection, &concentration) {
                (Some(Selection::Single { peak }), Some(rep)) => {
                    let f = rep.fractions[*peak];
                    (f >= cfg.selection_fraction, f)
                }
                (Some(Selection::Symmetric { peaks, .. }), Some(rep)) => {
                    let fs: Vec<f64> = peaks.iter().map(|&i| rep.fractions[i]).collect();
                    let total: f64 = fs.iter().sum();
                    let spread = fs
                        .iter()
                        .map(|f| (f - total / fs.len() as f64).abs())
                        .fold(0.0, f64::max);
                    (
                        total >= cfg.selection_fraction && spread <= EQUAL_SPLIT_TOL,
                        total,
                    )
                }
                _ => (false, f64::NAN),
            };
            checks.push(check(
                "selection",
                passed,
                value,
                format!(
                    "mass within {} of the surviving peak(s) >= {}",
                    cfg.check_radius, cfg.selection_fraction
                ),
            ));
        }
        if c.off_peak {
            let value = concentration.as_ref().map_or(f64::NAN, |r| r.off_peak);
            checks.push(check(
                "off_peak",
                value <= OFF_PEAK_TOL,
                value,
                format!(
                    "mass farther than {} from every peak <= {OFF_PEAK_TOL}",
                    cfg.check_radius
                ),
            ));
        }
    }

    let report = RunReport {
        name: cfg.name.clone(),
        model: cfg.model.name(),
        beta,
        dt: cfg.dt,
        t_final: cfg.t_final,
        stability_bound: cfg.stability_bound()?,
        x_min: cfg.x_min,
        x_max: cfg.x_max,
        n_points: cfg.n_points,
        splits: cfg.splits.clone(),
        prediction,
        predicted_region_fractions,
        final_rho,
        region_masses,
        region_fractions,
        concentration,
        algebraic_fit,
        exponential_fit,
        spectral,
        predicted_rate,
        notes,
        checks,
    };
    Ok(RunOutcome { report, trajectory })
}
