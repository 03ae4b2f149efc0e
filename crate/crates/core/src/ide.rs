//! Pure selection: `∂n/∂t = (r(x) - ρ(t)) n` with `ρ = ∫ n`.

use crate::error::{Error, Result};
use crate::landscape::Landscape;
use crate::trajectory::{integrate, validate_density, PopulationState, SamplingPlan, Trajectory};

/// Forward-Euler solution of the selection equation, `ρ` recomputed by the
/// trapezoid rule at the start of every step.
pub fn simulate_ide(
    landscape: &Landscape,
    initial: &[f64],
    dt: f64,
    t_final: f64,
    plan: &SamplingPlan,
) -> Result<Trajectory> {
    integrate(landscape, 0.0, initial, dt, t_final, plan)
}

/// Closed-form solution
/// `n(t,x) = n⁰ e^{rt} / (1 + ∫ n⁰/r (e^{rt} - 1))`, valid when `r > 0`
/// everywhere. `e^{r_M t}` is cancelled between numerator and denominator
/// so large times do not overflow.
pub fn explicit_solution(
    landscape: &Landscape,
    initial: &[f64],
    t: f64,
) -> Result<PopulationState> {
    let grid = *landscape.grid();
    validate_density(&grid, initial)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "time must be non-negative, got {t}"
        )));
    }
    let r = landscape.values();
    let r_min = r.iter().copied().fold(f64::INFINITY, f64::min);
    if !(r_min > 0.0) {
        return Err(Error::OracleUnavailable(r_min));
    }
    if t == 0.0 {
        return PopulationState::new(grid, initial.to_vec(), 0.0);
    }
    let r_max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let damp = (-r_max * t).exp();

    // (e^{rt} - 1) e^{-r_M t} / r, accurate for tiny r as well
    let growth: Vec<f64> = r
        .iter()
        .map(|&ri| {
            if ri * t < 700.0 {
                (ri * t).exp_m1() / ri * damp
            } else {
                (((ri - r_max) * t).exp() - damp) / ri
            }
        })
        .collect();
    let weighted: Vec<f64> = initial.iter().zip(&growth).map(|(n0, g)| n0 * g).collect();
    let denominator = damp + grid.trapezoid(&weighted);
    let density = initial
        .iter()
        .zip(&r)
        .map(|(n0, ri)| n0 * ((ri - r_max) * t).exp() / denominator)
        .collect();
    Ok(PopulationState {
        grid,
        density,
        time: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::presets;

    fn logistic(c: f64, rho0: f64, t: f64) -> f64 {
        c * rho0 / (rho0 + (c - rho0) * (-c * t).exp())
    }

    #[test]
    fn constant_growth_follows_logistic() {
        let grid = Grid1D::new(0.0, 1.0, 51).unwrap();
        let r = Landscape::constant(0.8, grid).unwrap();
        let n0: Vec<f64> = grid.sample(|x| 0.1 + x * x);
        let rho0 = grid.trapezoid(&n0);
        let traj = simulate_ide(&r, &n0, 1e-3, 10.0, &SamplingPlan::default()).unwrap();
        for (t, rho) in traj.times.iter().zip(&traj.rho) {
            assert!((rho - logistic(0.8, rho0, *t)).abs() < 2e-3, "t={t}");
        }
        assert!((traj.final_rho() - 0.8).abs() < 1e-3);
    }

    #[test]
    fn oracle_reduces_to_logistic_profile() {
        let grid = Grid1D::new(0.0, 2.0, 41).unwrap();
        let c = 1.3;
        let r = Landscape::constant(c, grid).unwrap();
        let n0 = grid.sample(|x| 1.0 + x);
        let rho0 = grid.trapezoid(&n0);
        for &t in &[0.5, 3.0, 800.0] {
            let s = explicit_solution(&r, &n0, t).unwrap();
            for (n, n0) in s.density.iter().zip(&n0) {
                let factor = logistic(c, rho0, t) / rho0;
                assert!(
                    (n - n0 * factor).abs() <= 1e-12 * n0 * factor.max(1.0),
                    "t={t}"
                );
            }
        }
    }

    #[test]
    fn oracle_is_identity_at_zero() {
        let r = presets::asymmetric_landscape();
        let n0 = presets::uniform_initial(r.grid());
        assert_eq!(explicit_solution(&r, &n0, 0.0).unwrap().density, n0);
    }

    #[test]
    fn oracle_needs_positive_growth() {
        let r = presets::asymmetric_landscape().shifted(-0.5).unwrap();
        let n0 = presets::uniform_initial(r.grid());
        assert!(matches!(
            explicit_solution(&r, &n0, 1.0),
            Err(Error::OracleUnavailable(_))
        ));
    }

    #[test]
    fn oracle_survives_long_times() {
        let r = presets::asymmetric_landscape();
        let n0 = presets::uniform_initial(r.grid());
        let s = explicit_solution(&r, &n0, 5000.0).unwrap();
        assert!(s.density.iter().all(|v| v.is_finite()));
        assert!((s.mass() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_inputs() {
        let r = presets::asymmetric_landscape();
        let n0 = presets::uniform_initial(r.grid());
        let plan = SamplingPlan::default();
        assert!(simulate_ide(&r, &n0, 0.0, 1.0, &plan).is_err());
        assert!(simulate_ide(&r, &vec![0.0; n0.len()], 0.01, 1.0, &plan).is_err());
        assert!(simulate_ide(&r, &n0[1..], 0.01, 1.0, &plan).is_err());
        let bad = SamplingPlan::default().with_splits(&[3.0]);
        assert!(simulate_ide(&r, &n0, 0.01, 1.0, &bad).is_err());
    }

    #[test]
    fn huge_step_is_reported() {
        let r = presets::asymmetric_landscape();
        let n0 = presets::uniform_initial(r.grid());
        let err = simulate_ide(&r, &n0, 2.0, 50.0, &SamplingPlan::default()).unwrap_err();
        assert!(err.is_numerical(), "{err}");
    }

    #[test]
    fn sampling_plan_layout() {
        let r = presets::asymmetric_landscape();
        let n0 = presets::uniform_initial(r.grid());
        let plan = SamplingPlan::default()
            .with_splits(&[0.5])
            .with_snapshots(&[0.0, 2.0, 5.0]);
        let traj = simulate_ide(&r, &n0, 0.01, 5.0, &plan).unwrap();
        // 101 dense samples on [0, 1], then every 0.1 up to 5
        assert_eq!(traj.len(), 101 + 40);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(traj.snapshots.len(), 3);
        assert_eq!(traj.final_time(), 5.0);
        for snap in &traj.snapshots {
            let k = traj.times.iter().position(|t| *t == snap.time).unwrap();
            assert_eq!(traj.rho[k], r.grid().trapezoid(&snap.density));
            let parts = &traj.regions[k];
            assert!((parts[0] + parts[1] - traj.rho[k]).abs() <= 1e-12 * traj.rho[k]);
        }
        assert!((traj.regions[0][0] - 1.0).abs() < 1e-13);
        assert!((traj.regions[0][1] - 1.0).abs() < 1e-13);
    }
}
