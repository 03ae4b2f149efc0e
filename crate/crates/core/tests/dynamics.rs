use selmut_core::landscape::PEAK_REL_TOL;
use selmut_core::{
    explicit_solution, presets, simulate_ide, simulate_pde, GaussianBump, Grid1D, Landscape,
    SamplingPlan,
};

fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    let top = b.iter().copied().fold(0.0, f64::max);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / top
}

#[test]
fn late_mass_approaches_from_below() {
    let r = presets::asymmetric_landscape();
    let r_max = r.find_peaks(PEAK_REL_TOL).unwrap()[1].value;
    let n0 = presets::uniform_initial(r.grid());
    let traj = simulate_ide(&r, &n0, presets::DT, 200.0, &SamplingPlan::default()).unwrap();
    for (t, rho) in traj.times.iter().zip(&traj.rho) {
        if *t >= 150.0 {
            assert!(*rho <= r_max, "t={t}");
        }
    }
}

#[test]
fn oracle_gap_is_first_order_for_positive_offsets() {
    let grid = Grid1D::new(0.0, 3.0, 400).unwrap();
    let r = Landscape::new(
        vec![
            GaussianBump::new(0.8, 1.0, 0.05).unwrap(),
            GaussianBump::new(0.6, 2.2, 0.2).unwrap(),
        ],
        0.3,
        grid,
    )
    .unwrap();
    let n0 = grid.sample(|x| 0.5 + 0.2 * (2.0 * x).sin());
    let exact = explicit_solution(&r, &n0, 30.0).unwrap();
    let gap = |dt: f64| {
        let traj = simulate_ide(&r, &n0, dt, 30.0, &SamplingPlan::default()).unwrap();
        sup_gap(&traj.final_state.density, &exact.density)
    };
    let (g1, g2, g3) = (gap(0.02), gap(0.01), gap(0.005));
    assert!(
        (g1 / g2).log2() >= 0.9 && (g2 / g3).log2() >= 0.9,
        "{g1} {g2} {g3}"
    );
}

#[test]
fn densities_stay_non_negative() {
    let r = presets::asymmetric_landscape();
    let n0 = r
        .grid()
        .sample(|x| if (0.0..0.3).contains(&x) { 3.0 } else { 0.0 });
    let plan = SamplingPlan::default().with_snapshots(&[0.5, 5.0, 50.0]);
    for beta in [0.0, 1e-4] {
        let traj = simulate_pde(&r, beta, &n0, 0.01, 50.0, &plan).unwrap();
        for s in &traj.snapshots {
            assert!(s.density.iter().all(|v| *v >= 0.0));
        }
    }
}

#[test]
fn selection_keeps_disjoint_support() {
    // without mutation, mass never appears where n0 vanishes
    let r = presets::asymmetric_landscape();
    let n0 = r.grid().sample(|x| if x > 0.5 { 1.0 } else { 0.0 });
    let traj = simulate_ide(
        &r,
        &n0,
        0.01,
        100.0,
        &SamplingPlan::default().with_splits(&[0.5]),
    )
    .unwrap();
    let k = r.grid().nearest(-0.5);
    assert_eq!(traj.final_state.density[k], 0.0);
    assert!(traj.final_regions()[0] < 1e-12);
}
