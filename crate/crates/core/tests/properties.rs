use proptest::prelude::*;

use selmut_core::landscape::PEAK_REL_TOL;
use selmut_core::{
    argmin_zeta, predict_weights, select_surviving_peak, GaussianBump, Grid1D, Landscape,
    NeumannLaplacian, Peak, SpectralProblem,
};

fn grid() -> Grid1D {
    Grid1D::new(-1.0, 2.0, 301).unwrap()
}

/// Two well-separated bumps with distinct widths.
fn two_bumps() -> impl Strategy<Value = Landscape> {
    (0.5f64..2.0, 0.005f64..0.05, 0.5f64..2.0, 0.05f64..0.3).prop_map(|(a1, w1, a2, w2)| {
        Landscape::new(
            vec![
                GaussianBump::new(a1, -0.4, w1).unwrap(),
                GaussianBump::new(a2, 1.1, w2).unwrap(),
            ],
            0.0,
            grid(),
        )
        .unwrap()
    })
}

fn stationary(location: f64, curvature: f64) -> Peak {
    Peak::from_hessian(location, 1.0, &[curvature]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_sum_to_one_and_ignore_scale(
        curv in prop::collection::vec(-500.0f64..-0.1, 1..6),
        n0 in prop::collection::vec(0.01f64..5.0, 6),
        scale in 0.01f64..100.0,
    ) {
        let peaks: Vec<Peak> = curv.iter().enumerate().map(|(i, c)| stationary(i as f64, *c)).collect();
        let n0 = &n0[..peaks.len()];
        let base = predict_weights(&peaks, n0).unwrap();
        let scaled_n0: Vec<f64> = n0.iter().map(|v| v * scale).collect();
        let scaled = predict_weights(&peaks, &scaled_n0).unwrap();
        prop_assert!((base.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (a, b) in base.weights.iter().zip(&scaled.weights) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        // independent formula: n0 / sqrt|r''|, normalised
        let raw: Vec<f64> = n0.iter().zip(&curv).map(|(n, c)| n / c.abs().sqrt()).collect();
        let total: f64 = raw.iter().sum();
        for (w, r) in base.weights.iter().zip(&raw) {
            prop_assert!((w - r / total).abs() < 1e-12);
        }
    }

    #[test]
    fn zeta_winner_follows_permutations(
        curv in prop::collection::vec(-500.0f64..-0.1, 2..6),
        rotate in 0usize..6,
    ) {
        let peaks: Vec<Peak> = curv.iter().enumerate().map(|(i, c)| stationary(i as f64, *c)).collect();
        let winners: Vec<f64> = argmin_zeta(&peaks).unwrap().iter().map(|&i| peaks[i].location).collect();
        let mut rotated = peaks.clone();
        rotated.rotate_left(rotate % peaks.len());
        let mut again: Vec<f64> = argmin_zeta(&rotated).unwrap().iter().map(|&i| rotated[i].location).collect();
        again.sort_by(f64::total_cmp);
        prop_assert_eq!(winners, again);
    }

    #[test]
    fn selection_ignores_constant_shifts(r in two_bumps(), shift in 0.0f64..3.0) {
        let peaks = r.find_peaks(PEAK_REL_TOL).unwrap();
        let moved = r.shifted(shift).unwrap().find_peaks(PEAK_REL_TOL).unwrap();
        prop_assert_eq!(peaks.len(), moved.len());
        if !peaks.is_empty() {
            prop_assert_eq!(
                select_surviving_peak(&peaks, None, r.grid()).unwrap(),
                select_surviving_peak(&moved, None, r.grid()).unwrap()
            );
        }
    }

    #[test]
    fn curvature_matches_finite_differences(r in two_bumps()) {
        for peak in r.find_peaks(PEAK_REL_TOL).unwrap() {
            let d2 = r.curvature_at(&peak).unwrap();
            let x = peak.location;
            let e = 1e-4;
            let fd = (r.eval(x + e) - 2.0 * r.eval(x) + r.eval(x - e)) / (e * e);
            prop_assert!((fd - d2).abs() <= 1e-4 * d2.abs(), "fd {} vs {}", fd, d2);
            prop_assert!(r.derivative(x).abs() <= 1e-8 * peak.value / r.grid().spacing());
        }
    }

    #[test]
    fn region_masses_add_up(
        values in prop::collection::vec(0.0f64..10.0, 301),
        mut splits in prop::collection::vec(-0.99f64..1.99, 0..5),
    ) {
        splits.sort_by(f64::total_cmp);
        splits.dedup();
        let g = grid();
        let total = g.trapezoid(&values);
        let parts: f64 = g.region_masses(&values, &splits).iter().sum();
        prop_assert!((parts - total).abs() <= 1e-12 * total.max(1.0));
    }

    #[test]
    fn laplacian_conserves_mass(values in prop::collection::vec(-5.0f64..5.0, 301)) {
        let g = grid();
        let mut out = vec![0.0; values.len()];
        NeumannLaplacian::new(g).apply(&values, &mut out);
        let scale: f64 = out.iter().map(|v| v.abs()).sum::<f64>() * g.spacing();
        prop_assert!(g.trapezoid(&out).abs() <= 1e-13 * scale.max(1e-300));
    }

    #[test]
    fn rayleigh_quotient_is_bounded_by_the_principal_value(
        phi in prop::collection::vec(0.0f64..1.0, 301),
        beta in 1e-5f64..1e-2,
    ) {
        prop_assume!(phi.iter().any(|v| *v > 0.0));
        let r = Landscape::new(
            vec![GaussianBump::new(1.0, -0.5, 0.01).unwrap(), GaussianBump::new(1.0, 1.0, 0.1).unwrap()],
            0.0,
            grid(),
        )
        .unwrap();
        let problem = SpectralProblem::new(&r, beta).unwrap();
        let pair = problem.principal().unwrap();
        let q = problem.rayleigh_quotient(&phi).unwrap();
        prop_assert!(q >= pair.lambda - 1e-12 * problem.resolution_scale());
        prop_assert!(pair.lambda >= -r.grid_max());
    }
}
