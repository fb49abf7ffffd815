use proptest::prelude::*;
use vsi_core::electrometry::{
    fit_dipole_parallel, fit_ratio_perp, fold_point, invert_field, resonance_model, ElectrometryError,
};
use vsi_core::synthetic::SeriesFixture;
use vsi_core::SpinSystem;

fn system(r: f64) -> SpinSystem {
    SpinSystem::vsi_with(35.5, -15.0, r * 15.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inversion_round_trip(e in 0.0..2.4f64, ratio in 0.0..0.2f64, r in 0.0..2.0f64) {
        let sys = system(r);
        let (e_fold, _) = fold_point(&sys, ratio).unwrap();
        prop_assume!(e < e_fold - 1e-3);
        let f = resonance_model(&sys, e, ratio * e).unwrap();
        let est = invert_field(&sys, f, 0.3, ratio).unwrap();
        prop_assert!((est.e_par - e).abs() < 1e-4, "{} vs {e}", est.e_par);
        prop_assert!(est.sigma_e > 0.0);
        prop_assert!((est.e_perp - ratio * est.e_par).abs() < 1e-12);
    }

    #[test]
    fn strictly_decreasing_before_fold(ratio in 0.0..0.2f64, r in 0.0..2.0f64, dpar in -25.0..-5.0f64) {
        let sys = SpinSystem::vsi_with(35.5, dpar, r * dpar.abs());
        let (e_fold, _) = fold_point(&sys, ratio).unwrap();
        let n = 400;
        let mut prev = f64::INFINITY;
        for k in 0..n {
            let e = e_fold * k as f64 / n as f64;
            let f = resonance_model(&sys, e, ratio * e).unwrap();
            prop_assert!(f < prev, "not decreasing at E = {e}");
            prev = f;
        }
    }

    #[test]
    fn noiseless_calibration_exact(dpar in -25.0..-5.0f64, d in 20.0..60.0f64) {
        let mut fx = SeriesFixture::point1();
        fx.system = SpinSystem::vsi_with(d, dpar, 0.0);
        fx.perp_ratio = 0.0;
        fx.e_par_per_volt = 0.5 * d / dpar.abs() / 1000.0;
        let fit = fit_dipole_parallel(&fx.noiseless().unwrap()).unwrap();
        prop_assert!((fit.d_par_over_h.value - dpar).abs() < 1e-9 * dpar.abs());
        prop_assert!((fit.zfs_d.value - d).abs() < 1e-9 * d);
    }
}

#[test]
fn folded_frequencies_rejected_everywhere() {
    for ratio in [0.0, 0.05, 0.1, 0.15, 0.2] {
        for r in [0.0, 0.5, 1.0, 1.5, 2.0] {
            let sys = system(r);
            let (_, f_fold) = fold_point(&sys, ratio).unwrap();
            let err = invert_field(&sys, f_fold - 0.01, 0.3, ratio).unwrap_err();
            assert!(matches!(err, ElectrometryError::AmbiguousBranch { .. }), "{err}");
        }
    }
}

#[test]
fn calibration_uncertainty_is_calibrated() {
    // A correct 1σ interval covers ~68 % of seeds, a 2σ interval ~95 %.
    for (dpar, d) in [(-15.0, 35.5), (-8.0, 40.0), (-22.0, 30.0)] {
        let mut fx = SeriesFixture::point1();
        fx.system = SpinSystem::vsi_with(d, dpar, 0.0);
        let (mut one, mut two) = (0, 0);
        for seed in 0..200 {
            let fit = fit_dipole_parallel(&fx.sample(seed).unwrap()).unwrap();
            let dev = (fit.d_par_over_h.value - dpar).abs();
            one += (dev <= fit.d_par_over_h.sigma) as usize;
            two += (dev <= 2.0 * fit.d_par_over_h.sigma) as usize;
        }
        assert!((116..=156).contains(&one), "1σ coverage {one}/200");
        assert!(two >= 184, "2σ coverage {two}/200");
    }
}

#[test]
fn ratio_objective_has_single_minimum() {
    let fx = SeriesFixture::point3();
    for seed in 0..20 {
        let fit = fit_ratio_perp(&fx.sample(seed).unwrap(), -15.0, 35.5).unwrap();
        let chi: Vec<f64> = fit.scan.iter().map(|p| p.1).collect();
        let minima = (1..chi.len() - 1).filter(|&i| chi[i] < chi[i - 1] && chi[i] <= chi[i + 1]).count()
            + (chi[0] < chi[1]) as usize
            + (chi[chi.len() - 1] < chi[chi.len() - 2]) as usize;
        assert_eq!(minima, 1, "seed {seed}");
    }
}

#[test]
fn curves_span_requested_ratios() {
    let fit = fit_ratio_perp(&SeriesFixture::point3().noiseless().unwrap(), -15.0, 35.5).unwrap();
    let rs: Vec<f64> = fit.curves.iter().map(|c| c.ratio_r).collect();
    assert_eq!(rs, [0.0, 0.5, 1.0, 1.5, 2.0]);
    for c in &fit.curves {
        assert_eq!(c.f_mhz[0], 71.0);
        assert!((c.e_par.last().unwrap() - 1.5).abs() < 1e-12);
    }
    // larger r bends the curve upward
    let last: Vec<f64> = fit.curves.iter().map(|c| *c.f_mhz.last().unwrap()).collect();
    assert!(last.windows(2).all(|w| w[1] > w[0]));
}
