use proptest::prelude::*;
use vsi_core::odmr::{fit_spectrum, linear_grid, synthesize_spectrum, LinePeak};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn noiseless_single_line_round_trip(center in 40.0..100.0f64, fwhm in 4.0..12.0f64, amp in 0.005..0.02f64) {
        let grid = linear_grid(0.0, 140.0, 561);
        let spec = synthesize_spectrum(&[LinePeak::new(center, fwhm, amp)], &grid, 0.0, 0).unwrap();
        let fit = fit_spectrum(&spec, 1, None).unwrap();
        let p = fit.peaks[0];
        prop_assert!((p.center - center).abs() / center < 1e-8);
        prop_assert!((p.fwhm - fwhm).abs() / fwhm < 1e-8);
        prop_assert!((p.amplitude - amp).abs() / amp < 1e-8);
    }

    #[test]
    fn noiseless_separated_pair_round_trip(c1 in 30.0..50.0f64, sep in 25.0..40.0f64) {
        let grid = linear_grid(0.0, 140.0, 561);
        let peaks = [LinePeak::new(c1, 8.0, 0.01), LinePeak::new(c1 + sep, 6.0, 0.007)];
        let spec = synthesize_spectrum(&peaks, &grid, 0.0, 0).unwrap();
        let fit = fit_spectrum(&spec, 2, None).unwrap();
        for (got, want) in fit.peaks.iter().zip(&peaks) {
            prop_assert!((got.center - want.center).abs() / want.center < 1e-8);
            prop_assert!((got.fwhm - want.fwhm).abs() / want.fwhm < 1e-8);
        }
        prop_assert!(fit.peaks[0].center < fit.peaks[1].center);
    }
}

#[test]
fn residual_rms_tracks_noise() {
    let grid = linear_grid(20.0, 120.0, 401);
    let sigma = 1e-3;
    for seed in 0..100 {
        let spec = synthesize_spectrum(&[LinePeak::new(71.0, 8.0, 0.01)], &grid, sigma, seed).unwrap();
        let fit = fit_spectrum(&spec, 1, None).unwrap();
        assert!(fit.residual_rms <= 1.2 * sigma, "seed {seed}: {}", fit.residual_rms);
    }
}

#[test]
fn deterministic_for_seed() {
    let grid = linear_grid(20.0, 120.0, 201);
    let a = synthesize_spectrum(&[LinePeak::new(71.0, 8.0, 0.01)], &grid, 1e-3, 42).unwrap();
    let b = synthesize_spectrum(&[LinePeak::new(71.0, 8.0, 0.01)], &grid, 1e-3, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(fit_spectrum(&a, 1, None).unwrap(), fit_spectrum(&b, 1, None).unwrap());
}
