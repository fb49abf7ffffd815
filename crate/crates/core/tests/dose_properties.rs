use proptest::prelude::*;
use vsi_core::dose::{density_profile, profile_stats, DepthProfile};

fn gaussian(center: f64, sigma: f64, amp: f64) -> DepthProfile {
    let z: Vec<f64> = (0..=600).map(|i| i as f64 * 0.02).collect();
    let v = z.iter().map(|&z| amp * (-0.5 * ((z - center) / sigma).powi(2)).exp()).collect();
    DepthProfile::new(z, v).unwrap()
}

proptest! {
    #[test]
    fn density_linear_in_fluence_and_rate(f in 1e9..1e13f64, rate in 0.01..2.0f64, k in 0.1..10.0f64) {
        let p = gaussian(2.1, 0.2, 1.0);
        let base = density_profile(&p, f, rate).unwrap();
        let scaled_f = density_profile(&p, k * f, rate).unwrap();
        let scaled_r = density_profile(&p, f, k * rate).unwrap();
        for ((a, b), c) in base.density_cm3.iter().zip(&scaled_f.density_cm3).zip(&scaled_r.density_cm3) {
            prop_assert!((b - k * a).abs() <= 1e-12 * (k * a).max(1.0));
            prop_assert!((c - k * a).abs() <= 1e-12 * (k * a).max(1.0));
        }
    }

    #[test]
    fn stats_amplitude_invariant(center in 1.0..9.0f64, sigma in 0.1..0.5f64, k in 1e-3..1e3f64) {
        let a = profile_stats(&gaussian(center, sigma, 1.0)).unwrap();
        let b = profile_stats(&gaussian(center, sigma, k)).unwrap();
        prop_assert!((a.peak_depth_um - b.peak_depth_um).abs() < 1e-9);
        prop_assert!((a.fwhm_um - b.fwhm_um).abs() < 1e-9);
    }
}

#[test]
fn doubling_fluence_doubles_density() {
    let p = gaussian(2.1, 0.2, 1.0);
    let a = density_profile(&p, 5e11, 0.8).unwrap();
    let b = density_profile(&p, 1e12, 0.8).unwrap();
    assert_eq!(b.peak_density_cm3, 2.0 * a.peak_density_cm3);
}
