use proptest::prelude::*;
use vsi_core::constants::{BOHR_MHZ_PER_MT, DEFAULT_G_FACTOR};
use vsi_core::spin::{analytic_axial_frequency, build_hamiltonian, eigh, transition_frequencies};
use vsi_core::{CrystalField, SpinSystem};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

/// B⊥ = E⊥ = 0 closed form: |2(D + d∥E) ± gμB·B| and the ±1/2 Larmor line.
fn axial_lines(d: f64, dpar: f64, e: f64, b: f64) -> Vec<f64> {
    let z = DEFAULT_G_FACTOR * BOHR_MHZ_PER_MT * b;
    let mut v = vec![(2.0 * (d + dpar * e) + z).abs(), (2.0 * (d + dpar * e) - z).abs()];
    if z > 0.0 {
        v.push(z);
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn axial_equivalence(d in 10.0..100.0f64, e in 0.0..3.0f64, b in 0.01..5.0f64) {
        let sys = SpinSystem::vsi_with(d, -15.0, 16.5);
        let ts = transition_frequencies(&sys, &CrystalField::axial(e).with_b_par(b)).unwrap();
        let (fp, fm) = analytic_axial_frequency(&sys, e, b);
        for target in [fp, fm] {
            let best = ts.frequencies().map(|f| rel(f, target)).fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-9, "{target} missing: {:?}", ts.frequencies().collect::<Vec<_>>());
        }
        for f in ts.frequencies() {
            let best = axial_lines(d, -15.0, e, b).iter().map(|&t| rel(f, t)).fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-9, "unexpected line {f}");
        }
    }

    #[test]
    fn kramers_doublets(ex in -2.0..2.0f64, ey in -2.0..2.0f64, ez in -3.0..3.0f64) {
        let sys = SpinSystem::vsi_with(35.5, -15.0, 16.5);
        let field = CrystalField { e_par: ez, e_perp_x: ex, e_perp_y: ey, ..CrystalField::zero() };
        let eig = eigh(&build_hamiltonian(&sys, &field).unwrap());
        let v = eig.values();
        prop_assert!((v[1] - v[0]).abs() < 1e-9);
        prop_assert!((v[3] - v[2]).abs() < 1e-9);
    }

    #[test]
    fn hermitian_by_construction(ex in -2.0..2.0f64, ey in -2.0..2.0f64, ez in -3.0..3.0f64, bx in -5.0..5.0f64, bz in -5.0..5.0f64) {
        let sys = SpinSystem::vsi_with(35.5, -15.0, 16.5);
        let field = CrystalField { e_par: ez, e_perp_x: ex, e_perp_y: ey, b_par: bz, b_perp_x: bx, b_perp_y: 0.0 };
        let h = build_hamiltonian(&sys, &field).unwrap();
        prop_assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn azimuthal_invariance(e_par in 0.0..2.5f64, e_perp in 0.0..1.0f64, angle in 0.0..std::f64::consts::TAU) {
        let sys = SpinSystem::vsi_with(35.5, -15.0, 16.5);
        let base = transition_frequencies(&sys, &CrystalField::electric(e_par, e_perp)).unwrap();
        let rotated = CrystalField { e_par, e_perp_x: e_perp * angle.cos(), e_perp_y: e_perp * angle.sin(), ..CrystalField::zero() };
        let rot = transition_frequencies(&sys, &rotated).unwrap();
        let a: Vec<f64> = base.frequencies().collect();
        let b: Vec<f64> = rot.frequencies().collect();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn sign_blindness(e_par in 0.0..2.5f64, e_perp in 0.0..1.0f64, dperp in 0.0..40.0f64) {
        let plus = SpinSystem::vsi_with(35.5, -15.0, dperp);
        let minus = SpinSystem::vsi_with(35.5, -15.0, -dperp);
        let field = CrystalField::electric(e_par, e_perp);
        let a: Vec<f64> = transition_frequencies(&plus, &field).unwrap().frequencies().collect();
        let b: Vec<f64> = transition_frequencies(&minus, &field).unwrap().frequencies().collect();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn closed_form_with_transverse_field(e_par in 0.0..2.0f64, e_perp in 0.0..0.5f64) {
        let sys = SpinSystem::vsi_with(35.5, -15.0, 16.5);
        let f = transition_frequencies(&sys, &CrystalField::electric(e_par, e_perp)).unwrap().dominant().unwrap().frequency;
        let expect = 2.0 * ((35.5 - 15.0 * e_par).powi(2) + 3.0 * (16.5 * e_perp).powi(2)).sqrt();
        prop_assert!(rel(f, expect) < 1e-9);
    }
}

#[test]
fn axial_slope_is_twice_dipole() {
    let sys = SpinSystem::vsi_with(35.5, -15.0, 16.5);
    let f = |e: f64| transition_frequencies(&sys, &CrystalField::axial(e)).unwrap().dominant().unwrap().frequency;
    for e in [0.2, 0.7, 1.3, 2.0] {
        let h = 1e-3;
        let slope = (f(e + h) - f(e - h)) / (2.0 * h);
        assert!(rel(slope, -30.0) < 1e-9, "{slope}");
    }
}

#[test]
fn zero_field_line_is_two_d() {
    let ts = transition_frequencies(&SpinSystem::vsi_with(35.5, -15.0, 16.5), &CrystalField::zero()).unwrap();
    let f: Vec<f64> = ts.frequencies().collect();
    assert_eq!(f.len(), 1);
    assert!((f[0] - 71.0).abs() < 1e-12);
}
