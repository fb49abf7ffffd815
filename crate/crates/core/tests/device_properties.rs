use proptest::prelude::*;
use vsi_core::device::*;
use vsi_core::dose::SpotRef;

fn uniform_vs_1d(dz: f64, bias: f64) -> (f64, FieldMap) {
    let m = DeviceModel2D::uniform_fixture(dz);
    let map = solve_poisson_2d(&m, bias).unwrap();
    assert!(map.converged);
    let mut j = Junction1D::new(m.donor_epi, 12.0);
    j.builtin_v = m.builtin_potential();
    let d = depletion_1d(&j, bias).unwrap();
    let cut = line_cut_z(&map, 2.0).unwrap();
    let mut worst: f64 = 0.0;
    for (z, e) in cut.coord.iter().zip(&cut.e_par) {
        // drift layer starts under the 0.2 µm p⁺ layer; skip the nodes
        // bordering the junction and the depletion edge
        let depth = z - 0.2;
        if depth > 1.5 * dz && depth < d.width - 1.5 * dz {
            let a = d.field_at(depth);
            worst = worst.max((e - a).abs() / a);
        }
    }
    (worst, map)
}

#[test]
fn matches_1d_profile_at_two_resolutions() {
    for bias in [300.0, 1500.0] {
        for dz in [0.1, 0.05] {
            let (worst, _) = uniform_vs_1d(dz, bias);
            assert!(worst < 0.02, "bias {bias} dz {dz}: {worst}");
        }
    }
}

#[test]
fn mesh_convergence_of_peak_field() {
    let (_, coarse) = uniform_vs_1d(0.1, 1500.0);
    let (_, fine) = uniform_vs_1d(0.05, 1500.0);
    let (a, b) = (coarse.e_par_max(), fine.e_par_max());
    assert!((a - b).abs() / b < 0.01, "{a} vs {b}");
}

#[test]
fn discrete_gauss_law() {
    let (_, map) = uniform_vs_1d(0.1, 1000.0);
    assert!(map.charge_balance_defect < 1e-8, "{}", map.charge_balance_defect);
}

#[test]
fn spot_sampling() {
    let (_, map) = uniform_vs_1d(0.1, 1000.0);
    let (i, j) = (2, 40);
    let node = SpotRef::at("n", map.x[i], map.z[j]);
    let got = field_at_spots(&map, &[node]);
    assert_eq!(got[0].as_ref().unwrap().e_par, map.e_par[map.idx(i, j)]);
    let outside = SpotRef::at("o", 1e4, 3.0);
    assert!(matches!(field_at_spots(&map, &[outside])[0], Err(DeviceError::OutsideDomain { .. })));
}

#[test]
fn bilinear_is_exact_on_linear_fields() {
    let (_, mut map) = uniform_vs_1d(0.1, 0.0);
    for j in 0..map.nz() {
        for i in 0..map.nx() {
            let k = map.idx(i, j);
            map.e_par[k] = 2.0 * map.x[i] - 3.0 * map.z[j] + 1.0;
        }
    }
    let (x, z) = (0.5 * (map.x[1] + map.x[2]), 0.5 * (map.z[30] + map.z[31]));
    let got = field_at_spots(&map, &[SpotRef::at("c", x, z)])[0].as_ref().unwrap().e_par;
    assert!((got - (2.0 * x - 3.0 * z + 1.0)).abs() < 1e-12);
}

proptest! {
    #[test]
    fn rotation_preserves_norm(ex in -3.0..3.0f64, ey in -3.0..3.0f64, ez in -3.0..3.0f64, theta in -14.9..14.9f64) {
        let (p, x, y) = rotate_to_crystal([ex, ey, ez], theta);
        let before = (ex * ex + ey * ey + ez * ez).sqrt();
        let after = (p * p + x * x + y * y).sqrt();
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
    }
}

#[test]
fn termination_wire_extends_field() {
    let none = solve_poisson_2d(&DeviceModel2D::termination_fixture(1.89, None), 750.0).unwrap();
    let wire = solve_poisson_2d(&DeviceModel2D::termination_fixture(1.89, Some(fixture_wire(4.0))), 750.0).unwrap();
    assert!(none.converged && wire.converged);
    let cut = line_cut_x(&none, SHALLOW_DEPTH_UM).unwrap();
    for (x, e) in cut.coord.iter().zip(&cut.e_par) {
        if *x > 90.0 {
            assert!(e.abs() < 0.01, "no-wire field {e} at x = {x}");
        }
    }
    let spread = lateral_spread(&wire, SHALLOW_DEPTH_UM, SPREAD_THRESHOLD_MV_PER_CM).unwrap().unwrap();
    assert!(spread > 100.0, "{spread}");
}

/// Three sensor spots on the termination fixture with the off-cut pointing
/// towards the anode. Under the anode the field is vertical and E⊥/E∥ is
/// the 4° tilt; at point1 the lateral field cancels the tilt, and at
/// point3, past the JTE edge, it adds to it.
#[test]
fn point_spots_span_the_ratio_targets() {
    let mut m = DeviceModel2D::termination_fixture(1.89, None);
    m.miscut_deg = -4.0;
    let map = solve_poisson_2d(&m, 750.0).unwrap();
    assert!(map.converged);
    let spots = [SpotRef::at("point1", 10.0, 5.0), SpotRef::at("point2", -10.0, 5.0), SpotRef::at("point3", 62.0, 5.5)];
    let ratio: Vec<f64> = field_at_spots(&map, &spots)
        .into_iter()
        .map(|f| {
            let f = f.unwrap();
            assert!(f.e_par > 0.2, "{f:?}");
            f.e_perp.abs() / f.e_par
        })
        .collect();
    assert!(ratio[0] < 0.01, "{ratio:?}");
    assert!((ratio[1] - 0.07).abs() < 0.005, "{ratio:?}");
    assert!((ratio[2] - 0.19).abs() < 0.015, "{ratio:?}");
}
