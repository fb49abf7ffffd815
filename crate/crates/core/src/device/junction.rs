#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::DeviceError;
use crate::constants::{Q_OVER_EPS0_V_UM2, V_PER_UM_TO_MV_PER_CM};

pub const SIC_EPS_R: f64 = 9.7;
pub const DEFAULT_BUILTIN_V: f64 = 2.7;

/// Abrupt one-sided p⁺/n junction on an n-epilayer of finite thickness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Junction1D {
    /// cm⁻³.
    pub donor_conc: f64,
    /// µm.
    pub epi_thickness: f64,
    pub eps_r: f64,
    /// V.
    pub builtin_v: f64,
}

impl Junction1D {
    pub fn new(donor_conc: f64, epi_thickness: f64) -> Self {
        Self {
            donor_conc,
            epi_thickness,
            eps_r: SIC_EPS_R,
            builtin_v: DEFAULT_BUILTIN_V,
        }
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        if !(self.donor_conc.is_finite() && self.donor_conc > 0.0) {
            return Err(DeviceError::InvalidModel("donor concentration must be positive"));
        }
        if !(self.epi_thickness.is_finite() && self.epi_thickness > 0.0) {
            return Err(DeviceError::InvalidModel("epilayer thickness must be positive"));
        }
        if !(self.eps_r.is_finite() && self.eps_r > 0.0) {
            return Err(DeviceError::InvalidModel("permittivity must be positive"));
        }
        if !self.builtin_v.is_finite() {
            return Err(DeviceError::InvalidModel("built-in potential must be finite"));
        }
        Ok(())
    }

    /// qN/ε in V/µm².
    pub fn charge_curvature(&self) -> f64 {
        Q_OVER_EPS0_V_UM2 * self.donor_conc / self.eps_r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Depletion1D {
    /// Depleted thickness, capped at the epilayer thickness, µm.
    pub width: f64,
    /// Width an unbounded epilayer would deplete to, µm.
    pub free_width: f64,
    /// MV/cm.
    pub e_max: f64,
    pub punch_through: bool,
    /// V/µm².
    curvature: f64,
}

impl Depletion1D {
    /// Field magnitude at distance `z` (µm) below the junction, MV/cm.
    pub fn field_at(&self, z: f64) -> f64 {
        if z < 0.0 || z > self.width {
            return 0.0;
        }
        (self.e_max - self.curvature * z * V_PER_UM_TO_MV_PER_CM).max(0.0)
    }
}

pub fn depletion_1d(j: &Junction1D, bias_v: f64) -> Result<Depletion1D, DeviceError> {
    j.validate()?;
    if !(bias_v.is_finite() && bias_v >= 0.0) {
        return Err(DeviceError::InvalidBias(bias_v));
    }
    let k = j.charge_curvature();
    let v_eff = (j.builtin_v + bias_v).max(0.0);
    let free_width = (2.0 * v_eff / k).sqrt();
    let t = j.epi_thickness;
    let (width, e_max_v_um, punch_through) = if free_width <= t {
        (free_width, k * free_width, false)
    } else {
        (t, v_eff / t + 0.5 * k * t, true)
    };
    Ok(Depletion1D {
        width,
        free_width,
        e_max: e_max_v_um * V_PER_UM_TO_MV_PER_CM,
        punch_through,
        curvature: k,
    })
}

/// Empirical 4H-SiC critical field, MV/cm, valid for 1e14 ≤ N ≤ 1e18 cm⁻³.
pub fn breakdown_field(donor_conc: f64) -> Result<f64, DeviceError> {
    if !(1e14..=1e18).contains(&donor_conc) {
        return Err(DeviceError::OutOfRange {
            what: "donor concentration",
            value: donor_conc,
        });
    }
    Ok(2.49 / (1.0 - 0.25 * (donor_conc / 1e16).log10()))
}

/// Device-frame field (x along the off-cut direction, z along the outward
/// surface normal) to crystal frame: (E∥, E⊥x, E⊥y).
pub fn rotate_to_crystal(e_device: [f64; 3], miscut_deg: f64) -> (f64, f64, f64) {
    let (s, c) = miscut_deg.to_radians().sin_cos();
    let [ex, ey, ez] = e_device;
    (ez * c + ex * s, -ez * s + ex * c, ey)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn punch_through_at_1500v() {
        let d = depletion_1d(&Junction1D::new(1e16, 12.0), 1500.0).unwrap();
        assert!(d.punch_through);
        assert!(d.e_max > 2.3 && d.e_max < 2.4, "{}", d.e_max);
        assert!(d.free_width > 12.0);
    }

    #[test]
    fn zero_bias() {
        let j = Junction1D::new(1e16, 12.0);
        let d = depletion_1d(&j, 0.0).unwrap();
        let w = (2.0 * 2.7 / j.charge_curvature()).sqrt();
        assert!((d.width - w).abs() < 1e-12);
        assert!(!d.punch_through);
        let e = (2.0 * j.charge_curvature() * 2.7).sqrt() * 0.01;
        assert!((d.e_max - e).abs() < 1e-12);
        assert!(d.e_max < 0.101, "{}", d.e_max);
    }

    #[test]
    fn quadrupled_doping_doubles_field() {
        let a = depletion_1d(&Junction1D::new(1e15, 100.0), 100.0).unwrap();
        let b = depletion_1d(&Junction1D::new(4e15, 100.0), 100.0).unwrap();
        assert!((b.e_max / a.e_max - 2.0).abs() < 1e-12);
    }

    #[test]
    fn profile_is_linear_and_closes() {
        let d = depletion_1d(&Junction1D::new(1e16, 12.0), 100.0).unwrap();
        assert_eq!(d.field_at(0.0), d.e_max);
        assert!(d.field_at(d.width).abs() < 1e-12);
        assert_eq!(d.field_at(d.width + 1.0), 0.0);
    }

    #[test]
    fn breakdown_law() {
        assert_eq!(breakdown_field(1e16).unwrap(), 2.49);
        assert!((breakdown_field(1e17).unwrap() - 2.49 / 0.75).abs() < 1e-12);
        assert!(breakdown_field(1e13).is_err());
        assert!(breakdown_field(1e17).unwrap() > breakdown_field(1e15).unwrap());
    }

    #[test]
    fn rotation() {
        assert_eq!(rotate_to_crystal([0.3, 0.2, 1.0], 0.0), (1.0, 0.3, 0.2));
        let (p, x, _) = rotate_to_crystal([0.0, 0.0, 1.0], 4.0);
        assert!((p - 0.99756).abs() < 1e-5 && (x + 0.06976).abs() < 1e-5);
    }
}
