use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::DoseError;

/// Vacancies created per ion per µm of depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthProfile {
    /// µm, strictly increasing.
    pub depth_um: Vec<f64>,
    /// 1/(ion·µm), non-negative.
    pub vacancies_per_ion_um: Vec<f64>,
    pub ion_species: String,
    pub ion_energy_mev: Option<f64>,
}

impl DepthProfile {
    pub fn new(depth_um: Vec<f64>, vacancies_per_ion_um: Vec<f64>) -> Result<Self, DoseError> {
        let p = Self {
            depth_um,
            vacancies_per_ion_um,
            ion_species: String::new(),
            ion_energy_mev: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DoseError> {
        if self.depth_um.len() != self.vacancies_per_ion_um.len() {
            return Err(DoseError::InvalidProfile("column lengths differ"));
        }
        if self.depth_um.is_empty() {
            return Err(DoseError::InvalidProfile("empty profile"));
        }
        if self.depth_um.iter().chain(&self.vacancies_per_ion_um).any(|v| !v.is_finite()) {
            return Err(DoseError::InvalidProfile("non-finite value"));
        }
        if self.vacancies_per_ion_um.iter().any(|&v| v < 0.0) {
            return Err(DoseError::InvalidProfile("negative vacancy yield"));
        }
        if let Some(i) = self.depth_um.windows(2).position(|w| w[1] <= w[0]) {
            return Err(DoseError::NonMonotoneDepth { index: i + 1 });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.depth_um.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth_um.is_empty()
    }

    /// Trapezoidal integral, vacancies per ion.
    pub fn integral(&self) -> f64 {
        self.depth_um
            .windows(2)
            .zip(self.vacancies_per_ion_um.windows(2))
            .map(|(z, v)| 0.5 * (z[1] - z[0]) * (v[0] + v[1]))
            .sum()
    }

    /// Integral over peak height: the width of a box profile with the same
    /// area and peak, µm.
    pub fn effective_thickness(&self) -> Result<f64, DoseError> {
        let peak = self.vacancies_per_ion_um.iter().copied().fold(0.0, f64::max);
        if peak <= 0.0 {
            return Err(DoseError::DegenerateProfile);
        }
        Ok(self.integral() / peak)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileStats {
    pub peak_depth_um: f64,
    pub fwhm_um: f64,
    pub peak_value: f64,
}

/// Peak depth (parabolic refinement of the discrete maximum) and FWHM
/// (linear interpolation of the half-maximum crossings).
pub fn profile_stats(p: &DepthProfile) -> Result<ProfileStats, DoseError> {
    p.validate()?;
    let z = &p.depth_um;
    let v = &p.vacancies_per_ion_um;
    let n = z.len();
    let mut imax = 0;
    for i in 1..n {
        if v[i] > v[imax] {
            imax = i;
        }
    }
    if imax == 0 || imax == n - 1 || v[imax] <= 0.0 {
        return Err(DoseError::BoundaryPeak);
    }

    let (z0, z1, z2) = (z[imax - 1], z[imax], z[imax + 1]);
    let (v0, v1, v2) = (v[imax - 1], v[imax], v[imax + 1]);
    // Lagrange parabola through the three samples.
    let d01 = (v1 - v0) / (z1 - z0);
    let d12 = (v2 - v1) / (z2 - z1);
    let a = (d12 - d01) / (z2 - z0);
    let (peak_z, peak_v) = if a < 0.0 {
        let b = d01 - a * (z0 + z1);
        let zp = (-b / (2.0 * a)).clamp(z0, z2);
        let vp = v0 + d01 * (zp - z0) + a * (zp - z0) * (zp - z1);
        (zp, vp.max(v1))
    } else {
        (z1, v1)
    };

    let half = 0.5 * peak_v;
    let mut left = None;
    for i in (0..imax).rev() {
        if v[i] < half {
            left = Some(z[i] + (half - v[i]) / (v[i + 1] - v[i]) * (z[i + 1] - z[i]));
            break;
        }
    }
    let mut right = None;
    for i in imax + 1..n {
        if v[i] < half {
            right = Some(z[i - 1] + (v[i - 1] - half) / (v[i - 1] - v[i]) * (z[i] - z[i - 1]));
            break;
        }
    }
    let left = left.ok_or(DoseError::HalfMaxNotReached("shallow"))?;
    let right = right.ok_or(DoseError::HalfMaxNotReached("deep"))?;
    Ok(ProfileStats {
        peak_depth_um: peak_z,
        fwhm_um: right - left,
        peak_value: peak_v,
    })
}

/// V_Si density versus depth, cm⁻³.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub depth_um: Vec<f64>,
    pub density_cm3: Vec<f64>,
    pub peak_density_cm3: f64,
}

/// `fluence × rate × p(z)/∫p`, converted from µm⁻¹·cm⁻² to cm⁻³.
pub fn density_profile(
    p: &DepthProfile,
    fluence_cm2: f64,
    generation_rate: f64,
) -> Result<DensityProfile, DoseError> {
    p.validate()?;
    if !(fluence_cm2.is_finite() && fluence_cm2 > 0.0) {
        return Err(DoseError::InvalidArgument("fluence must be positive"));
    }
    if !(generation_rate.is_finite() && generation_rate >= 0.0) {
        return Err(DoseError::InvalidArgument("generation rate must be non-negative"));
    }
    let area = p.integral();
    if area <= 0.0 {
        return Err(DoseError::DegenerateProfile);
    }
    let scale = fluence_cm2 * generation_rate / area * 1e4;
    let density_cm3: Vec<f64> = p.vacancies_per_ion_um.iter().map(|v| v * scale).collect();
    let peak_density_cm3 = density_cm3.iter().copied().fold(0.0, f64::max);
    Ok(DensityProfile {
        depth_um: p.depth_um.clone(),
        density_cm3,
        peak_density_cm3,
    })
}

/// Areal fluence for `ions` delivered into one spot, cm⁻², using the
/// square d × d footprint.
pub fn fluence_from_ions_per_spot(ions: f64, spot_diameter_um: f64) -> f64 {
    let side_cm = spot_diameter_um * 1e-4;
    ions / (side_cm * side_cm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_traits::Float;

    fn gaussian(center: f64, sigma: f64, amp: f64) -> DepthProfile {
        let z: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
        let v = z.iter().map(|&z| amp * (-0.5 * ((z - center) / sigma).powi(2)).exp()).collect();
        DepthProfile::new(z, v).unwrap()
    }

    #[test]
    fn gaussian_stats() {
        let s = profile_stats(&gaussian(2.1, 0.15, 3.0)).unwrap();
        assert!((s.peak_depth_um - 2.1).abs() < 1e-3);
        let expect = 2.0 * (2.0 * 2.0.ln()).sqrt() * 0.15;
        assert!((s.fwhm_um - expect).abs() / expect < 0.01);
    }

    #[test]
    fn off_grid_peak_refined() {
        let s = profile_stats(&gaussian(1.6037, 0.2, 1.0)).unwrap();
        assert!((s.peak_depth_um - 1.6037).abs() < 1e-4);
    }

    #[test]
    fn flat_profile_is_boundary_peak() {
        let p = DepthProfile::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(profile_stats(&p), Err(DoseError::BoundaryPeak));
    }

    #[test]
    fn shuffled_depth_rejected() {
        assert_eq!(
            DepthProfile::new(vec![0.0, 2.0, 1.0], vec![0.0, 1.0, 0.0]),
            Err(DoseError::NonMonotoneDepth { index: 2 })
        );
    }

    #[test]
    fn methods_density_anchor() {
        // Gaussian whose area/peak is 0.8 µm.
        let sigma = 0.8 / (2.0 * core::f64::consts::PI).sqrt();
        let p = gaussian(2.1, sigma, 0.5);
        assert!((p.effective_thickness().unwrap() - 0.8).abs() < 1e-6);
        let fluence = fluence_from_ions_per_spot(5e3, 1.0);
        assert!((fluence - 5e11).abs() < 1.0);
        let d = density_profile(&p, fluence, 0.8).unwrap();
        assert!((d.peak_density_cm3 - 5e15).abs() / 5e15 < 1e-6);
    }

    #[test]
    fn zero_profile_degenerate() {
        let p = DepthProfile::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(density_profile(&p, 1e11, 0.8), Err(DoseError::DegenerateProfile));
    }
}
