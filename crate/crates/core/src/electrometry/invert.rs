#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{golden_section, resonance_model, ElectrometryError};
use crate::spin::{SpinSystem, MAX_FIELD_MV_PER_CM};

/// Relative disagreement between linear and full inversion above which
/// `linearity_ok` is cleared.
pub const LINEARITY_TOLERANCE: f64 = 0.01;

const FOLD_SCAN_STEP: f64 = 0.01;
const BISECTION_TOL: f64 = 1e-10;
const SLOPE_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldEstimate {
    /// MV/cm.
    pub e_par: f64,
    /// `ratio · e_par`, MV/cm.
    pub e_perp: f64,
    pub sigma_e: f64,
    pub linearity_ok: bool,
    /// (f − 2D)/(2d∥/h), MV/cm.
    pub e_par_linear: f64,
    /// End of the monotone branch, MV/cm.
    pub e_fold: f64,
}

/// E∥ where the model frequency along E⊥ = ratio·E∥ stops decreasing, and
/// the frequency there. Returns the scan limit when no fold occurs below it.
pub fn fold_point(sys: &SpinSystem, ratio: f64) -> Result<(f64, f64), ElectrometryError> {
    if !(ratio.is_finite() && ratio >= 0.0) {
        return Err(ElectrometryError::InvalidInput("ratio must be finite and non-negative"));
    }
    let g = |e: f64| resonance_model(sys, e, ratio * e);
    let e_max = 0.999 * MAX_FIELD_MV_PER_CM / (1.0 + ratio * ratio).sqrt();
    let f0 = g(0.0)?;
    let mut prev = f0;
    if !(g(FOLD_SCAN_STEP)? < f0) {
        return Err(ElectrometryError::NonDecreasingModel);
    }
    let n = (e_max / FOLD_SCAN_STEP) as usize;
    for k in 1..=n {
        let e = k as f64 * FOLD_SCAN_STEP;
        let f = g(e)?;
        if f >= prev {
            let lo = (e - 2.0 * FOLD_SCAN_STEP).max(0.0);
            let (e_fold, f_fold) = golden_section(|x| g(x).unwrap_or(f64::INFINITY), lo, e, 1e-9);
            return Ok((e_fold, f_fold));
        }
        prev = f;
    }
    Ok((e_max, g(e_max)?))
}

/// Solves f_model(E∥, ratio·E∥) = f_meas on the pre-fold branch.
pub fn invert_field(
    sys: &SpinSystem,
    f_meas: f64,
    f_sigma: f64,
    ratio: f64,
) -> Result<FieldEstimate, ElectrometryError> {
    sys.validate()?;
    if !f_meas.is_finite() {
        return Err(ElectrometryError::InvalidInput("frequency must be finite"));
    }
    if !(f_sigma.is_finite() && f_sigma > 0.0) {
        return Err(ElectrometryError::InvalidInput("σ_f must be positive"));
    }
    let g = |e: f64| resonance_model(sys, e, ratio * e);
    let (e_fold, f_fold) = fold_point(sys, ratio)?;
    let f_zero = g(0.0)?;
    if f_meas > f_zero + 3.0 * f_sigma {
        return Err(ElectrometryError::UnphysicalFrequency { f_mhz: f_meas, f_zero });
    }
    if f_meas < f_fold {
        return Err(ElectrometryError::AmbiguousBranch { f_mhz: f_meas, f_fold });
    }

    let e_par = if f_meas >= f_zero {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, e_fold);
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if g(mid)? > f_meas {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let slope = (g(e_par + SLOPE_STEP)? - g(e_par - SLOPE_STEP)?) / (2.0 * SLOPE_STEP);
    let sigma_e = if slope == 0.0 { f64::INFINITY } else { f_sigma / slope.abs() };
    let e_par_linear = (f_meas - 2.0 * sys.zfs_d) / (2.0 * sys.d_par_over_h);
    let linearity_ok = (e_par_linear - e_par).abs() <= LINEARITY_TOLERANCE * e_par.abs() + BISECTION_TOL;

    Ok(FieldEstimate {
        e_par,
        e_perp: ratio * e_par,
        sigma_e,
        linearity_ok,
        e_par_linear,
        e_fold,
    })
}
