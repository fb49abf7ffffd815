#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::spin::SpinSystem;

/// Upper end of the density range with a linear Stark response, cm⁻³.
pub const LINEAR_DENSITY_LIMIT: f64 = 9e15;
/// Density from which the response is visibly nonlinear, cm⁻³.
pub const NONLINEAR_DENSITY_LIMIT: f64 = 3e16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityVerdict {
    Ok,
    Warn,
    Reject,
}

/// Classifies a V_Si density for field measurements.
pub fn density_guard(vsi_density: f64) -> DensityVerdict {
    if vsi_density <= LINEAR_DENSITY_LIMIT {
        DensityVerdict::Ok
    } else if vsi_density < NONLINEAR_DENSITY_LIMIT {
        DensityVerdict::Warn
    } else {
        DensityVerdict::Reject
    }
}

/// Relative figure of merit √(N·T₂), normalized to 1 at N = 1, T₂ = 1 µs.
pub fn sensitivity_scale(n_spins: f64, t2_us: f64) -> f64 {
    (n_spins * t2_us).sqrt()
}

/// D at the given temperature. V_Si's ground-state splitting is flat over
/// 300–590 K, so this is the identity; it exists so callers can route
/// temperature through one place.
pub fn zfs_at_temperature(sys: &SpinSystem, _temperature_k: f64) -> f64 {
    sys.zfs_d
}
