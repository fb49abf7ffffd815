//! Physical constants (CODATA 2018) and derived unit conversions.

/// Bohr magneton over Planck constant, MHz/mT.
pub const BOHR_MHZ_PER_MT: f64 = 13.996_244_936_1;

/// Free-electron-like g-factor used when none is given.
pub const DEFAULT_G_FACTOR: f64 = 2.0028;

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Vacuum permittivity, F/cm.
pub const VACUUM_PERMITTIVITY_F_PER_CM: f64 = 8.854_187_812_8e-14;

/// Boltzmann constant, eV/K.
pub const BOLTZMANN_EV_PER_K: f64 = 8.617_333_262e-5;

/// q/ε₀ expressed so that `Q_OVER_EPS0_V_UM2 * N[cm⁻³]` is a potential
/// curvature in V/µm².
pub const Q_OVER_EPS0_V_UM2: f64 = ELEMENTARY_CHARGE / VACUUM_PERMITTIVITY_F_PER_CM * 1e-8;

/// 1 V/µm in MV/cm.
pub const V_PER_UM_TO_MV_PER_CM: f64 = 0.01;

/// Thermal voltage kT/q in V.
pub fn thermal_voltage(temperature_k: f64) -> f64 {
    BOLTZMANN_EV_PER_K * temperature_k
}
