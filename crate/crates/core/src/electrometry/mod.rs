//! Dipole calibration, resonance-to-field inversion and validity guards.

mod dipole;
mod guards;
mod invert;
mod series;

pub use dipole::{
    fit_dipole_parallel, fit_ratio_perp, fit_ratio_perp_with, DipoleFit, Estimate, ModelCurve,
    RatioFit, RatioScanOptions, POINT1_MAX_PERP_RATIO,
};
pub use guards::{density_guard, sensitivity_scale, zfs_at_temperature, DensityVerdict};
pub use invert::{fold_point, invert_field, FieldEstimate, LINEARITY_TOLERANCE};
pub use series::{resonance_model, BiasRecord, BiasSeries, FieldSource};

use thiserror::Error;

use crate::spin::SpinError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElectrometryError {
    #[error("record {index}: E⊥/E∥ = {ratio} violates the < {limit} requirement")]
    PerpRatioTooLarge { index: usize, ratio: f64, limit: f64 },
    #[error("degenerate regression design: {0}")]
    DegenerateDesign(&'static str),
    #[error("ratio objective is flat (Δχ² = {delta_chi2} over [0, 2]); not enough E⊥ leverage")]
    IllConditionedRatio { delta_chi2: f64 },
    #[error("invalid series: {0}")]
    InvalidSeries(&'static str),
    #[error("f = {f_mhz} MHz exceeds the zero-field line {f_zero} MHz by more than 3σ")]
    UnphysicalFrequency { f_mhz: f64, f_zero: f64 },
    #[error("f = {f_mhz} MHz lies below the fold minimum {f_fold} MHz; branch is ambiguous")]
    AmbiguousBranch { f_mhz: f64, f_fold: f64 },
    #[error("model frequency does not decrease with E∥ (d∥ must be negative)")]
    NonDecreasingModel,
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error(transparent)]
    Spin(#[from] SpinError),
}

/// Golden-section minimum of `f` on `[a, b]` to an interval width of `tol`.
pub(crate) fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fc < fx && fc <= fd {
        (c, fc)
    } else if fd < fx {
        (d, fd)
    } else {
        (x, fx)
    }
}
