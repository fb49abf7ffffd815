//! ODMR spectra: Lorentzian synthesis and damped least-squares fitting.
//!
//! Spectrum model:
//!
//! ```text
//! contrast(f) = baseline + Σ_k A_k (Γ_k/2)² / ((f − f_k)² + (Γ_k/2)²)
//! ```
//!
//! Contrast is stored with positive amplitude for a resonance; renderers may
//! flip the sign to draw dips.

mod fit;
mod lm;
mod series;
mod spectrum;

pub use fit::{fit_spectrum, fit_spectrum_with, FitOptions, FitResult, FitWarning};
pub use lm::{LevenbergMarquardt, LmOutcome, LmProblem};
pub use series::{resonance_series, FitFailure, ResonanceOutcome, ResonanceRecord, ResonanceSeries};
pub use spectrum::{
    linear_grid, lorentzian, model_contrast, peaks_from_transitions, synthesize_spectrum,
    LinePeak, OdmrSpectrum, SpectrumMeta, MIN_SPECTRUM_POINTS,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdmrError {
    #[error("frequency grid is empty")]
    EmptyGrid,
    #[error("spectrum has {0} points; at least {MIN_SPECTRUM_POINTS} are required")]
    TooFewPoints(usize),
    #[error("frequency grid is not strictly increasing at index {0}")]
    NonMonotoneGrid(usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("frequency and contrast lengths differ ({freqs} vs {contrast})")]
    LengthMismatch { freqs: usize, contrast: usize },
    #[error("invalid line peak: {0}")]
    InvalidPeak(&'static str),
    #[error("noise sigma must be finite and non-negative")]
    InvalidNoise,
    #[error("unsupported peak count {0}; use 1 or 2")]
    UnsupportedPeakCount(usize),
    #[error("no resonance structure found for initialization")]
    NoPeakFound,
}
