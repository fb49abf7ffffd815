//! Vacancy depth profiles, fluence-to-density conversion and spot placement.

mod profile;
mod spots;

pub use profile::{
    density_profile, fluence_from_ions_per_spot, profile_stats, DensityProfile, DepthProfile,
    ProfileStats,
};
pub use spots::{place_spot_grid, EnergyDepthTable, SpotRef, DEFAULT_PITCH_UM, DEFAULT_SPOT_DIAMETER_UM};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DoseError {
    #[error("depth grid is not strictly increasing at index {index}")]
    NonMonotoneDepth { index: usize },
    #[error("invalid profile: {0}")]
    InvalidProfile(&'static str),
    #[error("profile maximum lies on the grid boundary")]
    BoundaryPeak,
    #[error("profile does not fall to half maximum on the {0} side")]
    HalfMaxNotReached(&'static str),
    #[error("profile integrates to zero")]
    DegenerateProfile,
    #[error("energy {energy_mev} MeV is outside the table range [{min}, {max}] MeV")]
    Extrapolation { energy_mev: f64, min: f64, max: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
