//! Device electrostatics: 1D depletion analytics, critical field, miscut
//! rotation, and a 2D nonlinear Poisson solver for the termination region.

mod junction;
mod model;
mod poisson;
mod sample;

pub use junction::{
    breakdown_field, depletion_1d, rotate_to_crystal, Depletion1D, Junction1D, DEFAULT_BUILTIN_V, SIC_EPS_R,
};
pub use model::{axis_from_bands, fixture_wire, DeviceModel2D, DopingBox, GridBand, SolverOptions, Wire};
pub use poisson::{solve_poisson_2d, FieldMap, SolveWarning};
pub use sample::{
    field_at_spots, lateral_spread, line_cut_x, line_cut_z, map_difference, LineCut, SpotField,
    SHALLOW_DEPTH_UM, SPREAD_THRESHOLD_MV_PER_CM,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeviceError {
    #[error("invalid device model: {0}")]
    InvalidModel(&'static str),
    #[error("bias must be finite and non-negative, got {0}")]
    InvalidBias(f64),
    #[error("{what} = {value} is outside the model's validity range")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("linear system is not positive definite at row {row}")]
    SingularSystem { row: usize },
    #[error("point ({x}, {z}) µm lies outside the domain")]
    OutsideDomain { x: f64, z: f64 },
}
