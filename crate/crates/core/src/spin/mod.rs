//! Ground-state spin Hamiltonian of a C3v spin defect with Stark terms.
//!
//! The Hamiltonian is written in the crystal frame (z′ along the c-axis),
//! in MHz:
//!
//! ```text
//! H = gμB/h S·B + (D + d∥/h E_z′)[S_z′² − S(S+1)/3]
//!     − d⊥/h [E_x′(S_x′S_y′ + S_y′S_x′) + E_y′(S_x′² − S_y′²)]
//! ```
//!
//! [`transition_frequencies`] diagonalizes it and reports every level pair
//! connected by a transverse (S_x) drive.

mod eigen;
mod hamiltonian;
mod system;
mod transitions;

pub use eigen::{eigh, HermitianEigen};
pub use hamiltonian::{build_hamiltonian, spin_operators, HermitianMatrix, SpinOperators, MAX_DIM};
pub use system::{
    MAX_FIELD_MV_PER_CM,
    CrystalField, DipoleValue, FieldError, Preset, PresetEntry, SignAnnotation, SpinSystem,
    PRESET_TABLE,
};
pub use transitions::{
    analytic_axial_frequency, transition_frequencies, transition_frequencies_with, Transition,
    TransitionOptions, TransitionSet,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinError {
    #[error("unsupported spin S = {twice_spin}/2 (only S = 1 and S = 3/2 are implemented)")]
    UnsupportedSpin { twice_spin: u32 },
    #[error("invalid spin system: {0}")]
    InvalidSystem(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
}
