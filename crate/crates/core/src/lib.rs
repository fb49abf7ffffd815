//! Models for silicon-vacancy (V_Si) electrometry in 4H-SiC power devices.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! core. File formats and the command-line front end live in `vsi-tools`.
//!
//! Units used throughout unless a name says otherwise:
//!
//! | quantity            | unit              |
//! |---------------------|-------------------|
//! | frequency           | MHz               |
//! | electric field      | MV/cm             |
//! | magnetic field      | mT                |
//! | dipole moment / h   | MHz/(MV/cm)       |
//! | length              | µm                |
//! | doping, density     | cm⁻³              |
//! | potential           | V                 |
//!
//! Modules:
//! - [`spin`]: ground-state spin Hamiltonian with Stark terms and its ODMR transitions.
//! - [`odmr`]: Lorentzian spectrum synthesis and Levenberg-Marquardt fitting.
//! - [`electrometry`]: dipole calibration, resonance-to-field inversion, validity guards.
//! - [`device`]: 1D depletion analytics, 2D nonlinear Poisson solver, miscut rotation.
//! - [`dose`]: vacancy depth profiles, fluence-to-density conversion, spot placement.
//! - [`synthetic`]: seeded fixtures shaped like the point1/point3 calibration runs.
#![no_std]
#![forbid(unsafe_code)]
// `num_traits::Float` imports are marked `allow(unused_imports)`: whenever std
// is linked into the build (tests, std dependents) its inherent float methods
// take precedence over the trait.
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;

pub mod constants;
pub mod device;
pub mod dose;
pub mod electrometry;
pub mod linalg;
pub mod odmr;
pub mod spin;
pub mod synthetic;

pub use spin::{CrystalField, SpinSystem, Transition, TransitionSet};
