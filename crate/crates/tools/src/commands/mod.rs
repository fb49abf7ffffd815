//! One module per subcommand. Each has clap `Args` (every flag optional),
//! serde `Params` (the resolved configuration, with defaults) and `run`.

pub mod device_sim;
pub mod dose;
pub mod fit_dipole;
pub mod fit_spectrum;
pub mod invert;
pub mod map_field;
pub mod simulate_spectrum;
