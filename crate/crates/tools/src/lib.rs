//! File formats and the `vsi` command-line front end for [`vsi_core`].
//!
//! Exit codes: 0 success, 1 output failure, 2 configuration or input error,
//! 3 statistical/degeneracy error, 4 solver non-convergence.

/// `println!` that ignores a closed stdout (e.g. output piped into `head`).
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! esay {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stderr(), $($t)*);
    }};
}

pub mod cli;
pub mod commands;
pub mod data;
pub mod error;
pub mod formats;
pub mod params;

pub use error::CliError;
