//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::commands::{device_sim, dose, fit_dipole, fit_spectrum, invert, map_field, simulate_spectrum};
use crate::error::CliError;
use crate::params::{resolve, Run};

#[derive(Debug, Parser)]
#[command(name = "vsi", version, about = "V_Si electrometry toolkit: spectra, calibration, inversion, device fields, dose")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, clap::Args, Serialize)]
pub struct CommonArgs {
    /// Spin-system preset: vsi, nv, pl1 .. pl6.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Seed for every random draw of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving all output files (created if missing).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// JSON object whose keys override flags and defaults.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize ODMR spectra from the spin model.
    SimulateSpectrum(simulate_spectrum::Args),
    /// Fit Lorentzian lines to spectrum files.
    FitSpectrum(fit_spectrum::Args),
    /// Calibrate d∥ from a bias series, or |d⊥/d∥| with --fit-ratio.
    FitDipole(fit_dipole::Args),
    /// Convert resonance frequencies to electric fields.
    Invert(invert::Args),
    /// Solve the 2D device model and export field maps and line cuts.
    DeviceSim(device_sim::Args),
    /// Tabulate the field at sensor spots, from a map or by inversion.
    MapField(map_field::Args),
    /// Vacancy density from a depth profile and fluence; spot grid.
    Dose(dose::Args),
}

fn go<F, P>(
    name: &str,
    common: &CommonArgs,
    flags: &F,
    body: impl FnOnce(&mut Run, &crate::params::Common, &P) -> Result<(), CliError>,
) -> Result<Vec<PathBuf>, CliError>
where
    F: Serialize,
    P: Serialize + serde::de::DeserializeOwned + Default,
{
    let (c, p): (_, P) = resolve(common, flags, common.config.as_deref())?;
    let mut run = Run::new(name, &c, &p)?;
    let r = body(&mut run, &c, &p);
    for w in &run.written {
        say!("wrote {}", w.display());
    }
    r.map(|_| run.written)
}

/// Runs one parsed invocation.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::SimulateSpectrum(a) => go("simulate-spectrum", c, a, simulate_spectrum::run),
        Command::FitSpectrum(a) => go("fit-spectrum", c, a, fit_spectrum::run),
        Command::FitDipole(a) => go("fit-dipole", c, a, fit_dipole::run),
        Command::Invert(a) => go("invert", c, a, invert::run),
        Command::DeviceSim(a) => go("device-sim", c, a, device_sim::run),
        Command::MapField(a) => go("map-field", c, a, map_field::run),
        Command::Dose(a) => go("dose", c, a, dose::run),
    }
}

/// Entry point used by the `vsi` binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            esay!("vsi: {e}");
            e.exit_code()
        }
    }
}
