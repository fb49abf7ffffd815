//! `invert`: resonance frequencies → E∥ (and E⊥ = ratio·E∥) with σ.
//!
//! Input is either `--resonances` (a `resonances.csv` from `fit-spectrum`)
//! or a single `--f-mhz`/`--f-sigma-mhz`. The spin system comes from
//! `--calibration` (`dipole_fit.json` or `ratio_fit.json`) when given,
//! otherwise from the preset with optional overrides. Output is
//! `field_estimates.csv`; rows that cannot be inverted carry an error status.

use std::path::Path;

use serde::{Deserialize, Serialize};
use vsi_core::electrometry::{invert_field, DipoleFit, RatioFit};
use vsi_core::spin::SpinSystem;

use crate::error::CliError;
use crate::formats::records::{read_resonances, write_estimates, EstimateRow, ResonanceRow};
use crate::formats::{read_text, Document, FormatError, Header};
use crate::params::{Common, Run};

#[derive(Debug, Default, clap::Args, Serialize)]
pub struct Args {
    /// `resonances.csv` from fit-spectrum.
    #[arg(long)]
    pub resonances: Option<String>,
    /// Single resonance frequency, MHz.
    #[arg(long)]
    pub f_mhz: Option<f64>,
    /// Its 1σ, MHz.
    #[arg(long)]
    pub f_sigma_mhz: Option<f64>,
    /// Assumed E⊥/E∥ at the sensor.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// `dipole_fit.json` or `ratio_fit.json`.
    #[arg(long)]
    pub calibration: Option<String>,
    #[arg(long)]
    pub zfs_d: Option<f64>,
    #[arg(long)]
    pub d_par: Option<f64>,
    #[arg(long)]
    pub d_perp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub resonances: Option<String>,
    pub f_mhz: Option<f64>,
    pub f_sigma_mhz: f64,
    pub ratio: f64,
    pub calibration: Option<String>,
    pub zfs_d: Option<f64>,
    pub d_par: Option<f64>,
    pub d_perp: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            resonances: None,
            f_mhz: None,
            f_sigma_mhz: 0.3,
            ratio: 0.0,
            calibration: None,
            zfs_d: None,
            d_par: None,
            d_perp: None,
        }
    }
}

/// Spin system from a calibration document (either kind).
pub fn calibrated_system(path: &str) -> Result<SpinSystem, CliError> {
    let p = Path::new(path);
    let text = read_text(p)?;
    if let Ok(d) = Document::<DipoleFit>::from_json(&text) {
        return Ok(d.data.spin_system());
    }
    let d = Document::<RatioFit>::from_json(&text)
        .map_err(|_| FormatError::Invalid("neither a dipole_fit nor a ratio_fit document".into()).in_file(p))?;
    let r = d.data;
    Ok(SpinSystem::vsi_with(r.zfs_d, r.d_par_over_h, r.ratio.value * r.d_par_over_h.abs()))
}

pub fn system_for(common: &Common, calibration: Option<&str>, zfs_d: Option<f64>, d_par: Option<f64>, d_perp: Option<f64>) -> Result<SpinSystem, CliError> {
    match calibration {
        Some(c) => calibrated_system(c),
        None => common.spin_system(zfs_d, d_par, d_perp),
    }
}

/// Inverts every fitted row; failures stay in place as error rows.
pub fn invert_rows(sys: &SpinSystem, rows: &[ResonanceRow], ratio: f64) -> Vec<EstimateRow> {
    rows.iter()
        .map(|r| {
            let (f, s) = match &r.fit {
                Ok((f, s)) => (Some(*f), Some(*s)),
                Err(_) => (None, None),
            };
            let estimate = match &r.fit {
                Ok((f, s)) => invert_field(sys, *f, *s, ratio).map_err(|e| e.to_string()),
                Err(e) => Err(format!("no resonance ({e})")),
            };
            EstimateRow {
                spot_id: r.spot_id.clone(),
                bias_v: r.bias_v,
                f_mhz: f,
                f_sigma_mhz: s,
                estimate,
            }
        })
        .collect()
}

pub fn load_resonances(path: &str) -> Result<Vec<ResonanceRow>, CliError> {
    let p = Path::new(path);
    let (_, rows) = read_resonances(&read_text(p)?).map_err(|e| e.in_file(p))?;
    Ok(rows)
}

pub fn run(run: &mut Run, common: &Common, p: &Params) -> Result<(), CliError> {
    let sys = system_for(common, p.calibration.as_deref(), p.zfs_d, p.d_par, p.d_perp)?;
    let rows = match (&p.resonances, p.f_mhz) {
        (Some(path), _) => load_resonances(path)?,
        (None, Some(f)) => vec![ResonanceRow {
            spot_id: "-".into(),
            bias_v: None,
            fit: Ok((f, p.f_sigma_mhz)),
        }],
        (None, None) => return Err(CliError::Config("give --resonances or --f-mhz".into())),
    };
    let est = invert_rows(&sys, &rows, p.ratio);
    run.write("field_estimates.csv", &write_estimates(&est, &Header::new(&run.prov)))?;
    report(&est)
}

/// Prints row failures; all-failed is a statistical error.
pub fn report(est: &[EstimateRow]) -> Result<(), CliError> {
    let mut n_ok = 0;
    for r in est {
        match &r.estimate {
            Ok(e) => {
                n_ok += 1;
                say!("{}: E_par = {} ± {} MV/cm{}", r.spot_id, e.e_par, e.sigma_e, if e.linearity_ok { "" } else { " (nonlinear)" });
            }
            Err(e) => esay!("warning: {}: {e}", r.spot_id),
        }
    }
    if n_ok == 0 {
        return Err(CliError::Statistical("no resonance could be inverted".into()));
    }
    Ok(())
}
