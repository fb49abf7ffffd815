//! `fit-spectrum`: Lorentzian fits of spectrum files.
//!
//! Outputs `resonances.csv` (dominant line per file), `fits.json` (full fit
//! results) and, when `--fields` names a series to take E∥/E⊥ from by bias,
//! `bias_series.csv` ready for `fit-dipole`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use vsi_core::electrometry::BiasSeries;
use vsi_core::odmr::{fit_spectrum, FitResult, FitFailure, ResonanceOutcome, ResonanceRecord, ResonanceSeries};

use crate::data;
use crate::error::CliError;
use crate::formats::records::{write_resonances, ResonanceRow};
use crate::formats::series::write_series;
use crate::formats::spectrum::load_spectrum;
use crate::formats::{Document, Header};
use crate::params::{Common, Run};

#[derive(Debug, Default, clap::Args, Serialize)]
pub struct Args {
    /// Spectrum CSV files.
    pub inputs: Vec<String>,
    /// Lines per spectrum (1 or 2).
    #[arg(long)]
    pub n_peaks: Option<usize>,
    /// Series (bundled name or CSV) supplying E∥/E⊥ per bias.
    #[arg(long)]
    pub fields: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub inputs: Vec<String>,
    pub n_peaks: usize,
    pub fields: Option<String>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            n_peaks: 1,
            fields: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct FitEntry {
    file: String,
    bias_v: f64,
    spot_id: String,
    result: Option<FitResult>,
    error: Option<String>,
}

pub fn run(run: &mut Run, _common: &Common, p: &Params) -> Result<(), CliError> {
    if p.inputs.is_empty() {
        return Err(CliError::Config("no spectrum files given".into()));
    }
    let mut entries = Vec::with_capacity(p.inputs.len());
    let mut records = Vec::with_capacity(p.inputs.len());
    for input in &p.inputs {
        let s = load_spectrum(Path::new(input))?;
        let (result, outcome) = match fit_spectrum(&s, p.n_peaks, None) {
            Ok(fit) => {
                let outcome = match (fit.converged, fit.dominant()) {
                    (true, Some((peak, sigma))) => ResonanceOutcome::Fitted {
                        f_mhz: peak.center,
                        sigma_mhz: sigma,
                    },
                    (true, None) => ResonanceOutcome::Failed(FitFailure::Error("no peak".into())),
                    (false, _) => ResonanceOutcome::Failed(FitFailure::NotConverged {
                        iterations: fit.iterations,
                    }),
                };
                (Some(fit), outcome)
            }
            Err(e) => (None, ResonanceOutcome::Failed(FitFailure::Error(e.to_string()))),
        };
        entries.push(FitEntry {
            file: input.clone(),
            bias_v: s.meta.bias_v,
            spot_id: s.meta.spot_id.clone(),
            result,
            error: match &outcome {
                ResonanceOutcome::Failed(f) => Some(failure_text(f)),
                ResonanceOutcome::Fitted { .. } => None,
            },
        });
        records.push(ResonanceRecord {
            bias_v: s.meta.bias_v,
            spot_id: s.meta.spot_id.clone(),
            outcome,
        });
    }
    let rows: Vec<ResonanceRow> = records
        .iter()
        .map(|r| ResonanceRow {
            spot_id: r.spot_id.clone(),
            bias_v: Some(r.bias_v),
            fit: match &r.outcome {
                ResonanceOutcome::Fitted { f_mhz, sigma_mhz } => Ok((*f_mhz, *sigma_mhz)),
                ResonanceOutcome::Failed(f) => Err(failure_text(f)),
            },
        })
        .collect();
    let header = Header::new(&run.prov);
    run.write("resonances.csv", &write_resonances(&rows, &header))?;
    run.write(
        "fits.json",
        &Document {
            provenance: run.prov.clone(),
            data: &entries,
        }
        .to_json(),
    )?;
    let n_ok = rows.iter().filter(|r| r.fit.is_ok()).count();
    for r in rows.iter().filter(|r| r.fit.is_err()) {
        esay!("warning: bias {:?} V: {}", r.bias_v.unwrap_or(f64::NAN), r.fit.as_ref().unwrap_err());
    }
    if n_ok == 0 {
        return Err(CliError::Statistical("no spectrum could be fitted".into()));
    }

    if let Some(spec) = &p.fields {
        let fields = data::load_series(spec)?;
        let mut series = ResonanceSeries { records };
        series.records.sort_by(|a, b| a.bias_v.total_cmp(&b.bias_v));
        let mut missing = Vec::new();
        let (mut bias_series, _) = BiasSeries::from_resonances(&series, fields.source, |bias| {
            match fields.records.iter().find(|r| r.bias_v == bias) {
                Some(r) => (r.e_par, r.e_perp),
                None => {
                    missing.push(bias);
                    (0.0, 0.0)
                }
            }
        })
        .map_err(|e| CliError::Config(e.to_string()))?;
        if !missing.is_empty() {
            return Err(CliError::Config(format!("{spec} has no fields for biases {missing:?} V")));
        }
        bias_series.spot = fields.spot.clone();
        run.write("bias_series.csv", &write_series(&bias_series, header))?;
    }
    Ok(())
}

fn failure_text(f: &FitFailure) -> String {
    match f {
        FitFailure::NotConverged { iterations } => format!("not converged after {iterations} iterations"),
        FitFailure::Error(e) => e.clone(),
    }
}
