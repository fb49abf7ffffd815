//! `simulate-spectrum`: spin model → Lorentzian lines → noisy spectrum.
//!
//! Outputs `spectrum_NNN.csv` (+ `.json` sidecar) per field point and
//! `peaks.json` listing the transitions and lines used.

use serde::{Deserialize, Serialize};
use vsi_core::odmr::{linear_grid, peaks_from_transitions, synthesize_spectrum, LinePeak};
use vsi_core::spin::{transition_frequencies, CrystalField, TransitionSet};

use crate::data;
use crate::error::CliError;
use crate::formats::spectrum::{sidecar_path, write_spectrum, Sidecar};
use crate::formats::{Document, Header};
use crate::params::{Common, Run};

#[derive(Debug, Default, clap::Args, Serialize)]
pub struct Args {
    /// E∥, MV/cm.
    #[arg(long)]
    pub e_par: Option<f64>,
    /// E⊥, MV/cm.
    #[arg(long)]
    pub e_perp: Option<f64>,
    /// B∥, mT.
    #[arg(long)]
    pub b_par: Option<f64>,
    /// Zero-field splitting D, MHz (replaces the preset value).
    #[arg(long)]
    pub zfs_d: Option<f64>,
    /// d∥/h, MHz/(MV/cm).
    #[arg(long)]
    pub d_par: Option<f64>,
    /// d⊥/h, MHz/(MV/cm).
    #[arg(long)]
    pub d_perp: Option<f64>,
    /// Bias series (bundled name or CSV): one spectrum per record, using its fields.
    #[arg(long)]
    pub series: Option<String>,
    #[arg(long)]
    pub bias_v: Option<f64>,
    #[arg(long)]
    pub spot_id: Option<String>,
    /// Line FWHM, MHz.
    #[arg(long)]
    pub fwhm_mhz: Option<f64>,
    /// Total peak contrast shared among the lines.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Gaussian contrast noise σ.
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    #[arg(long)]
    pub f_start_mhz: Option<f64>,
    #[arg(long)]
    pub f_stop_mhz: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub e_par: f64,
    pub e_perp: f64,
    pub b_par: f64,
    pub zfs_d: Option<f64>,
    pub d_par: Option<f64>,
    pub d_perp: Option<f64>,
    pub series: Option<String>,
    pub bias_v: f64,
    pub spot_id: String,
    pub fwhm_mhz: f64,
    pub amplitude: f64,
    pub noise_sigma: f64,
    pub f_start_mhz: f64,
    pub f_stop_mhz: f64,
    pub points: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            e_par: 0.0,
            e_perp: 0.0,
            b_par: 0.0,
            zfs_d: None,
            d_par: None,
            d_perp: None,
            series: None,
            bias_v: 0.0,
            spot_id: "s0".into(),
            fwhm_mhz: 8.0,
            amplitude: 0.01,
            noise_sigma: 2e-4,
            f_start_mhz: 20.0,
            f_stop_mhz: 120.0,
            points: 501,
        }
    }
}

#[derive(Debug, Serialize)]
struct PeakEntry {
    file: String,
    bias_v: f64,
    field: CrystalField,
    transitions: TransitionSet,
    peaks: Vec<LinePeak>,
}

pub fn run(run: &mut Run, common: &Common, p: &Params) -> Result<(), CliError> {
    let sys = common.spin_system(p.zfs_d, p.d_par, p.d_perp)?;
    if !(p.f_stop_mhz > p.f_start_mhz) || p.points < 2 {
        return Err(CliError::Config("frequency grid needs f_stop_mhz > f_start_mhz and points ≥ 2".into()));
    }
    // (bias, spot, E∥, E⊥)
    let points: Vec<(f64, String, f64, f64)> = match &p.series {
        Some(spec) => {
            let s = data::load_series(spec)?;
            let spot = s.spot.as_ref().map_or_else(|| p.spot_id.clone(), |r| r.id.clone());
            s.records.iter().map(|r| (r.bias_v, spot.clone(), r.e_par, r.e_perp)).collect()
        }
        None => vec![(p.bias_v, p.spot_id.clone(), p.e_par, p.e_perp)],
    };
    let grid = linear_grid(p.f_start_mhz, p.f_stop_mhz, p.points);
    let header = Header::new(&run.prov);
    let mut entries = Vec::with_capacity(points.len());
    for (i, (bias, spot, e_par, e_perp)) in points.into_iter().enumerate() {
        let field = CrystalField::electric(e_par, e_perp).with_b_par(p.b_par);
        let ts = transition_frequencies(&sys, &field)?;
        let peaks = peaks_from_transitions(&ts, p.fwhm_mhz, p.amplitude);
        let mut s = synthesize_spectrum(&peaks, &grid, p.noise_sigma, common.seed.wrapping_add(i as u64))?;
        s.meta.bias_v = bias;
        s.meta.spot_id = spot;
        let name = format!("spectrum_{i:03}.csv");
        let path = run.write(&name, &write_spectrum(&s, &header))?;
        let side = sidecar_path(&path);
        let side_name = side.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        run.write(&side_name, &Sidecar::new(&s.meta, Some(&run.prov)).to_json())?;
        entries.push(PeakEntry {
            file: name,
            bias_v: bias,
            field,
            transitions: ts,
            peaks,
        });
    }
    let doc = Document {
        provenance: run.prov.clone(),
        data: entries,
    };
    run.write("peaks.json", &doc.to_json())?;
    Ok(())
}
