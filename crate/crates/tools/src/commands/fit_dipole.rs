//! `fit-dipole`: d∥ from a low-E⊥ series, or |d⊥/d∥| with `--fit-ratio`.
//!
//! Plain mode writes `dipole_fit.json` and `regression_line.csv`. Ratio mode
//! takes d∥ and D from `--calibration` (a `dipole_fit.json`), else from
//! `--d-par`/`--zfs-d`, else from the preset, and writes `ratio_fit.json`,
//! `chi2_scan.csv` and `model_curves.csv`; with a calibration file it also
//! writes `dipole_fit.json` carrying the fitted ratio.

use std::path::Path;

use serde::{Deserialize, Serialize};
use vsi_core::electrometry::{fit_dipole_parallel, fit_ratio_perp_with, DipoleFit, RatioScanOptions};

use crate::data;
use crate::error::CliError;
use crate::formats::table::{num, write_table};
use crate::formats::{read_text, Document, Header};
use crate::params::{Common, Run};

#[derive(Debug, Default, clap::Args, Serialize)]
pub struct Args {
    /// Bias series: bundled name (point1, point3) or CSV path.
    #[arg(long)]
    pub series: Option<String>,
    /// Fit |d⊥/d∥| instead of d∥.
    #[arg(long)]
    pub fit_ratio: bool,
    /// d∥/h for the ratio fit, MHz/(MV/cm).
    #[arg(long)]
    pub d_par: Option<f64>,
    /// Zero-field splitting D for the ratio fit, MHz.
    #[arg(long)]
    pub zfs_d: Option<f64>,
    /// `dipole_fit.json` from an earlier run supplying d∥ and D.
    #[arg(long)]
    pub calibration: Option<String>,
    /// Upper end of the ratio scan.
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub series: Option<String>,
    pub fit_ratio: bool,
    pub d_par: Option<f64>,
    pub zfs_d: Option<f64>,
    pub calibration: Option<String>,
    pub r_max: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            series: None,
            fit_ratio: false,
            d_par: None,
            zfs_d: None,
            calibration: None,
            r_max: RatioScanOptions::default().r_max,
        }
    }
}

pub fn load_calibration(path: &str) -> Result<DipoleFit, CliError> {
    let p = Path::new(path);
    let doc: Document<DipoleFit> = Document::from_json(&read_text(p)?).map_err(|e| e.in_file(p))?;
    Ok(doc.data)
}

pub fn run(run: &mut Run, common: &Common, p: &Params) -> Result<(), CliError> {
    let spec = p
        .series
        .as_deref()
        .ok_or_else(|| CliError::Config("--series is required".into()))?;
    let series = data::load_series(spec)?;
    let header = Header::new(&run.prov).with("series", spec);

    if !p.fit_ratio {
        let fit = fit_dipole_parallel(&series)?;
        let rows = series.records.iter().map(|r| {
            let line = fit.zfs_d.value * 2.0 + fit.d_par_over_h.value * 2.0 * r.e_par;
            vec![
                num(r.bias_v),
                num(r.e_par),
                num(r.f_mhz),
                r.f_sigma_mhz.map(num).unwrap_or_default(),
                num(line),
            ]
        });
        run.write(
            "regression_line.csv",
            &write_table(
                &header,
                &["bias_v", "e_par_mvcm", "f_mhz", "f_sigma_mhz", "f_line_mhz"],
                rows,
            ),
        )?;
        run.write("dipole_fit.json", &doc(run, &fit))?;
        say!(
            "d_par/h = {} ± {} MHz/(MV/cm), D = {} ± {} MHz",
            fit.d_par_over_h.value, fit.d_par_over_h.sigma, fit.zfs_d.value, fit.zfs_d.sigma
        );
        return Ok(());
    }

    let calibration = p.calibration.as_deref().map(load_calibration).transpose()?;
    let preset = common.spin_system(None, None, None)?;
    let d_par = p
        .d_par
        .or(calibration.as_ref().map(|c| c.d_par_over_h.value))
        .unwrap_or(preset.d_par_over_h);
    let zfs = p
        .zfs_d
        .or(calibration.as_ref().map(|c| c.zfs_d.value))
        .unwrap_or(preset.zfs_d);
    let opts = RatioScanOptions {
        r_max: p.r_max,
        ..RatioScanOptions::default()
    };
    let fit = fit_ratio_perp_with(&series, d_par, zfs, &opts)?;
    run.write(
        "chi2_scan.csv",
        &write_table(&header, &["ratio_r", "chi2"], fit.scan.iter().map(|(r, c)| vec![num(*r), num(*c)])),
    )?;
    let curve_rows = fit.curves.iter().flat_map(|c| {
        c.e_par
            .iter()
            .zip(&c.f_mhz)
            .map(move |(e, f)| vec![num(c.ratio_r), num(*e), num(*f)])
    });
    run.write(
        "model_curves.csv",
        &write_table(&header, &["ratio_r", "e_par_mvcm", "f_mhz"], curve_rows),
    )?;
    run.write("ratio_fit.json", &doc(run, &fit))?;
    if let Some(c) = calibration {
        run.write("dipole_fit.json", &doc(run, &c.with_ratio(fit.ratio)))?;
    }
    say!(
        "|d_perp/d_par| = {} ± {} (Δχ² = 1 interval [{}, {}])",
        fit.ratio.value, fit.ratio.sigma, fit.interval.0, fit.interval.1
    );
    Ok(())
}

fn doc<T: Serialize>(run: &Run, data: &T) -> String {
    Document {
        provenance: run.prov.clone(),
        data,
    }
    .to_json()
}
