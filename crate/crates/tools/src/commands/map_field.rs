//! `map-field`: field at sensor spots.
//!
//! Map mode samples a field map at spots and writes `spot_fields.csv`. The
//! map is `--map` (a `field_map.csv`) or, failing that, a fresh solve of
//! `--device` at `--bias-v`. Spots come from `--spots` (a `spots.json` from
//! `dose`) or from the grid `--xs-um` × `--depths-um`. A spot outside the
//! map gets an error row; the command still succeeds.
//!
//! Inversion mode (`--resonances`) instead converts fitted resonances to
//! fields, as `invert` does, and writes `field_estimates.csv`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use vsi_core::device::field_at_spots;
use vsi_core::dose::SpotRef;

use super::device_sim;
use super::dose::SpotGrid;
use super::invert::{invert_rows, load_resonances, report, system_for};
use crate::error::CliError;
use crate::formats::fieldmap::read_field_map;
use crate::formats::records::{write_estimates, write_spot_fields, SpotFieldRow};
use crate::formats::{num, read_text, Document, Header};
use crate::params::{Common, Run};

#[derive(Debug, Default, clap::Args, Serialize)]
pub struct Args {
    /// `field_map.csv` to sample.
    #[arg(long)]
    pub map: Option<String>,
    /// Device model to solve when no map is given.
    #[arg(long)]
    pub device: Option<String>,
    #[arg(long)]
    pub bias_v: Option<f64>,
    /// `spots.json` from the dose command.
    #[arg(long)]
    pub spots: Option<String>,
    /// Spot depths, µm.
    #[arg(long, value_delimiter = ',')]
    pub depths_um: Vec<f64>,
    /// Spot lateral positions, µm.
    #[arg(long, value_delimiter = ',')]
    pub xs_um: Vec<f64>,
    /// Inversion mode: `resonances.csv` from fit-spectrum.
    #[arg(long)]
    pub resonances: Option<String>,
    /// E⊥/E∥ assumed in inversion mode.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Calibration for inversion mode.
    #[arg(long)]
    pub calibration: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub map: Option<String>,
    pub device: String,
    pub bias_v: f64,
    pub spots: Option<String>,
    pub depths_um: Vec<f64>,
    pub xs_um: Vec<f64>,
    pub resonances: Option<String>,
    pub ratio: f64,
    pub calibration: Option<String>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            map: None,
            device: "termination".into(),
            bias_v: 750.0,
            spots: None,
            depths_um: vec![2.1, 3.7, 5.0, 6.5, 8.1],
            xs_um: vec![10.0, 30.0, 50.0, 70.0, 90.0],
            resonances: None,
            ratio: 0.0,
            calibration: None,
        }
    }
}

fn spots(p: &Params) -> Result<Vec<SpotRef>, CliError> {
    if let Some(path) = &p.spots {
        let pth = Path::new(path);
        let doc: Document<SpotGrid> = Document::from_json(&read_text(pth)?).map_err(|e| e.in_file(pth))?;
        return Ok(doc.data.spots);
    }
    let mut out = Vec::with_capacity(p.xs_um.len() * p.depths_um.len());
    for &z in &p.depths_um {
        for &x in &p.xs_um {
            out.push(SpotRef::at(format!("s{}", out.len()), x, z));
        }
    }
    Ok(out)
}

pub fn run(run: &mut Run, common: &Common, p: &Params) -> Result<(), CliError> {
    if let Some(path) = &p.resonances {
        let sys = system_for(common, p.calibration.as_deref(), None, None, None)?;
        let est = invert_rows(&sys, &load_resonances(path)?, p.ratio);
        run.write("field_estimates.csv", &write_estimates(&est, &Header::new(&run.prov)))?;
        return report(&est);
    }

    let spots = spots(p)?;
    if spots.is_empty() {
        return Err(CliError::Config("no spots to sample".into()));
    }
    let map = match &p.map {
        Some(path) => {
            let pth = Path::new(path);
            read_field_map(&read_text(pth)?).map_err(|e| e.in_file(pth))?.1
        }
        None => device_sim::simulate(
            run,
            &device_sim::Params {
                device: p.device.clone(),
                bias_v: p.bias_v,
                ..device_sim::Params::default()
            },
        )?,
    };
    let rows: Vec<SpotFieldRow> = spots
        .iter()
        .zip(field_at_spots(&map, &spots))
        .map(|(s, f)| SpotFieldRow {
            spot_id: s.id.clone(),
            x_um: s.x_um,
            z_um: s.z_um,
            field: f.map_err(|e| e.to_string()),
        })
        .collect();
    let header = Header::new(&run.prov).with("bias_v", num(map.bias_v));
    run.write("spot_fields.csv", &write_spot_fields(&rows, &header))?;
    for r in rows.iter().filter(|r| r.field.is_err()) {
        esay!("warning: spot {}: {}", r.spot_id, r.field.as_ref().unwrap_err());
    }
    Ok(())
}
