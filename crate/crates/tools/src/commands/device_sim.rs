//! `device-sim`: 2D Poisson solve of a device model.
//!
//! Writes `field_map.csv`, one `cut_z_<depth>um.csv` per depth (field vs x),
//! one `cut_x_<x>um.csv` per lateral position (field vs depth) and
//! `device_sim.json` (solver diagnostics, lateral spread, resolved model).
//! A solve that does not converge still writes `residual_history.csv` and
//! the summary, then exits with code 4.

use serde::{Deserialize, Serialize};
use vsi_core::device::{
    fixture_wire, lateral_spread, line_cut_x, line_cut_z, solve_poisson_2d, DeviceError, DeviceModel2D, FieldMap, LineCut,
    SolveWarning,
    SHALLOW_DEPTH_UM, SPREAD_THRESHOLD_MV_PER_CM,
};

use crate::data;
use crate::error::CliError;
use crate::formats::fieldmap::{write_field_map, write_line_cut};
use crate::formats::table::{num, write_table};
use crate::formats::{Document, Header};
use crate::params::{Common, Run};

#[derive(Debug, Default, clap::Args, Serialize)]
pub struct Args {
    /// Device model: bundled name (uniform, termination, termination-wire) or JSON path.
    #[arg(long)]
    pub device: Option<String>,
    /// Reverse bias, V.
    #[arg(long)]
    pub bias_v: Option<f64>,
    /// Permittivity of the medium above the surface.
    #[arg(long)]
    pub eps_ext: Option<f64>,
    /// Add (or move) the grounded wire, gap in µm.
    #[arg(long)]
    pub wire_gap_um: Option<f64>,
    /// Remove any wire from the model.
    #[arg(long)]
    pub no_wire: bool,
    /// Depths of horizontal line cuts, µm.
    #[arg(long, value_delimiter = ',')]
    pub cut_depths_um: Vec<f64>,
    /// Lateral positions of vertical line cuts, µm.
    #[arg(long, value_delimiter = ',')]
    pub cut_xs_um: Vec<f64>,
    /// Newton iteration budget.
    #[arg(long)]
    pub max_newton: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub device: String,
    pub bias_v: f64,
    pub eps_ext: Option<f64>,
    pub wire_gap_um: Option<f64>,
    pub no_wire: bool,
    pub cut_depths_um: Vec<f64>,
    pub cut_xs_um: Vec<f64>,
    pub max_newton: Option<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            device: "termination".into(),
            bias_v: 750.0,
            eps_ext: None,
            wire_gap_um: None,
            no_wire: false,
            cut_depths_um: vec![SHALLOW_DEPTH_UM, 2.1],
            cut_xs_um: vec![50.0, 100.0],
            max_newton: None,
        }
    }
}

impl Params {
    /// Loads the named model and applies the overrides.
    pub fn model(&self) -> Result<DeviceModel2D, CliError> {
        let mut m = data::load_device(&self.device)?;
        if let Some(e) = self.eps_ext {
            m.eps_ext = e;
        }
        if let Some(g) = self.wire_gap_um {
            m.wire = Some(match m.wire {
                Some(w) => vsi_core::device::Wire { gap: g, ..w },
                None => fixture_wire(g),
            });
        }
        if self.no_wire {
            m.wire = None;
        }
        if let Some(n) = self.max_newton {
            m.solver.max_newton = n;
        }
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    bias_v: f64,
    converged: bool,
    newton_iters: usize,
    active_set_iters: usize,
    final_residual: Option<f64>,
    charge_balance_defect: f64,
    e_par_max_mvcm: f64,
    /// x beyond which E∥ at the shallow depth stays below threshold.
    lateral_spread_um: Option<f64>,
    spread_depth_um: f64,
    spread_threshold_mvcm: f64,
    warnings: &'a [SolveWarning],
    model: &'a DeviceModel2D,
}

/// Solves and writes the map; returns it for callers that sample it.
pub fn simulate(run: &mut Run, p: &Params) -> Result<FieldMap, CliError> {
    let m = p.model()?;
    let map = solve_poisson_2d(&m, p.bias_v)?;
    let header = Header::new(&run.prov).with("device", &p.device);
    let spread = if map.z.first().is_some_and(|&z| z <= SHALLOW_DEPTH_UM) {
        lateral_spread(&map, SHALLOW_DEPTH_UM, SPREAD_THRESHOLD_MV_PER_CM)?
    } else {
        None
    };
    let summary = Summary {
        bias_v: p.bias_v,
        converged: map.converged,
        newton_iters: map.newton_iters,
        active_set_iters: map.active_set_iters,
        final_residual: map.residual_history.last().copied(),
        charge_balance_defect: map.charge_balance_defect,
        e_par_max_mvcm: map.e_par_max(),
        lateral_spread_um: spread,
        spread_depth_um: SHALLOW_DEPTH_UM,
        spread_threshold_mvcm: SPREAD_THRESHOLD_MV_PER_CM,
        warnings: &map.warnings,
        model: &m,
    };
    run.write(
        "device_sim.json",
        &Document {
            provenance: run.prov.clone(),
            data: &summary,
        }
        .to_json(),
    )?;
    if !map.converged {
        run.write(
            "residual_history.csv",
            &write_table(
                &header,
                &["iteration", "residual"],
                map.residual_history
                    .iter()
                    .enumerate()
                    .map(|(i, r)| vec![i.to_string(), num(*r)]),
            ),
        )?;
        return Err(CliError::NotConverged(format!(
            "Newton stopped after {} iterations (residual {:e}); see residual_history.csv",
            map.newton_iters,
            map.residual_history.last().copied().unwrap_or(f64::NAN)
        )));
    }
    for w in &map.warnings {
        esay!("warning: {w:?}");
    }
    run.write("field_map.csv", &write_field_map(&map, header.clone()))?;
    for &z in &p.cut_depths_um {
        let Some(cut) = in_domain(line_cut_x(&map, z), "depth", z)? else { continue };
        run.write(&format!("cut_z_{}um.csv", num(z)), &write_line_cut(&cut, 'x', header.clone()))?;
    }
    for &x in &p.cut_xs_um {
        let Some(cut) = in_domain(line_cut_z(&map, x), "x", x)? else { continue };
        run.write(&format!("cut_x_{}um.csv", num(x)), &write_line_cut(&cut, 'z', header.clone()))?;
    }
    say!(
        "converged in {} Newton iterations; max E_par = {} MV/cm; lateral spread = {}",
        map.newton_iters,
        map.e_par_max(),
        spread.map_or("none".to_string(), |s| format!("{s} µm"))
    );
    Ok(map)
}

/// Cuts off the map are skipped with a warning; the defaults suit the
/// termination fixture and may miss smaller devices.
fn in_domain(cut: Result<LineCut, DeviceError>, axis: &str, at: f64) -> Result<Option<LineCut>, CliError> {
    match cut {
        Ok(c) => Ok(Some(c)),
        Err(DeviceError::OutsideDomain { .. }) => {
            esay!("warning: skipping cut at {axis} = {at} µm: outside the domain");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn run(run: &mut Run, _common: &Common, p: &Params) -> Result<(), CliError> {
    simulate(run, p).map(|_| ())
}
