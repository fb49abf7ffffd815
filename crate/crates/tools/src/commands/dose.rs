//! `dose`: depth profile + fluence → V_Si density; spot grid placement.
//!
//! The profile is `--profile` (canonical CSV or a SRIM vacancy table) or, by
//! default, a Gaussian centred at the table depth for `--energy-mev` whose
//! area/peak equals `--effective-thickness-um`. Writes `depth_profile.csv`,
//! `density_profile.csv`, `dose.json` (stats, peak density, guard verdict)
//! and `spots.json`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use vsi_core::dose::{
    density_profile, fluence_from_ions_per_spot, place_spot_grid, profile_stats, DepthProfile, EnergyDepthTable,
    ProfileStats, SpotRef,
};
use vsi_core::electrometry::{density_guard, DensityVerdict};

use crate::error::CliError;
use crate::formats::depth::{parse_depth_profile, write_depth_csv};
use crate::formats::table::{num, write_table};
use crate::formats::{read_text, Document, Header};
use crate::params::{Common, Run};

#[derive(Debug, Default, clap::Args, Serialize)]
pub struct Args {
    /// Depth profile file (CSV or SRIM table).
    #[arg(long)]
    pub profile: Option<String>,
    /// Ion energy, MeV; sets the spot depth.
    #[arg(long)]
    pub energy_mev: Option<f64>,
    /// Area/peak of the built-in Gaussian profile, µm.
    #[arg(long)]
    pub effective_thickness_um: Option<f64>,
    /// Ions delivered per spot.
    #[arg(long)]
    pub ions_per_spot: Option<f64>,
    /// Areal fluence, cm⁻² (overrides --ions-per-spot).
    #[arg(long)]
    pub fluence_cm2: Option<f64>,
    /// V_Si created per vacancy of the profile.
    #[arg(long)]
    pub generation_rate: Option<f64>,
    #[arg(long)]
    pub ion_species: Option<String>,
    #[arg(long)]
    pub spot_diameter_um: Option<f64>,
    #[arg(long)]
    pub x0_um: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub pitch_um: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub profile: Option<String>,
    pub energy_mev: f64,
    pub effective_thickness_um: f64,
    pub ions_per_spot: f64,
    pub fluence_cm2: Option<f64>,
    pub generation_rate: f64,
    pub ion_species: String,
    pub spot_diameter_um: f64,
    pub x0_um: f64,
    pub count: usize,
    pub pitch_um: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            profile: None,
            energy_mev: 0.75,
            effective_thickness_um: 0.8,
            ions_per_spot: 5e3,
            fluence_cm2: None,
            generation_rate: 0.8,
            ion_species: "He".into(),
            spot_diameter_um: 1.0,
            x0_um: 10.0,
            count: 5,
            pitch_um: 20.0,
        }
    }
}

/// Spot grid with the irradiation settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotGrid {
    pub ion_species: String,
    pub energy_mev: f64,
    pub depth_um: f64,
    pub ions_per_spot: f64,
    pub fluence_cm2: f64,
    pub generation_rate: f64,
    pub peak_density_cm3: f64,
    pub spots: Vec<SpotRef>,
}

#[derive(Debug, Serialize)]
struct DoseSummary {
    stats: ProfileStats,
    effective_thickness_um: f64,
    fluence_cm2: f64,
    generation_rate: f64,
    peak_density_cm3: f64,
    verdict: DensityVerdict,
}

/// Unit-area Gaussian at `peak` with area/peak = `t_eff`.
pub fn gaussian_profile(peak: f64, t_eff: f64) -> Result<DepthProfile, CliError> {
    if !(t_eff.is_finite() && t_eff > 0.0) {
        return Err(CliError::Config("effective thickness must be positive".into()));
    }
    let sigma = t_eff / (2.0 * std::f64::consts::PI).sqrt();
    let z_max = peak + 6.0 * sigma;
    let n = 601;
    let depth: Vec<f64> = (0..n).map(|i| z_max * i as f64 / (n - 1) as f64).collect();
    let vac = depth
        .iter()
        .map(|z| (-0.5 * ((z - peak) / sigma).powi(2)).exp() / t_eff)
        .collect();
    Ok(DepthProfile::new(depth, vac)?)
}

pub fn run(run: &mut Run, _common: &Common, p: &Params) -> Result<(), CliError> {
    let table = EnergyDepthTable::default();
    let depth = table.depth_at(p.energy_mev)?;
    let mut profile = match &p.profile {
        Some(path) => {
            let pth = Path::new(path);
            parse_depth_profile(&read_text(pth)?).map_err(|e| e.in_file(pth))?.1
        }
        None => gaussian_profile(depth, p.effective_thickness_um)?,
    };
    if profile.ion_species.is_empty() {
        profile.ion_species = p.ion_species.clone();
    }
    if profile.ion_energy_mev.is_none() {
        profile.ion_energy_mev = Some(p.energy_mev);
    }
    let stats = profile_stats(&profile)?;
    let fluence = p
        .fluence_cm2
        .unwrap_or_else(|| fluence_from_ions_per_spot(p.ions_per_spot, p.spot_diameter_um));
    let density = density_profile(&profile, fluence, p.generation_rate)?;
    let verdict = density_guard(density.peak_density_cm3);

    let header = Header::new(&run.prov);
    run.write("depth_profile.csv", &write_depth_csv(&profile, header.clone()))?;
    run.write(
        "density_profile.csv",
        &write_table(
            &header,
            &["depth_um", "density_cm3"],
            density
                .depth_um
                .iter()
                .zip(&density.density_cm3)
                .map(|(z, d)| vec![num(*z), num(*d)]),
        ),
    )?;
    let summary = DoseSummary {
        stats,
        effective_thickness_um: profile.effective_thickness()?,
        fluence_cm2: fluence,
        generation_rate: p.generation_rate,
        peak_density_cm3: density.peak_density_cm3,
        verdict,
    };
    run.write(
        "dose.json",
        &Document {
            provenance: run.prov.clone(),
            data: &summary,
        }
        .to_json(),
    )?;

    let side_cm = p.spot_diameter_um * 1e-4;
    let ions = p.fluence_cm2.map_or(p.ions_per_spot, |f| f * side_cm * side_cm);
    let mut spots = place_spot_grid(p.x0_um, p.count, p.pitch_um, p.energy_mev, &table)?;
    for s in &mut spots {
        s.spot_diameter_um = p.spot_diameter_um;
        s.fluence_per_spot = ions;
        s.validate()?;
    }
    let grid = SpotGrid {
        ion_species: profile.ion_species.clone(),
        energy_mev: p.energy_mev,
        depth_um: depth,
        ions_per_spot: ions,
        fluence_cm2: fluence,
        generation_rate: p.generation_rate,
        peak_density_cm3: density.peak_density_cm3,
        spots,
    };
    run.write(
        "spots.json",
        &Document {
            provenance: run.prov.clone(),
            data: &grid,
        }
        .to_json(),
    )?;
    say!(
        "peak V_Si density {:e} cm^-3 ({verdict:?}); peak depth {} µm, FWHM {} µm",
        density.peak_density_cm3, stats.peak_depth_um, stats.fwhm_um
    );
    if verdict != DensityVerdict::Ok {
        esay!("warning: density {:e} cm^-3 is outside the linear-response range", density.peak_density_cm3);
    }
    Ok(())
}
