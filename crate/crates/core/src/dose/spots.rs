use alloc::string::String;
use alloc::vec::Vec;
use alloc::format;

use serde::{Deserialize, Serialize};

use super::DoseError;

pub const DEFAULT_SPOT_DIAMETER_UM: f64 = 1.0;
pub const DEFAULT_PITCH_UM: f64 = 20.0;

/// One irradiated sensor spot in device coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotRef {
    pub id: String,
    /// Lateral position from the anode electrode edge, µm.
    pub x_um: f64,
    /// Depth of the profile peak, µm.
    pub z_um: f64,
    /// Ions delivered into the spot.
    pub fluence_per_spot: f64,
    pub spot_diameter_um: f64,
    pub pitch_um: f64,
}

impl SpotRef {
    pub fn at(id: impl Into<String>, x_um: f64, z_um: f64) -> Self {
        Self {
            id: id.into(),
            x_um,
            z_um,
            fluence_per_spot: 0.0,
            spot_diameter_um: DEFAULT_SPOT_DIAMETER_UM,
            pitch_um: DEFAULT_PITCH_UM,
        }
    }

    pub fn validate(&self) -> Result<(), DoseError> {
        if !(self.x_um.is_finite() && self.z_um.is_finite()) {
            return Err(DoseError::InvalidArgument("non-finite spot position"));
        }
        if self.z_um <= 0.0 {
            return Err(DoseError::InvalidArgument("spot depth must be positive"));
        }
        if !(self.spot_diameter_um > 0.0 && self.pitch_um > self.spot_diameter_um) {
            return Err(DoseError::InvalidArgument("pitch must exceed spot diameter"));
        }
        if !(self.fluence_per_spot >= 0.0) {
            return Err(DoseError::InvalidArgument("negative fluence"));
        }
        Ok(())
    }
}

/// Ion energy (MeV) to vacancy peak depth (µm), monotone piecewise-linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyDepthTable {
    points: Vec<(f64, f64)>,
}

impl Default for EnergyDepthTable {
    fn default() -> Self {
        Self {
            points: alloc::vec![(0.75, 2.1), (3.0, 8.1)],
        }
    }
}

impl EnergyDepthTable {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self, DoseError> {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.is_empty() {
            return Err(DoseError::InvalidArgument("empty energy table"));
        }
        if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite() && p.1 > 0.0)) {
            return Err(DoseError::InvalidArgument("invalid energy table entry"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0 || w[1].1 < w[0].1) {
            return Err(DoseError::InvalidArgument("energy table must be strictly increasing in energy and monotone in depth"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn depth_at(&self, energy_mev: f64) -> Result<f64, DoseError> {
        let (min, max) = (self.points[0].0, self.points[self.points.len() - 1].0);
        if !(energy_mev >= min && energy_mev <= max) {
            return Err(DoseError::Extrapolation { energy_mev, min, max });
        }
        for w in self.points.windows(2) {
            let ((e0, z0), (e1, z1)) = (w[0], w[1]);
            if energy_mev <= e1 {
                return Ok(z0 + (energy_mev - e0) / (e1 - e0) * (z1 - z0));
            }
        }
        Ok(self.points[self.points.len() - 1].1)
    }
}

/// `count` spots at `x0 + i·pitch`, all at the peak depth for `energy_mev`.
pub fn place_spot_grid(
    x0_um: f64,
    count: usize,
    pitch_um: f64,
    energy_mev: f64,
    table: &EnergyDepthTable,
) -> Result<Vec<SpotRef>, DoseError> {
    let z = table.depth_at(energy_mev)?;
    (0..count)
        .map(|i| {
            let spot = SpotRef {
                id: format!("s{i}"),
                x_um: x0_um + i as f64 * pitch_um,
                z_um: z,
                fluence_per_spot: 0.0,
                spot_diameter_um: DEFAULT_SPOT_DIAMETER_UM,
                pitch_um,
            };
            spot.validate().map(|_| spot)
        })
        .collect()
}
