use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{DeviceError, SIC_EPS_R};
use crate::constants::thermal_voltage;

/// Grid segment `[start, end]` meshed with cells no wider than `spacing`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridBand {
    pub start: f64,
    pub end: f64,
    pub spacing: f64,
}

impl GridBand {
    pub const fn new(start: f64, end: f64, spacing: f64) -> Self {
        Self { start, end, spacing }
    }
}

/// Node coordinates from contiguous bands.
pub fn axis_from_bands(bands: &[GridBand]) -> Result<Vec<f64>, DeviceError> {
    let first = bands.first().ok_or(DeviceError::InvalidModel("grid needs at least one band"))?;
    let mut nodes = alloc::vec![first.start];
    let mut prev_end = first.start;
    for b in bands {
        if !(b.spacing.is_finite() && b.spacing > 0.0) {
            return Err(DeviceError::InvalidModel("grid spacing must be positive"));
        }
        if !(b.end > b.start) {
            return Err(DeviceError::InvalidModel("grid band must have end > start"));
        }
        if (b.start - prev_end).abs() > 1e-9 {
            return Err(DeviceError::InvalidModel("grid bands must be contiguous"));
        }
        let n = ((b.end - b.start) / b.spacing - 1e-9).ceil().max(1.0) as usize;
        let h = (b.end - b.start) / n as f64;
        for k in 1..n {
            nodes.push(b.start + k as f64 * h);
        }
        nodes.push(b.end);
        prev_end = b.end;
    }
    Ok(nodes)
}

/// Rectangular dopant region; coordinates in µm, densities in cm⁻³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DopingBox {
    pub x0: f64,
    pub x1: f64,
    pub z0: f64,
    pub z1: f64,
    #[serde(default)]
    pub acceptor: f64,
    #[serde(default)]
    pub donor: f64,
}

impl DopingBox {
    fn contains(&self, x: f64, z: f64) -> bool {
        x >= self.x0 && x <= self.x1 && z >= self.z0 && z <= self.z1
    }
}

/// Grounded round conductor lying above the surface, infinitely long in y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wire {
    /// Lateral position of the axis, µm.
    pub x_center: f64,
    /// µm.
    pub radius: f64,
    /// Distance from the surface to the lowest point, µm.
    pub gap: f64,
    /// V.
    #[serde(default)]
    pub potential: f64,
}

impl Wire {
    pub fn contains(&self, x: f64, z: f64) -> bool {
        let zc = -(self.gap + self.radius);
        let (dx, dz) = (x - self.x_center, z - zc);
        dx * dx + dz * dz <= self.radius * self.radius * (1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub max_newton: usize,
    /// V.
    pub tolerance: f64,
    /// Per-node update clamp in units of kT/q.
    pub clamp_thermal_voltages: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_newton: 500,
            tolerance: 1e-8,
            clamp_thermal_voltages: 5.0,
        }
    }
}

fn default_eps_sc() -> f64 {
    SIC_EPS_R
}
fn default_miscut() -> f64 {
    4.0
}
fn default_temperature() -> f64 {
    300.0
}
fn default_intrinsic() -> f64 {
    8.2e-9
}

/// Cross-section of the edge-termination region. `x` runs laterally
/// (0 at the anode electrode edge), `z` is depth: the semiconductor fills
/// `z ≥ 0`, the external dielectric `z < 0`, and the cathode is the
/// bottom boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceModel2D {
    pub x_bands: Vec<GridBand>,
    pub z_bands: Vec<GridBand>,
    /// Uniform epilayer donor density, cm⁻³.
    pub donor_epi: f64,
    #[serde(default)]
    pub doping: Vec<DopingBox>,
    /// Lateral extent of the anode metal on the surface, µm.
    pub anode: (f64, f64),
    #[serde(default = "default_eps_sc")]
    pub eps_sc: f64,
    pub eps_ext: f64,
    #[serde(default)]
    pub wire: Option<Wire>,
    #[serde(default = "default_miscut")]
    pub miscut_deg: f64,
    #[serde(default = "default_temperature")]
    pub temperature_k: f64,
    #[serde(default = "default_intrinsic")]
    pub intrinsic_density: f64,
    #[serde(default)]
    pub solver: SolverOptions,
}

/// Node classification after meshing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NodeKind {
    Free,
    Anode,
    Cathode,
    Wire,
}

/// Meshed model: node coordinates, doping and fixed potentials.
#[derive(Debug, Clone)]
pub(crate) struct Mesh {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    /// Indexed `j * nx + i`.
    pub kind: Vec<NodeKind>,
    /// N_D − N_A at nodes, cm⁻³ (0 outside the semiconductor).
    pub net_doping: Vec<f64>,
    /// Index of the first semiconductor row.
    pub surface_row: usize,
}

impl Mesh {
    pub fn nx(&self) -> usize {
        self.x.len()
    }
    pub fn nz(&self) -> usize {
        self.z.len()
    }
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.x.len() + i
    }
}

impl DeviceModel2D {
    pub fn validate(&self) -> Result<(), DeviceError> {
        let x = axis_from_bands(&self.x_bands)?;
        let z = axis_from_bands(&self.z_bands)?;
        if !(z[z.len() - 1] > 0.0) {
            return Err(DeviceError::InvalidModel("domain must extend below the surface"));
        }
        if !z.iter().any(|&v| v.abs() < 1e-9) {
            return Err(DeviceError::InvalidModel("z grid must contain the surface z = 0"));
        }
        if !(self.donor_epi.is_finite() && self.donor_epi > 0.0) {
            return Err(DeviceError::InvalidModel("epilayer donor density must be positive"));
        }
        if !(self.eps_sc > 0.0 && self.eps_ext > 0.0) {
            return Err(DeviceError::InvalidModel("permittivities must be positive"));
        }
        let (a0, a1) = self.anode;
        if !(a1 > a0) {
            return Err(DeviceError::InvalidModel("anode segment must have positive length"));
        }
        if !x.iter().any(|&v| v >= a0 && v <= a1) {
            return Err(DeviceError::InvalidModel("anode segment contains no grid node"));
        }
        for b in &self.doping {
            if !(b.acceptor >= 0.0 && b.donor >= 0.0 && b.x1 >= b.x0 && b.z1 >= b.z0) {
                return Err(DeviceError::InvalidModel("invalid doping box"));
            }
        }
        if let Some(w) = &self.wire {
            if !(w.gap > 0.0 && w.radius > 0.0 && w.x_center.is_finite() && w.potential.is_finite()) {
                return Err(DeviceError::InvalidModel("wire must lie above the surface with positive radius"));
            }
        }
        if !(self.temperature_k > 0.0 && self.intrinsic_density > 0.0) {
            return Err(DeviceError::InvalidModel("temperature and intrinsic density must be positive"));
        }
        if !(self.miscut_deg.abs() < 15.0) {
            return Err(DeviceError::InvalidModel("miscut must be below 15°"));
        }
        if !(self.solver.tolerance > 0.0 && self.solver.clamp_thermal_voltages > 0.0 && self.solver.max_newton > 0) {
            return Err(DeviceError::InvalidModel("invalid solver options"));
        }
        Ok(())
    }

    pub fn thermal_voltage(&self) -> f64 {
        thermal_voltage(self.temperature_k)
    }

    /// N_D − N_A at a semiconductor point, cm⁻³.
    pub fn net_doping_at(&self, x: f64, z: f64) -> f64 {
        let mut net = self.donor_epi;
        for b in &self.doping {
            if b.contains(x, z) {
                net += b.donor - b.acceptor;
            }
        }
        net
    }

    /// Neutral-region potential for net doping `net`, relative to the
    /// applied quasi-Fermi level.
    pub fn neutral_offset(&self, net: f64) -> f64 {
        self.thermal_voltage() * (net / (2.0 * self.intrinsic_density)).asinh()
    }

    /// Largest acceptor density anywhere on the anode contact, cm⁻³.
    pub fn anode_doping(&self) -> f64 {
        let x = axis_from_bands(&self.x_bands).unwrap_or_default();
        x.iter()
            .filter(|&&v| v >= self.anode.0 && v <= self.anode.1)
            .map(|&v| self.net_doping_at(v, 0.0))
            .fold(f64::INFINITY, f64::min)
    }

    /// Built-in potential between the anode contact and the epilayer, V.
    pub fn builtin_potential(&self) -> f64 {
        self.neutral_offset(self.donor_epi) - self.neutral_offset(self.anode_doping())
    }

    pub fn epi_thickness(&self) -> f64 {
        self.z_bands.last().map_or(0.0, |b| b.end)
    }

    pub(crate) fn mesh(&self) -> Result<Mesh, DeviceError> {
        self.validate()?;
        let x = axis_from_bands(&self.x_bands)?;
        let mut z = axis_from_bands(&self.z_bands)?;
        let surface_row = z.iter().position(|v| v.abs() < 1e-9).unwrap_or(0);
        z[surface_row] = 0.0;
        let (nx, nz) = (x.len(), z.len());
        let mut kind = alloc::vec![NodeKind::Free; nx * nz];
        let mut net_doping = alloc::vec![0.0; nx * nz];
        for j in 0..nz {
            for i in 0..nx {
                let k = j * nx + i;
                if j >= surface_row {
                    net_doping[k] = self.net_doping_at(x[i], z[j]);
                }
                if j == nz - 1 {
                    kind[k] = NodeKind::Cathode;
                } else if j == surface_row && x[i] >= self.anode.0 && x[i] <= self.anode.1 {
                    kind[k] = NodeKind::Anode;
                } else if j < surface_row && self.wire.is_some_and(|w| w.contains(x[i], z[j])) {
                    kind[k] = NodeKind::Wire;
                }
            }
        }
        Ok(Mesh {
            x,
            z,
            kind,
            net_doping,
            surface_row,
        })
    }

    /// Laterally uniform p⁺/n diode: anode across the full width, no
    /// dielectric. Vertical spacing `dz` in the drift layer.
    pub fn uniform_fixture(dz: f64) -> Self {
        Self {
            x_bands: alloc::vec![GridBand::new(0.0, 4.0, 1.0)],
            z_bands: alloc::vec![GridBand::new(0.0, 0.2, dz.min(0.05)), GridBand::new(0.2, 12.2, dz)],
            donor_epi: 1e16,
            doping: alloc::vec![DopingBox {
                x0: -1e9,
                x1: 1e9,
                z0: 0.0,
                z1: 0.2,
                acceptor: 1e19,
                donor: 0.0,
            }],
            anode: (-1e9, 1e9),
            eps_sc: SIC_EPS_R,
            eps_ext: 1.0,
            wire: None,
            miscut_deg: 0.0,
            temperature_k: 300.0,
            intrinsic_density: default_intrinsic(),
            solver: SolverOptions::default(),
        }
    }

    /// Edge termination: p⁺ anode under the electrode, a 60 µm
    /// JTE-like acceptor zone beyond it, 12 µm n-epilayer on a cathode
    /// plane, and a dielectric half-space above the surface.
    pub fn termination_fixture(eps_ext: f64, wire: Option<Wire>) -> Self {
        Self {
            x_bands: alloc::vec![
                GridBand::new(-20.0, -2.0, 1.0),
                GridBand::new(-2.0, 8.0, 0.25),
                GridBand::new(8.0, 180.0, 1.0),
            ],
            z_bands: alloc::vec![
                GridBand::new(-60.0, -12.0, 2.0),
                GridBand::new(-12.0, -1.0, 0.5),
                GridBand::new(-1.0, 0.0, 0.1),
                GridBand::new(0.0, 1.5, 0.1),
                GridBand::new(1.5, 12.0, 0.25),
            ],
            donor_epi: 1e16,
            doping: alloc::vec![
                DopingBox {
                    x0: -1e9,
                    x1: 5.0,
                    z0: 0.0,
                    z1: 0.4,
                    acceptor: 1e19,
                    donor: 0.0,
                },
                DopingBox {
                    x0: 5.0,
                    x1: 65.0,
                    z0: 0.0,
                    z1: 0.6,
                    acceptor: 1.5e17,
                    donor: 0.0,
                },
            ],
            anode: (-1e9, 0.0),
            eps_sc: SIC_EPS_R,
            eps_ext,
            wire,
            miscut_deg: 4.0,
            temperature_k: 300.0,
            intrinsic_density: default_intrinsic(),
            solver: SolverOptions::default(),
        }
    }
}

/// Wire used by the termination fixtures: 100 µm diameter, axis at x = 90 µm.
pub fn fixture_wire(gap: f64) -> Wire {
    Wire {
        x_center: 90.0,
        radius: 50.0,
        gap,
        potential: 0.0,
    }
}
