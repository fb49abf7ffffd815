use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::model::{Mesh, NodeKind};
use super::{depletion_1d, rotate_to_crystal, DeviceError, DeviceModel2D, Junction1D};
use crate::constants::{Q_OVER_EPS0_V_UM2, V_PER_UM_TO_MV_PER_CM};
use crate::linalg::BandedSpd;

const MAX_EXPONENT: f64 = 100.0;
const MAX_ACTIVE_SET_ITERS: usize = 80;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveWarning {
    /// Fewer than three nodes span the estimated depletion width.
    CoarseGrid { nodes_across_depletion: usize },
}

/// Potential and field on the mesh, indexed `j * nx + i` (`x` fastest).
/// `e_z` is along the outward surface normal, i.e. opposite to depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMap {
    pub x: Vec<f64>,
    /// Depth, µm; negative above the surface.
    pub z: Vec<f64>,
    pub phi: Vec<f64>,
    pub e_x: Vec<f64>,
    pub e_z: Vec<f64>,
    pub e_par: Vec<f64>,
    /// |E⊥|.
    pub e_perp: Vec<f64>,
    pub bias_v: f64,
    pub miscut_deg: f64,
    pub converged: bool,
    pub newton_iters: usize,
    pub active_set_iters: usize,
    /// max |F| per Newton iteration.
    pub residual_history: Vec<f64>,
    /// max |F| over max control-volume flux at the final iterate.
    pub charge_balance_defect: f64,
    pub warnings: Vec<SolveWarning>,
}

impl FieldMap {
    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn nz(&self) -> usize {
        self.z.len()
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.x.len() + i
    }

    /// Largest E∥ in the semiconductor, MV/cm.
    pub fn e_par_max(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for (j, &z) in self.z.iter().enumerate() {
            if z >= 0.0 {
                for i in 0..self.nx() {
                    m = m.max(self.e_par[self.idx(i, j)]);
                }
            }
        }
        m
    }
}

/// Finite-volume discretization: edge couplings, semiconductor node areas,
/// fixed potentials, and the solver ordering.
struct System {
    nx: usize,
    nz: usize,
    /// Coupling between (i, j) and (i+1, j), indexed `j * nx + i`.
    wx: Vec<f64>,
    /// Coupling between (i, j) and (i, j+1), indexed `j * nx + i`.
    wz: Vec<f64>,
    /// q/ε₀ × semiconductor area of each control volume.
    charge_weight: Vec<f64>,
    net: Vec<f64>,
    fixed: Vec<Option<f64>>,
    x_fastest: bool,
}

impl System {
    fn n(&self) -> usize {
        self.nx * self.nz
    }

    fn bandwidth(&self) -> usize {
        if self.x_fastest {
            self.nx
        } else {
            self.nz
        }
    }

    fn order(&self, k: usize) -> usize {
        if self.x_fastest {
            k
        } else {
            let (i, j) = (k % self.nx, k / self.nx);
            i * self.nz + j
        }
    }

    fn neighbors(&self, k: usize, mut f: impl FnMut(usize, f64)) {
        let (i, j) = (k % self.nx, k / self.nx);
        if i > 0 {
            f(k - 1, self.wx[k - 1]);
        }
        if i + 1 < self.nx {
            f(k + 1, self.wx[k]);
        }
        if j > 0 {
            f(k - self.nx, self.wz[k - self.nx]);
        }
        if j + 1 < self.nz {
            f(k + self.nx, self.wz[k]);
        }
    }

    /// Σ w (φ_k − φ_nb): outward flux of ε∇φ through the control volume.
    fn stiffness_apply(&self, phi: &[f64], k: usize) -> f64 {
        let mut acc = 0.0;
        self.neighbors(k, |nb, w| acc += w * (phi[k] - phi[nb]));
        acc
    }

    /// Solves (K + diag(d)) u = rhs with `mask[k] = true` rows fixed to rhs.
    fn solve(&self, diag: &[f64], rhs: &[f64], mask: &[bool]) -> Result<Vec<f64>, DeviceError> {
        let n = self.n();
        let mut a = BandedSpd::zeros(n, self.bandwidth());
        let mut b = vec![0.0; n];
        for k in 0..n {
            let sk = self.order(k);
            if mask[k] {
                a.add(sk, sk, 1.0);
                b[sk] = rhs[k];
                continue;
            }
            let mut r = rhs[k];
            let mut d = diag[k];
            self.neighbors(k, |nb, w| {
                d += w;
                if mask[nb] {
                    r += w * rhs[nb];
                } else if nb < k {
                    a.add(sk, self.order(nb), -w);
                }
            });
            a.add(sk, sk, d);
            b[sk] = r;
        }
        let chol = a.factor().map_err(|e| DeviceError::SingularSystem { row: e.row })?;
        chol.solve_in_place(&mut b);
        Ok((0..n).map(|k| b[self.order(k)]).collect())
    }
}

fn discretize(m: &DeviceModel2D, mesh: &Mesh, bias_v: f64) -> System {
    let (nx, nz) = (mesh.nx(), mesh.nz());
    let mut wx = vec![0.0; nx * nz];
    let mut wz = vec![0.0; nx * nz];
    let mut charge_weight = vec![0.0; nx * nz];
    for j in 0..nz - 1 {
        let hz = mesh.z[j + 1] - mesh.z[j];
        let semi = j >= mesh.surface_row;
        let eps = if semi { m.eps_sc } else { m.eps_ext };
        for i in 0..nx - 1 {
            let hx = mesh.x[i + 1] - mesh.x[i];
            let k = mesh.idx(i, j);
            let cx = eps * 0.5 * hz / hx;
            let cz = eps * 0.5 * hx / hz;
            wx[k] += cx;
            wx[k + nx] += cx;
            wz[k] += cz;
            wz[k + 1] += cz;
            if semi {
                let q = Q_OVER_EPS0_V_UM2 * 0.25 * hx * hz;
                for kk in [k, k + 1, k + nx, k + nx + 1] {
                    charge_weight[kk] += q;
                }
            }
        }
    }
    let wire_phi = m.wire.map_or(0.0, |w| w.potential) + m.neutral_offset(m.anode_doping());
    let fixed = mesh
        .kind
        .iter()
        .zip(&mesh.net_doping)
        .map(|(kind, &net)| match kind {
            NodeKind::Free => None,
            NodeKind::Anode => Some(m.neutral_offset(net)),
            NodeKind::Cathode => Some(bias_v + m.neutral_offset(net)),
            NodeKind::Wire => Some(wire_phi),
        })
        .collect();
    System {
        nx,
        nz,
        wx,
        wz,
        charge_weight,
        net: mesh.net_doping.clone(),
        fixed,
        x_fastest: nx <= nz,
    }
}

/// Zero-temperature limit: mobile carriers vanish except where they pin
/// the potential to the neutral level. Solved as a box-constrained
/// quadratic problem with a primal-dual active-set iteration.
fn depletion_guess(m: &DeviceModel2D, s: &System, bias_v: f64) -> Result<(Vec<f64>, usize), DeviceError> {
    let n = s.n();
    let upper: Vec<f64> = (0..n)
        .map(|k| {
            if s.charge_weight[k] > 0.0 && s.net[k] > 0.0 {
                bias_v + m.neutral_offset(s.net[k])
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let lower: Vec<f64> = (0..n)
        .map(|k| {
            if s.charge_weight[k] > 0.0 && s.net[k] < 0.0 {
                m.neutral_offset(s.net[k])
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let fixed_charge: Vec<f64> = (0..n).map(|k| s.charge_weight[k] * s.net[k]).collect();
    let zeros = vec![0.0; n];
    let mut active: Vec<Option<f64>> = vec![None; n];
    let mut phi = vec![0.0; n];
    let mut iters = 0;
    for it in 0..MAX_ACTIVE_SET_ITERS {
        iters = it + 1;
        let mut mask = vec![false; n];
        let mut rhs = fixed_charge.clone();
        for k in 0..n {
            if let Some(v) = s.fixed[k].or(active[k]) {
                mask[k] = true;
                rhs[k] = v;
            }
        }
        phi = s.solve(&zeros, &rhs, &mask)?;
        let mut changed = false;
        for k in 0..n {
            if s.fixed[k].is_some() {
                continue;
            }
            let mut c = 0.0;
            s.neighbors(k, |_, w| c += w);
            let mu = if active[k].is_some() {
                s.stiffness_apply(&phi, k) - fixed_charge[k]
            } else {
                0.0
            };
            let next = if upper[k].is_finite() && -mu + c * (phi[k] - upper[k]) > 0.0 {
                Some(upper[k])
            } else if lower[k].is_finite() && mu + c * (lower[k] - phi[k]) > 0.0 {
                Some(lower[k])
            } else {
                None
            };
            if next != active[k] {
                changed = true;
                active[k] = next;
            }
        }
        if !changed {
            break;
        }
    }
    Ok((phi, iters))
}

pub fn solve_poisson_2d(m: &DeviceModel2D, bias_v: f64) -> Result<FieldMap, DeviceError> {
    if !(bias_v.is_finite() && bias_v >= 0.0) {
        return Err(DeviceError::InvalidBias(bias_v));
    }
    let mesh = m.mesh()?;
    let s = discretize(m, &mesh, bias_v);
    let n = s.n();
    let vt = m.thermal_voltage();
    let ni = m.intrinsic_density;
    let clamp = m.solver.clamp_thermal_voltages * vt;
    let (mut phi, active_set_iters) = depletion_guess(m, &s, bias_v)?;

    let mask: Vec<bool> = s.fixed.iter().map(Option::is_some).collect();
    let residual = |phi: &[f64], out: &mut [f64], diag: &mut [f64]| {
        let mut max_f: f64 = 0.0;
        let mut max_flux: f64 = 0.0;
        for k in 0..n {
            if mask[k] {
                out[k] = 0.0;
                diag[k] = 0.0;
                continue;
            }
            let mut flux = 0.0;
            let mut flux_abs = 0.0;
            s.neighbors(k, |nb, w| {
                let t = w * (phi[nb] - phi[k]);
                flux += t;
                flux_abs += t.abs();
            });
            let cw = s.charge_weight[k];
            let (mut charge, mut d) = (0.0, 0.0);
            if cw > 0.0 {
                let e_n = ((phi[k] - bias_v) / vt).min(MAX_EXPONENT).exp() * ni;
                let h_p = (-phi[k] / vt).min(MAX_EXPONENT).exp() * ni;
                charge = cw * (s.net[k] + h_p - e_n);
                d = cw * (e_n + h_p) / vt;
            }
            out[k] = flux + charge;
            diag[k] = d;
            max_f = max_f.max(out[k].abs());
            max_flux = max_flux.max(flux_abs + charge.abs());
        }
        (max_f, max_flux)
    };

    let mut f = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut history = Vec::new();
    let mut converged = false;
    let mut newton_iters = 0;
    for it in 0..m.solver.max_newton {
        newton_iters = it + 1;
        let (max_f, _) = residual(&phi, &mut f, &mut diag);
        history.push(max_f);
        if !max_f.is_finite() {
            break;
        }
        let delta = s.solve(&diag, &f, &mask)?;
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            if !mask[k] {
                max_step = max_step.max(delta[k].abs());
                phi[k] += delta[k].clamp(-clamp, clamp);
            }
        }
        if max_step < m.solver.tolerance {
            converged = true;
            break;
        }
    }
    let (max_f, max_flux) = residual(&phi, &mut f, &mut diag);
    let charge_balance_defect = if max_flux > 0.0 { max_f / max_flux } else { 0.0 };

    let mut warnings = Vec::new();
    let mut junction = Junction1D::new(m.donor_epi, m.epi_thickness());
    junction.eps_r = m.eps_sc;
    junction.builtin_v = m.builtin_potential();
    if let Ok(d) = depletion_1d(&junction, bias_v) {
        let count = mesh.z.iter().filter(|&&z| z > 0.0 && z <= d.width).count();
        if count < 3 {
            warnings.push(SolveWarning::CoarseGrid {
                nodes_across_depletion: count,
            });
        }
    }

    Ok(field_map(m, &mesh, phi, bias_v, FieldMapStatus {
        converged,
        newton_iters,
        active_set_iters,
        residual_history: history,
        charge_balance_defect,
        warnings,
    }))
}

struct FieldMapStatus {
    converged: bool,
    newton_iters: usize,
    active_set_iters: usize,
    residual_history: Vec<f64>,
    charge_balance_defect: f64,
    warnings: Vec<SolveWarning>,
}

fn derivative(coord: &[f64], vals: impl Fn(usize) -> f64, i: usize) -> f64 {
    let n = coord.len();
    if n < 2 {
        return 0.0;
    }
    let (a, b) = if i == 0 {
        (0, 1)
    } else if i == n - 1 {
        (n - 2, n - 1)
    } else {
        (i - 1, i + 1)
    };
    (vals(b) - vals(a)) / (coord[b] - coord[a])
}

fn field_map(m: &DeviceModel2D, mesh: &Mesh, phi: Vec<f64>, bias_v: f64, st: FieldMapStatus) -> FieldMap {
    let (nx, nz) = (mesh.nx(), mesh.nz());
    let mut e_x = vec![0.0; nx * nz];
    let mut e_z = vec![0.0; nx * nz];
    let mut e_par = vec![0.0; nx * nz];
    let mut e_perp = vec![0.0; nx * nz];
    for j in 0..nz {
        for i in 0..nx {
            let k = j * nx + i;
            let ex = -derivative(&mesh.x, |ii| phi[j * nx + ii], i);
            // The surface row borders two materials; take the semiconductor side.
            let ez = if j == mesh.surface_row && j + 1 < nz {
                (phi[k + nx] - phi[k]) / (mesh.z[j + 1] - mesh.z[j])
            } else {
                derivative(&mesh.z, |jj| phi[jj * nx + i], j)
            };
            let ex = ex * V_PER_UM_TO_MV_PER_CM;
            let ez = ez * V_PER_UM_TO_MV_PER_CM;
            let (p, px, py) = rotate_to_crystal([ex, 0.0, ez], m.miscut_deg);
            e_x[k] = ex;
            e_z[k] = ez;
            e_par[k] = p;
            e_perp[k] = (px * px + py * py).sqrt();
        }
    }
    FieldMap {
        x: mesh.x.clone(),
        z: mesh.z.clone(),
        phi,
        e_x,
        e_z,
        e_par,
        e_perp,
        bias_v,
        miscut_deg: m.miscut_deg,
        converged: st.converged,
        newton_iters: st.newton_iters,
        active_set_iters: st.active_set_iters,
        residual_history: st.residual_history,
        charge_balance_defect: st.charge_balance_defect,
        warnings: st.warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_without_junction_is_flat() {
        let mut m = DeviceModel2D::uniform_fixture(0.2);
        m.doping.clear();
        let map = solve_poisson_2d(&m, 0.0).unwrap();
        assert!(map.converged);
        let emax = map.e_x.iter().chain(&map.e_z).fold(0.0f64, |a, e| a.max(e.abs()));
        assert!(emax < 0.01, "{emax}");
    }

    #[test]
    fn newton_budget_exhaustion_is_reported() {
        let mut m = DeviceModel2D::uniform_fixture(0.2);
        m.solver.max_newton = 1;
        let map = solve_poisson_2d(&m, 1000.0).unwrap();
        assert!(!map.converged);
        assert_eq!(map.residual_history.len(), 1);
    }

    #[test]
    fn coarse_grid_warning() {
        let mut m = DeviceModel2D::uniform_fixture(0.2);
        m.z_bands = alloc::vec![
            super::super::GridBand::new(0.0, 0.2, 0.2),
            super::super::GridBand::new(0.2, 12.2, 6.0),
        ];
        let map = solve_poisson_2d(&m, 0.0).unwrap();
        assert!(matches!(map.warnings[..], [SolveWarning::CoarseGrid { .. }]));
    }
}
