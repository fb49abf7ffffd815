use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{DeviceError, FieldMap};
use crate::dose::SpotRef;

/// E∥ level defining the lateral extent of the field, MV/cm.
pub const SPREAD_THRESHOLD_MV_PER_CM: f64 = 0.1;
/// Depth at which the lateral spread is evaluated, µm.
pub const SHALLOW_DEPTH_UM: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotField {
    pub e_par: f64,
    pub e_perp: f64,
}

/// Cell index and fractional position of `v` in `axis`.
fn locate(axis: &[f64], v: f64) -> Option<(usize, f64)> {
    let n = axis.len();
    if n < 2 || !(v >= axis[0] && v <= axis[n - 1]) {
        return None;
    }
    let c = axis.partition_point(|&a| a <= v).clamp(1, n - 1) - 1;
    Some((c, (v - axis[c]) / (axis[c + 1] - axis[c])))
}

fn bilinear(map: &FieldMap, values: &[f64], x: f64, z: f64) -> Result<f64, DeviceError> {
    let (i, tx) = locate(&map.x, x).ok_or(DeviceError::OutsideDomain { x, z })?;
    let (j, tz) = locate(&map.z, z).ok_or(DeviceError::OutsideDomain { x, z })?;
    let v00 = values[map.idx(i, j)];
    let v10 = values[map.idx(i + 1, j)];
    let v01 = values[map.idx(i, j + 1)];
    let v11 = values[map.idx(i + 1, j + 1)];
    Ok((1.0 - tz) * ((1.0 - tx) * v00 + tx * v10) + tz * ((1.0 - tx) * v01 + tx * v11))
}

/// Bilinear E∥ and |E⊥| at each spot; out-of-domain spots yield an error
/// in their slot.
pub fn field_at_spots(map: &FieldMap, spots: &[SpotRef]) -> Vec<Result<SpotField, DeviceError>> {
    spots
        .iter()
        .map(|s| {
            Ok(SpotField {
                e_par: bilinear(map, &map.e_par, s.x_um, s.z_um)?,
                e_perp: bilinear(map, &map.e_perp, s.x_um, s.z_um)?,
            })
        })
        .collect()
}

/// Field along one grid direction at a fixed other coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineCut {
    /// Fixed coordinate, µm.
    pub at: f64,
    pub coord: Vec<f64>,
    pub phi: Vec<f64>,
    pub e_par: Vec<f64>,
    pub e_perp: Vec<f64>,
}

fn cut<F: Fn(f64) -> (f64, f64)>(map: &FieldMap, at: f64, coord: &[f64], point: F) -> Result<LineCut, DeviceError> {
    let mut out = LineCut {
        at,
        coord: coord.to_vec(),
        phi: Vec::with_capacity(coord.len()),
        e_par: Vec::with_capacity(coord.len()),
        e_perp: Vec::with_capacity(coord.len()),
    };
    for &c in coord {
        let (x, z) = point(c);
        out.phi.push(bilinear(map, &map.phi, x, z)?);
        out.e_par.push(bilinear(map, &map.e_par, x, z)?);
        out.e_perp.push(bilinear(map, &map.e_perp, x, z)?);
    }
    Ok(out)
}

/// Field versus x at depth `z`.
pub fn line_cut_x(map: &FieldMap, z: f64) -> Result<LineCut, DeviceError> {
    cut(map, z, &map.x, |x| (x, z))
}

/// Field versus depth at lateral position `x`, semiconductor only.
pub fn line_cut_z(map: &FieldMap, x: f64) -> Result<LineCut, DeviceError> {
    let zs: Vec<f64> = map.z.iter().copied().filter(|&z| z >= 0.0).collect();
    cut(map, x, &zs, |z| (x, z))
}

/// Largest x at which E∥ at depth `z` is still at least `threshold`,
/// interpolated between nodes. `None` when the threshold is never reached.
pub fn lateral_spread(map: &FieldMap, z: f64, threshold: f64) -> Result<Option<f64>, DeviceError> {
    let c = line_cut_x(map, z)?;
    let last = match c.e_par.iter().rposition(|&e| e >= threshold) {
        Some(k) => k,
        None => return Ok(None),
    };
    if last + 1 == c.coord.len() {
        return Ok(Some(c.coord[last]));
    }
    let (e0, e1) = (c.e_par[last], c.e_par[last + 1]);
    let t = (e0 - threshold) / (e0 - e1);
    Ok(Some(c.coord[last] + t * (c.coord[last + 1] - c.coord[last])))
}

/// max |ΔE∥| over the semiconductor, relative to max |E∥| of `reference`.
pub fn map_difference(map: &FieldMap, reference: &FieldMap) -> Result<f64, DeviceError> {
    if map.x != reference.x || map.z != reference.z {
        return Err(DeviceError::InvalidModel("maps must share a grid"));
    }
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for (j, &z) in map.z.iter().enumerate() {
        if z < 0.0 {
            continue;
        }
        for i in 0..map.nx() {
            let k = map.idx(i, j);
            diff = diff.max((map.e_par[k] - reference.e_par[k]).abs());
            scale = scale.max(reference.e_par[k].abs());
        }
    }
    Ok(if scale > 0.0 { diff / scale } else { diff })
}
