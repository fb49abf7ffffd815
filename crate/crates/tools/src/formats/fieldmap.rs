//! Field maps (`x_um,z_um,phi_v,e_par_mvcm,e_perp_mvcm`, x varying fastest)
//! and line cuts (`coord_um,phi_v,e_par_mvcm,e_perp_mvcm`).
//!
//! The map CSV holds crystal-frame components only. A map read back has its
//! device-frame `e_x`/`e_z` filled with NaN and no solver diagnostics.

use vsi_core::device::{FieldMap, LineCut};

use super::table::{num, parse_f64, read_table, write_table, Header};
use super::FormatError;

pub const MAP_COLUMNS: [&str; 5] = ["x_um", "z_um", "phi_v", "e_par_mvcm", "e_perp_mvcm"];
pub const CUT_COLUMNS: [&str; 4] = ["coord_um", "phi_v", "e_par_mvcm", "e_perp_mvcm"];

pub fn write_field_map(map: &FieldMap, header: Header) -> String {
    let header = header
        .with("bias_v", num(map.bias_v))
        .with("miscut_deg", num(map.miscut_deg))
        .with("converged", map.converged);
    let (nx, nz) = (map.nx(), map.nz());
    write_table(
        &header,
        &MAP_COLUMNS,
        (0..nz).flat_map(|j| {
            (0..nx).map(move |i| {
                let k = map.idx(i, j);
                vec![
                    num(map.x[i]),
                    num(map.z[j]),
                    num(map.phi[k]),
                    num(map.e_par[k]),
                    num(map.e_perp[k]),
                ]
            })
        }),
    )
}

fn header_f64(h: &Header, key: &str) -> Result<f64, FormatError> {
    let v = h
        .get(key)
        .ok_or_else(|| FormatError::Invalid(format!("missing header entry `{key}`")))?;
    parse_f64(v, 0, key)
}

pub fn read_field_map(text: &str) -> Result<(Header, FieldMap), FormatError> {
    let t = read_table(text, &MAP_COLUMNS)?;
    if t.rows.is_empty() {
        return Err(FormatError::Invalid("empty field map".into()));
    }
    let z0 = t.rows[0].f64(1, "z_um")?;
    let mut nx = 0;
    for r in &t.rows {
        if r.f64(1, "z_um")? != z0 {
            break;
        }
        nx += 1;
    }
    if t.rows.len() % nx != 0 {
        return Err(FormatError::Invalid(format!(
            "{} rows do not form a grid with {nx} columns",
            t.rows.len()
        )));
    }
    let nz = t.rows.len() / nx;
    let mut x = Vec::with_capacity(nx);
    let mut z = Vec::with_capacity(nz);
    let (mut phi, mut e_par, mut e_perp) = (Vec::new(), Vec::new(), Vec::new());
    for (k, r) in t.rows.iter().enumerate() {
        let (xi, zj) = (r.f64(0, "x_um")?, r.f64(1, "z_um")?);
        let (i, j) = (k % nx, k / nx);
        if j == 0 {
            x.push(xi);
        }
        if i == 0 {
            z.push(zj);
        }
        if xi != x[i] || zj != z[j] {
            return Err(FormatError::Parse {
                line: r.line,
                message: "row breaks the x-fastest grid ordering".into(),
            });
        }
        phi.push(r.f64(2, "phi_v")?);
        e_par.push(r.f64(3, "e_par_mvcm")?);
        e_perp.push(r.f64(4, "e_perp_mvcm")?);
    }
    for (name, axis) in [("x", &x), ("z", &z)] {
        if axis.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FormatError::Invalid(format!("{name} axis is not strictly increasing")));
        }
    }
    let bias_v = header_f64(&t.header, "bias_v")?;
    let miscut_deg = header_f64(&t.header, "miscut_deg")?;
    let converged = t.header.get("converged") == Some("true");
    let n = phi.len();
    let map = FieldMap {
        x,
        z,
        phi,
        e_x: vec![f64::NAN; n],
        e_z: vec![f64::NAN; n],
        e_par,
        e_perp,
        bias_v,
        miscut_deg,
        converged,
        newton_iters: 0,
        active_set_iters: 0,
        residual_history: Vec::new(),
        charge_balance_defect: 0.0,
        warnings: Vec::new(),
    };
    let mut header = t.header;
    header.entries.retain(|(k, _)| !matches!(k.as_str(), "bias_v" | "miscut_deg" | "converged"));
    Ok((header, map))
}

/// `axis` names the varying coordinate, `x` or `z`.
pub fn write_line_cut(cut: &LineCut, axis: char, header: Header) -> String {
    let fixed = if axis == 'x' { "z_um" } else { "x_um" };
    let header = header.with("axis", axis).with(fixed, num(cut.at));
    write_table(
        &header,
        &CUT_COLUMNS,
        (0..cut.coord.len()).map(|k| {
            vec![
                num(cut.coord[k]),
                num(cut.phi[k]),
                num(cut.e_par[k]),
                num(cut.e_perp[k]),
            ]
        }),
    )
}

pub fn read_line_cut(text: &str) -> Result<(Header, LineCut), FormatError> {
    let t = read_table(text, &CUT_COLUMNS)?;
    let at = match t.header.get("axis") {
        Some("x") => header_f64(&t.header, "z_um")?,
        Some("z") => header_f64(&t.header, "x_um")?,
        _ => return Err(FormatError::Invalid("line cut needs an `axis: x|z` header".into())),
    };
    let mut cut = LineCut {
        at,
        coord: Vec::new(),
        phi: Vec::new(),
        e_par: Vec::new(),
        e_perp: Vec::new(),
    };
    for r in &t.rows {
        cut.coord.push(r.f64(0, CUT_COLUMNS[0])?);
        cut.phi.push(r.f64(1, CUT_COLUMNS[1])?);
        cut.e_par.push(r.f64(2, CUT_COLUMNS[2])?);
        cut.e_perp.push(r.f64(3, CUT_COLUMNS[3])?);
    }
    let mut header = t.header;
    header.entries.retain(|(k, _)| !matches!(k.as_str(), "axis" | "x_um" | "z_um"));
    Ok((header, cut))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::Provenance;
    use vsi_core::device::{line_cut_z, solve_poisson_2d, DeviceModel2D};

    #[test]
    fn map_and_cut_round_trip() {
        let map = solve_poisson_2d(&DeviceModel2D::uniform_fixture(0.2), 300.0).unwrap();
        let h = Header::new(&Provenance::for_config(&0, 0));
        let text = write_field_map(&map, h.clone());
        let (h2, back) = read_field_map(&text).unwrap();
        assert_eq!(back.x, map.x);
        assert_eq!(back.z, map.z);
        assert_eq!(back.e_par, map.e_par);
        assert_eq!(back.phi, map.phi);
        assert_eq!(h2, h);
        assert_eq!(write_field_map(&back, h2), text);

        let cut = line_cut_z(&map, 2.0).unwrap();
        let text = write_line_cut(&cut, 'z', h.clone());
        let (h3, back) = read_line_cut(&text).unwrap();
        assert_eq!(back, cut);
        assert_eq!(write_line_cut(&back, 'z', h3), text);
    }

    #[test]
    fn ragged_grid_rejected() {
        let text = "# bias_v: 0.0\n# miscut_deg: 0.0\nx_um,z_um,phi_v,e_par_mvcm,e_perp_mvcm\n0,0,0,0,0\n1,0,0,0,0\n0,1,0,0,0\n";
        assert!(read_field_map(text).is_err());
    }
}
