//! Per-row result tables written by the CLI. Each row ends in a `status`
//! cell: `ok`, or `error: <reason>` for a row that could not be computed.

use vsi_core::device::SpotField;
use vsi_core::electrometry::FieldEstimate;

use super::table::{cell, num, opt_num, read_table, write_table, Header, Row};
use super::FormatError;

pub const RESONANCE_COLUMNS: [&str; 5] = ["spot_id", "bias_v", "f_mhz", "f_sigma_mhz", "status"];
pub const ESTIMATE_COLUMNS: [&str; 10] = [
    "spot_id",
    "bias_v",
    "f_mhz",
    "f_sigma_mhz",
    "e_par_mvcm",
    "e_perp_mvcm",
    "sigma_e_mvcm",
    "e_par_linear_mvcm",
    "linearity_ok",
    "status",
];
pub const SPOT_FIELD_COLUMNS: [&str; 6] = ["spot_id", "x_um", "z_um", "e_par_mvcm", "e_perp_mvcm", "status"];

fn status<T>(r: &Result<T, String>) -> String {
    match r {
        Ok(_) => "ok".into(),
        Err(e) => format!("error: {}", cell(e)),
    }
}

fn parse_status(row: &Row, col: usize) -> Result<Result<(), String>, FormatError> {
    let s = row.str(col);
    if s == "ok" {
        Ok(Ok(()))
    } else if let Some(msg) = s.strip_prefix("error:") {
        Ok(Err(msg.trim().to_string()))
    } else {
        Err(FormatError::Parse {
            line: row.line,
            message: format!("status must be `ok` or `error: ...`, found `{s}`"),
        })
    }
}

/// One fitted (or failed) resonance.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceRow {
    pub spot_id: String,
    pub bias_v: Option<f64>,
    /// (f, σ_f) in MHz.
    pub fit: Result<(f64, f64), String>,
}

pub fn write_resonances(rows: &[ResonanceRow], header: &Header) -> String {
    write_table(
        header,
        &RESONANCE_COLUMNS,
        rows.iter().map(|r| {
            let (f, s) = match r.fit {
                Ok((f, s)) => (num(f), num(s)),
                Err(_) => (String::new(), String::new()),
            };
            vec![cell(&r.spot_id), opt_num(r.bias_v), f, s, status(&r.fit)]
        }),
    )
}

pub fn read_resonances(text: &str) -> Result<(Header, Vec<ResonanceRow>), FormatError> {
    let t = read_table(text, &RESONANCE_COLUMNS)?;
    let mut rows = Vec::with_capacity(t.rows.len());
    for r in &t.rows {
        let fit = match parse_status(r, 4)? {
            Ok(()) => Ok((r.f64(2, "f_mhz")?, r.f64(3, "f_sigma_mhz")?)),
            Err(e) => Err(e),
        };
        rows.push(ResonanceRow {
            spot_id: r.str(0).to_string(),
            bias_v: r.opt_f64(1, "bias_v")?,
            fit,
        });
    }
    Ok((t.header, rows))
}

/// Inversion result for one resonance.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub spot_id: String,
    pub bias_v: Option<f64>,
    pub f_mhz: Option<f64>,
    pub f_sigma_mhz: Option<f64>,
    pub estimate: Result<FieldEstimate, String>,
}

pub fn write_estimates(rows: &[EstimateRow], header: &Header) -> String {
    write_table(
        header,
        &ESTIMATE_COLUMNS,
        rows.iter().map(|r| {
            let mut v = vec![cell(&r.spot_id), opt_num(r.bias_v), opt_num(r.f_mhz), opt_num(r.f_sigma_mhz)];
            match &r.estimate {
                Ok(e) => v.extend([
                    num(e.e_par),
                    num(e.e_perp),
                    num(e.sigma_e),
                    num(e.e_par_linear),
                    e.linearity_ok.to_string(),
                ]),
                Err(_) => v.extend(std::iter::repeat_n(String::new(), 5)),
            }
            v.push(status(&r.estimate));
            v
        }),
    )
}

/// Rows keep everything but the fold location, which is not stored.
pub fn read_estimates(text: &str) -> Result<(Header, Vec<EstimateRow>), FormatError> {
    let t = read_table(text, &ESTIMATE_COLUMNS)?;
    let mut rows = Vec::with_capacity(t.rows.len());
    for r in &t.rows {
        let estimate = match parse_status(r, 9)? {
            Ok(()) => Ok(FieldEstimate {
                e_par: r.f64(4, "e_par_mvcm")?,
                e_perp: r.f64(5, "e_perp_mvcm")?,
                sigma_e: r.f64(6, "sigma_e_mvcm")?,
                e_par_linear: r.f64(7, "e_par_linear_mvcm")?,
                linearity_ok: match r.str(8) {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(FormatError::Parse {
                            line: r.line,
                            message: format!("linearity_ok must be true or false, found `{other}`"),
                        })
                    }
                },
                e_fold: f64::NAN,
            }),
            Err(e) => Err(e),
        };
        rows.push(EstimateRow {
            spot_id: r.str(0).to_string(),
            bias_v: r.opt_f64(1, "bias_v")?,
            f_mhz: r.opt_f64(2, "f_mhz")?,
            f_sigma_mhz: r.opt_f64(3, "f_sigma_mhz")?,
            estimate,
        });
    }
    Ok((t.header, rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpotFieldRow {
    pub spot_id: String,
    pub x_um: f64,
    pub z_um: f64,
    pub field: Result<SpotField, String>,
}

pub fn write_spot_fields(rows: &[SpotFieldRow], header: &Header) -> String {
    write_table(
        header,
        &SPOT_FIELD_COLUMNS,
        rows.iter().map(|r| {
            let (a, b) = match &r.field {
                Ok(f) => (num(f.e_par), num(f.e_perp)),
                Err(_) => (String::new(), String::new()),
            };
            vec![cell(&r.spot_id), num(r.x_um), num(r.z_um), a, b, status(&r.field)]
        }),
    )
}

pub fn read_spot_fields(text: &str) -> Result<(Header, Vec<SpotFieldRow>), FormatError> {
    let t = read_table(text, &SPOT_FIELD_COLUMNS)?;
    let mut rows = Vec::with_capacity(t.rows.len());
    for r in &t.rows {
        let field = match parse_status(r, 5)? {
            Ok(()) => Ok(SpotField {
                e_par: r.f64(3, "e_par_mvcm")?,
                e_perp: r.f64(4, "e_perp_mvcm")?,
            }),
            Err(e) => Err(e),
        };
        rows.push(SpotFieldRow {
            spot_id: r.str(0).to_string(),
            x_um: r.f64(1, "x_um")?,
            z_um: r.f64(2, "z_um")?,
            field,
        });
    }
    Ok((t.header, rows))
}
