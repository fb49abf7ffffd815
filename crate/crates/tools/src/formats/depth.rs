//! Vacancy depth profiles.
//!
//! Two inputs are accepted:
//! - the canonical CSV `depth_um,vacancies_per_ion_um` (what [`write_depth_csv`]
//!   emits; round trips bit-exactly), and
//! - SRIM-style whitespace tables such as `VACANCY.txt`. Everything before the
//!   first all-numeric row is treated as header text and must mention a depth
//!   column; depth units are taken from it (Å, nm or µm, default Å). When a row
//!   has several value columns (knock-ons, recoils) they are summed.

use vsi_core::dose::{DepthProfile, DoseError};

use super::table::{num, parse_f64, read_table, write_table, Header};
use super::FormatError;

pub const COLUMNS: [&str; 2] = ["depth_um", "vacancies_per_ion_um"];

pub fn write_depth_csv(p: &DepthProfile, header: Header) -> String {
    let mut header = header;
    if !p.ion_species.is_empty() {
        header = header.with("ion_species", &p.ion_species);
    }
    if let Some(e) = p.ion_energy_mev {
        header = header.with("ion_energy_mev", num(e));
    }
    write_table(
        &header,
        &COLUMNS,
        p.depth_um
            .iter()
            .zip(&p.vacancies_per_ion_um)
            .map(|(z, v)| vec![num(*z), num(*v)]),
    )
}

/// Parses either format; see the module docs.
pub fn parse_depth_profile(text: &str) -> Result<(Header, DepthProfile), FormatError> {
    let first = text
        .lines()
        .map(|l| l.trim())
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    let is_csv = first.is_some_and(|l| l.split(',').map(str::trim).eq(COLUMNS));
    if is_csv {
        parse_csv(text)
    } else {
        parse_srim(text).map(|p| (Header::default(), p))
    }
}

fn parse_csv(text: &str) -> Result<(Header, DepthProfile), FormatError> {
    let t = read_table(text, &COLUMNS)?;
    let mut depth = Vec::with_capacity(t.rows.len());
    let mut vac = Vec::with_capacity(t.rows.len());
    for r in &t.rows {
        depth.push(r.f64(0, COLUMNS[0])?);
        vac.push(r.f64(1, COLUMNS[1])?);
    }
    let lines: Vec<usize> = t.rows.iter().map(|r| r.line).collect();
    let mut p = build(depth, vac, &lines)?;
    let mut header = t.header;
    if let Some(s) = header.get("ion_species") {
        p.ion_species = s.to_string();
    }
    if let Some(e) = header.get("ion_energy_mev") {
        p.ion_energy_mev = Some(parse_f64(e, 0, "ion_energy_mev")?);
    }
    header.entries.retain(|(k, _)| k != "ion_species" && k != "ion_energy_mev");
    Ok((header, p))
}

fn build(depth: Vec<f64>, vac: Vec<f64>, lines: &[usize]) -> Result<DepthProfile, FormatError> {
    DepthProfile::new(depth, vac).map_err(|e| match e {
        DoseError::NonMonotoneDepth { index } => FormatError::Invalid(format!(
            "depth is not strictly increasing at line {}",
            lines[index]
        )),
        e => FormatError::Invalid(e.to_string()),
    })
}

fn tokens(line: &str) -> Vec<&str> {
    line.split(|c: char| c.is_whitespace() || c == ',' || c == ';')
        .filter(|t| !t.is_empty())
        .collect()
}

fn numeric(t: &str) -> Option<f64> {
    t.parse().ok()
}

/// Depth-unit factor to µm guessed from header text.
fn depth_scale(header: &str) -> f64 {
    let h = header.to_ascii_lowercase();
    if h.contains("(um") || h.contains("(µm") || h.contains("micron") {
        1.0
    } else if h.contains("(nm") {
        1e-3
    } else {
        1e-4
    }
}

fn parse_srim(text: &str) -> Result<DepthProfile, FormatError> {
    let mut header_text = String::new();
    let mut depth = Vec::new();
    let mut vac = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let started = !depth.is_empty();
        let leading_number = toks.first().and_then(|t| numeric(t)).is_some();
        if !leading_number {
            if started {
                // End of the table: blank line or trailing prose.
                break;
            }
            header_text.push_str(raw);
            header_text.push('\n');
            continue;
        }
        if !started && !header_text.to_ascii_lowercase().contains("depth") {
            return Err(FormatError::Parse {
                line,
                message: "no recognizable header (expected a depth column) before numeric data".into(),
            });
        }
        if toks.len() < 2 {
            return Err(FormatError::Parse {
                line,
                message: "expected a depth and at least one value column".into(),
            });
        }
        let mut values = Vec::with_capacity(toks.len());
        for (c, t) in toks.iter().enumerate() {
            values.push(numeric(t).ok_or_else(|| FormatError::Parse {
                line,
                message: format!("column {}: `{t}` is not a number", c + 1),
            })?);
        }
        depth.push(values[0]);
        vac.push(values[1..].iter().sum());
        lines.push(line);
    }
    if depth.is_empty() {
        return Err(FormatError::Parse {
            line: text.lines().count().max(1),
            message: "no numeric rows found".into(),
        });
    }
    // Per-ion-per-length values scale inversely with the length unit.
    let s = depth_scale(&header_text);
    let depth = depth.into_iter().map(|z| z * s).collect();
    let vac = vac.into_iter().map(|v: f64| v / s).collect();
    build(depth, vac, &lines)
}
