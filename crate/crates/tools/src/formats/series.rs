//! Bias-series CSV: `bias_v,e_par_mvcm,e_perp_mvcm,f_mhz,f_sigma_mhz`.
//!
//! An empty `f_sigma_mhz` cell means "unknown". Header keys `field_source`
//! and `spot` (one-line JSON) carry the remaining series fields.

use vsi_core::dose::SpotRef;
use vsi_core::electrometry::{BiasRecord, BiasSeries, FieldSource};

use super::table::{num, opt_num, read_table, write_table, Header};
use super::FormatError;

pub const COLUMNS: [&str; 5] = ["bias_v", "e_par_mvcm", "e_perp_mvcm", "f_mhz", "f_sigma_mhz"];

fn source_name(s: FieldSource) -> &'static str {
    match s {
        FieldSource::External => "external",
        FieldSource::DeviceModel => "device_model",
        FieldSource::Synthetic => "synthetic",
    }
}

fn parse_source(text: &str) -> Result<FieldSource, FormatError> {
    match text {
        "external" => Ok(FieldSource::External),
        "device_model" => Ok(FieldSource::DeviceModel),
        "synthetic" => Ok(FieldSource::Synthetic),
        other => Err(FormatError::Invalid(format!("unknown field_source `{other}`"))),
    }
}

/// `header` should carry provenance; source and spot entries are appended.
pub fn write_series(s: &BiasSeries, header: Header) -> String {
    let mut header = header.with("field_source", source_name(s.source));
    if let Some(spot) = &s.spot {
        header = header.with("spot", serde_json::to_string(spot).expect("spot serializes"));
    }
    write_table(
        &header,
        &COLUMNS,
        s.records.iter().map(|r| {
            vec![
                num(r.bias_v),
                num(r.e_par),
                num(r.e_perp),
                num(r.f_mhz),
                opt_num(r.f_sigma_mhz),
            ]
        }),
    )
}

/// Parses and validates a series. The returned header has the
/// `field_source` and `spot` entries removed.
pub fn read_series(text: &str) -> Result<(Header, BiasSeries), FormatError> {
    let t = read_table(text, &COLUMNS)?;
    let mut records = Vec::with_capacity(t.rows.len());
    for r in &t.rows {
        records.push(BiasRecord {
            bias_v: r.f64(0, COLUMNS[0])?,
            e_par: r.f64(1, COLUMNS[1])?,
            e_perp: r.f64(2, COLUMNS[2])?,
            f_mhz: r.f64(3, COLUMNS[3])?,
            f_sigma_mhz: r.opt_f64(4, COLUMNS[4])?,
        });
    }
    let source = t.header.get("field_source").map(parse_source).transpose()?.unwrap_or_default();
    let spot: Option<SpotRef> = t.header.get("spot").map(serde_json::from_str).transpose()?;
    let mut series = BiasSeries::new(records, source).map_err(|e| FormatError::Invalid(e.to_string()))?;
    series.spot = spot;
    let mut header = t.header;
    header.entries.retain(|(k, _)| k != "field_source" && k != "spot");
    Ok((header, series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::Provenance;
    use vsi_core::synthetic::SeriesFixture;

    #[test]
    fn bit_exact_round_trip() {
        let mut s = SeriesFixture::point3().sample(11).unwrap();
        s.records[2].f_sigma_mhz = None;
        s.spot = Some(SpotRef::at("p3", 41.5, 2.1));
        let text = write_series(&s, Header::new(&Provenance::for_config(&0, 11)));
        let (h, back) = read_series(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(write_series(&back, h), text);
    }

    #[test]
    fn duplicate_bias_rejected() {
        let text = "bias_v,e_par_mvcm,e_perp_mvcm,f_mhz,f_sigma_mhz\n0,0,0,71,0.3\n0,0,0,71,0.3\n";
        assert!(matches!(read_series(text), Err(FormatError::Invalid(_))));
    }
}
