//! Spectrum CSV (`freq_mhz,contrast`) with a JSON metadata sidecar.
//!
//! The sidecar sits next to the CSV with a `.json` extension.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vsi_core::odmr::{OdmrSpectrum, SpectrumMeta};

use super::table::{num, read_table, write_table, Header};
use super::{read_text, write_text, FormatError, Provenance};

pub const COLUMNS: [&str; 2] = ["freq_mhz", "contrast"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub bias_v: f64,
    pub spot_id: String,
    pub noise_sigma: Option<f64>,
    pub provenance: Option<Provenance>,
}

impl Sidecar {
    pub fn new(meta: &SpectrumMeta, prov: Option<&Provenance>) -> Self {
        Self {
            bias_v: meta.bias_v,
            spot_id: meta.spot_id.clone(),
            noise_sigma: meta.noise_sigma,
            provenance: prov.cloned(),
        }
    }

    pub fn meta(&self) -> SpectrumMeta {
        SpectrumMeta {
            bias_v: self.bias_v,
            spot_id: self.spot_id.clone(),
            noise_sigma: self.noise_sigma,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sidecar serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_spectrum(s: &OdmrSpectrum, header: &Header) -> String {
    write_table(
        header,
        &COLUMNS,
        s.freqs()
            .iter()
            .zip(s.contrast())
            .map(|(f, c)| vec![num(*f), num(*c)]),
    )
}

/// Parses the CSV part; metadata is left at its default.
pub fn read_spectrum(text: &str) -> Result<(Header, OdmrSpectrum), FormatError> {
    let t = read_table(text, &COLUMNS)?;
    let mut freqs = Vec::with_capacity(t.rows.len());
    let mut contrast = Vec::with_capacity(t.rows.len());
    for r in &t.rows {
        freqs.push(r.f64(0, COLUMNS[0])?);
        contrast.push(r.f64(1, COLUMNS[1])?);
    }
    let s = OdmrSpectrum::new(freqs, contrast, SpectrumMeta::default())
        .map_err(|e| FormatError::Invalid(e.to_string()))?;
    Ok((t.header, s))
}

/// Writes `<path>` and its sidecar.
pub fn save_spectrum(path: &Path, s: &OdmrSpectrum, prov: &Provenance) -> Result<(), FormatError> {
    let header = Header::new(prov);
    write_text(path, &write_spectrum(s, &header))?;
    write_text(&sidecar_path(path), &Sidecar::new(&s.meta, Some(prov)).to_json())
}

/// Reads a spectrum CSV and, when present, its sidecar.
pub fn load_spectrum(path: &Path) -> Result<OdmrSpectrum, FormatError> {
    let (_, mut s) = read_spectrum(&read_text(path)?).map_err(|e| e.in_file(path))?;
    let side = sidecar_path(path);
    if side.exists() {
        let sc = Sidecar::from_json(&read_text(&side)?).map_err(|e| e.in_file(&side))?;
        s.meta = sc.meta();
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use vsi_core::odmr::{linear_grid, synthesize_spectrum, LinePeak};

    #[test]
    fn bit_exact_round_trip() {
        let grid = linear_grid(20.0, 120.0, 101);
        let s = synthesize_spectrum(&[LinePeak::new(71.0, 8.0, 0.01)], &grid, 1e-3, 5).unwrap();
        let prov = Provenance::for_config(&1, 5);
        let text = write_spectrum(&s, &Header::new(&prov));
        let (h, back) = read_spectrum(&text).unwrap();
        for (a, b) in back.contrast().iter().zip(s.contrast()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(write_spectrum(&back, &h), text);
        assert_eq!(h.provenance(), Some(prov));
    }

    #[test]
    fn sidecar_round_trip() {
        let sc = Sidecar {
            bias_v: 600.0,
            spot_id: "p1".into(),
            noise_sigma: Some(0.3),
            provenance: None,
        };
        let text = sc.to_json();
        assert_eq!(Sidecar::from_json(&text).unwrap().to_json(), text);
    }
}
