use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ElectrometryError;
use crate::dose::SpotRef;
use crate::odmr::ResonanceSeries;
use crate::spin::{transition_frequencies, CrystalField, SpinError, SpinSystem};

/// Where the per-record field values came from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSource {
    /// Ingested from an external simulation.
    #[default]
    External,
    /// Computed with this crate's device solver.
    DeviceModel,
    /// Generated by a synthetic fixture.
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasRecord {
    pub bias_v: f64,
    /// MV/cm.
    pub e_par: f64,
    /// MV/cm, magnitude.
    pub e_perp: f64,
    pub f_mhz: f64,
    pub f_sigma_mhz: Option<f64>,
}

/// Per-bias resonance measurements paired with simulated fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BiasSeries {
    pub records: Vec<BiasRecord>,
    pub spot: Option<SpotRef>,
    pub source: FieldSource,
}

impl BiasSeries {
    pub fn new(records: Vec<BiasRecord>, source: FieldSource) -> Result<Self, ElectrometryError> {
        let s = Self {
            records,
            spot: None,
            source,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ElectrometryError> {
        for r in &self.records {
            if !(r.bias_v.is_finite() && r.e_par.is_finite() && r.e_perp.is_finite() && r.f_mhz.is_finite()) {
                return Err(ElectrometryError::InvalidSeries("non-finite value"));
            }
            if r.e_par < 0.0 {
                return Err(ElectrometryError::InvalidSeries("negative E∥"));
            }
            if r.e_perp < 0.0 {
                return Err(ElectrometryError::InvalidSeries("negative E⊥ magnitude"));
            }
            if let Some(s) = r.f_sigma_mhz {
                if !(s.is_finite() && s > 0.0) {
                    return Err(ElectrometryError::InvalidSeries("σ_f must be positive"));
                }
            }
        }
        let mut biases: Vec<f64> = self.records.iter().map(|r| r.bias_v).collect();
        biases.sort_by(f64::total_cmp);
        if biases.windows(2).any(|w| w[0] == w[1]) {
            return Err(ElectrometryError::InvalidSeries("duplicate bias"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Pairs fitted resonances with fields from `field_at_bias` (returning
    /// `(E∥, E⊥)`). Failed fits are skipped; their biases are returned.
    pub fn from_resonances<F>(
        resonances: &ResonanceSeries,
        source: FieldSource,
        mut field_at_bias: F,
    ) -> Result<(Self, Vec<f64>), ElectrometryError>
    where
        F: FnMut(f64) -> (f64, f64),
    {
        let mut records = Vec::new();
        let mut failed = Vec::new();
        for r in &resonances.records {
            match r.fitted() {
                Some((f, sigma)) => {
                    let (e_par, e_perp) = field_at_bias(r.bias_v);
                    records.push(BiasRecord {
                        bias_v: r.bias_v,
                        e_par,
                        e_perp,
                        f_mhz: f,
                        f_sigma_mhz: Some(sigma),
                    });
                }
                None => failed.push(r.bias_v),
            }
        }
        Ok((Self::new(records, source)?, failed))
    }

    /// σ_f per record, with missing values replaced by the series median.
    pub fn sigmas(&self) -> Result<Vec<f64>, ElectrometryError> {
        let mut known: Vec<f64> = self.records.iter().filter_map(|r| r.f_sigma_mhz).collect();
        if known.is_empty() {
            return Err(ElectrometryError::InvalidSeries("no record carries σ_f"));
        }
        known.sort_by(f64::total_cmp);
        let n = known.len();
        let median = if n % 2 == 1 {
            known[n / 2]
        } else {
            0.5 * (known[n / 2 - 1] + known[n / 2])
        };
        Ok(self
            .records
            .iter()
            .map(|r| r.f_sigma_mhz.unwrap_or(median))
            .collect())
    }
}

/// Zero-magnetic-field ODMR frequency for the given field, MHz: the
/// strongest S_x-allowed line, or 0 when all levels are degenerate.
pub fn resonance_model(sys: &SpinSystem, e_par: f64, e_perp: f64) -> Result<f64, SpinError> {
    let ts = transition_frequencies(sys, &CrystalField::electric(e_par, e_perp))?;
    Ok(ts.dominant().map_or(0.0, |t| t.frequency))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rec(bias: f64, e: f64, sigma: Option<f64>) -> BiasRecord {
        BiasRecord {
            bias_v: bias,
            e_par: e,
            e_perp: 0.0,
            f_mhz: 70.0,
            f_sigma_mhz: sigma,
        }
    }

    #[test]
    fn median_fill() {
        let s = BiasSeries::new(
            vec![rec(0.0, 0.0, Some(0.1)), rec(1.0, 0.1, None), rec(2.0, 0.2, Some(0.3)), rec(3.0, 0.3, Some(0.5))],
            FieldSource::Synthetic,
        )
        .unwrap();
        assert_eq!(s.sigmas().unwrap(), vec![0.1, 0.3, 0.3, 0.5]);
    }

    #[test]
    fn invariants() {
        assert!(BiasSeries::new(vec![rec(0.0, 0.0, None), rec(0.0, 0.1, None)], FieldSource::External).is_err());
        assert!(BiasSeries::new(vec![rec(0.0, -0.1, None)], FieldSource::External).is_err());
    }

    #[test]
    fn model_matches_closed_form() {
        let sys = SpinSystem::vsi_with(35.5, -15.0, 16.5);
        let (e, p) = (1.5, 0.19 * 1.5);
        let expect = 2.0 * ((35.5f64 - 15.0 * e).powi(2) + 3.0 * (16.5f64 * p).powi(2)).sqrt();
        assert!((resonance_model(&sys, e, p).unwrap() - expect).abs() < 1e-10);
        // fully degenerate levels
        let flat = SpinSystem::vsi_with(0.0, -15.0, 0.0);
        assert_eq!(resonance_model(&flat, 0.0, 0.0).unwrap(), 0.0);
    }
}
