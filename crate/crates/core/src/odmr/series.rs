use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::fit::{fit_spectrum_with, FitOptions};
use super::spectrum::OdmrSpectrum;
use super::OdmrError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FitFailure {
    NotConverged { iterations: usize },
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ResonanceOutcome {
    Fitted { f_mhz: f64, sigma_mhz: f64 },
    Failed(FitFailure),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRecord {
    pub bias_v: f64,
    pub spot_id: String,
    pub outcome: ResonanceOutcome,
}

impl ResonanceRecord {
    pub fn fitted(&self) -> Option<(f64, f64)> {
        match self.outcome {
            ResonanceOutcome::Fitted { f_mhz, sigma_mhz } => Some((f_mhz, sigma_mhz)),
            ResonanceOutcome::Failed(_) => None,
        }
    }
}

/// Fitted resonance per bias, before fields are attached
/// (see `electrometry::BiasSeries::from_resonances`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSeries {
    /// Sorted by bias.
    pub records: Vec<ResonanceRecord>,
}

impl ResonanceSeries {
    pub fn n_failed(&self) -> usize {
        self.records.iter().filter(|r| r.fitted().is_none()).count()
    }
}

/// Fits each spectrum with one line and collects (bias, f, σ_f).
pub fn resonance_series(spectra: &[OdmrSpectrum], opts: &FitOptions) -> ResonanceSeries {
    let mut records: Vec<ResonanceRecord> = spectra
        .iter()
        .map(|s| {
            let outcome = match fit_spectrum_with(s, 1, None, opts) {
                Ok(fit) if fit.converged => match fit.dominant() {
                    Some((peak, sigma)) => ResonanceOutcome::Fitted {
                        f_mhz: peak.center,
                        sigma_mhz: sigma,
                    },
                    None => ResonanceOutcome::Failed(FitFailure::Error("no peak".into())),
                },
                Ok(fit) => ResonanceOutcome::Failed(FitFailure::NotConverged {
                    iterations: fit.iterations,
                }),
                Err(e) => ResonanceOutcome::Failed(FitFailure::Error(error_text(&e))),
            };
            ResonanceRecord {
                bias_v: s.meta.bias_v,
                spot_id: s.meta.spot_id.clone(),
                outcome,
            }
        })
        .collect();
    records.sort_by(|a, b| a.bias_v.total_cmp(&b.bias_v));
    ResonanceSeries { records }
}

fn error_text(e: &OdmrError) -> String {
    use alloc::string::ToString;
    e.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odmr::{linear_grid, synthesize_spectrum, LinePeak, SpectrumMeta};
    use crate::spin::{analytic_axial_frequency, SpinSystem};

    fn spectrum_at(bias: f64, center: f64, seed: u64) -> OdmrSpectrum {
        let grid = linear_grid(0.0, 140.0, 281);
        let mut s = synthesize_spectrum(&[LinePeak::new(center, 8.0, 0.01)], &grid, 0.0005, seed)
            .unwrap();
        s.meta.bias_v = bias;
        s
    }

    #[test]
    fn empty_input() {
        assert!(resonance_series(&[], &FitOptions::default()).records.is_empty());
    }

    #[test]
    fn chain_is_monotone() {
        let sys = SpinSystem::vsi_with(35.0, -15.0, 16.5);
        let fields = [0.0, 0.3, 0.6, 0.9, 1.2];
        // deliberately unsorted input
        let spectra: Vec<_> = fields
            .iter()
            .enumerate()
            .rev()
            .map(|(i, &e)| spectrum_at(i as f64 * 250.0, analytic_axial_frequency(&sys, e, 0.0).0, i as u64))
            .collect();
        let series = resonance_series(&spectra, &FitOptions::default());
        assert_eq!(series.records.len(), 5);
        let f: Vec<f64> = series.records.iter().map(|r| r.fitted().unwrap().0).collect();
        assert!(f.windows(2).all(|w| w[1] < w[0]), "{f:?}");
        assert!((f[4] - 34.0).abs() < 0.2);
    }

    #[test]
    fn failure_is_marked() {
        let mut spectra: Vec<_> = (0..4).map(|i| spectrum_at(i as f64 * 100.0, 60.0 - i as f64, i)).collect();
        let flat = OdmrSpectrum::new(
            linear_grid(0.0, 140.0, 64),
            alloc::vec![0.0; 64],
            SpectrumMeta {
                bias_v: 1000.0,
                ..Default::default()
            },
        )
        .unwrap();
        spectra.push(flat);
        let series = resonance_series(&spectra, &FitOptions::default());
        assert_eq!(series.records.len(), 5);
        assert_eq!(series.n_failed(), 1);
        assert!(series.records[4].fitted().is_none());
    }
}
