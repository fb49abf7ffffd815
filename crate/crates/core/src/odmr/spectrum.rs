use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::OdmrError;
use crate::spin::TransitionSet;

pub const MIN_SPECTRUM_POINTS: usize = 16;

/// One Lorentzian resonance line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinePeak {
    /// MHz.
    pub center: f64,
    /// Full width at half maximum, MHz.
    pub fwhm: f64,
    /// Peak contrast above baseline; positive for the stored convention.
    pub amplitude: f64,
    /// Share of the ensemble contributing this line, in [0, 1].
    pub population_weight: f64,
}

impl LinePeak {
    pub fn new(center: f64, fwhm: f64, amplitude: f64) -> Self {
        Self {
            center,
            fwhm,
            amplitude,
            population_weight: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), OdmrError> {
        if !(self.center.is_finite() && self.fwhm.is_finite() && self.amplitude.is_finite()) {
            return Err(OdmrError::InvalidPeak("non-finite parameter"));
        }
        if self.fwhm <= 0.0 {
            return Err(OdmrError::InvalidPeak("fwhm must be positive"));
        }
        if !(0.0..=1.0).contains(&self.population_weight) {
            return Err(OdmrError::InvalidPeak("population weight outside [0, 1]"));
        }
        Ok(())
    }

    pub fn value_at(&self, f: f64) -> f64 {
        self.amplitude * lorentzian(f, self.center, self.fwhm)
    }
}

/// Unit-height Lorentzian with the given FWHM.
pub fn lorentzian(f: f64, center: f64, fwhm: f64) -> f64 {
    let hw = 0.5 * fwhm;
    let d = f - center;
    hw * hw / (d * d + hw * hw)
}

pub fn model_contrast(peaks: &[LinePeak], baseline: f64, f: f64) -> f64 {
    baseline + peaks.iter().map(|p| p.value_at(f)).sum::<f64>()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    /// Applied reverse bias, V.
    pub bias_v: f64,
    pub spot_id: String,
    pub noise_sigma: Option<f64>,
}

/// A sampled contrast curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdmrSpectrum {
    freqs: Vec<f64>,
    contrast: Vec<f64>,
    pub meta: SpectrumMeta,
}

impl OdmrSpectrum {
    pub fn new(freqs: Vec<f64>, contrast: Vec<f64>, meta: SpectrumMeta) -> Result<Self, OdmrError> {
        if freqs.is_empty() {
            return Err(OdmrError::EmptyGrid);
        }
        if freqs.len() != contrast.len() {
            return Err(OdmrError::LengthMismatch {
                freqs: freqs.len(),
                contrast: contrast.len(),
            });
        }
        validate_grid(&freqs)?;
        if freqs.len() < MIN_SPECTRUM_POINTS {
            return Err(OdmrError::TooFewPoints(freqs.len()));
        }
        if let Some(i) = contrast.iter().position(|c| !c.is_finite()) {
            return Err(OdmrError::NonFinite(i));
        }
        Ok(Self {
            freqs,
            contrast,
            meta,
        })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn contrast(&self) -> &[f64] {
        &self.contrast
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Index of the sample with the largest contrast.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.contrast.iter().enumerate() {
            if c > self.contrast[best] {
                best = i;
            }
        }
        best
    }
}

fn validate_grid(freqs: &[f64]) -> Result<(), OdmrError> {
    if let Some(i) = freqs.iter().position(|f| !f.is_finite()) {
        return Err(OdmrError::NonFinite(i));
    }
    if let Some(i) = freqs.windows(2).position(|w| w[1] <= w[0]) {
        return Err(OdmrError::NonMonotoneGrid(i + 1));
    }
    Ok(())
}

/// `n` evenly spaced frequencies from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![start];
    }
    let step = (stop - start) / (n - 1) as f64;
    (0..n).map(|i| start + step * i as f64).collect()
}

/// Samples the Lorentzian sum on `grid` and adds seeded Gaussian noise.
///
/// With `noise_sigma == 0` the output is exactly the model. Peak amplitudes
/// are used as given; `population_weight` is carried as metadata only.
pub fn synthesize_spectrum(
    peaks: &[LinePeak],
    grid: &[f64],
    noise_sigma: f64,
    seed: u64,
) -> Result<OdmrSpectrum, OdmrError> {
    if grid.is_empty() {
        return Err(OdmrError::EmptyGrid);
    }
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(OdmrError::InvalidNoise);
    }
    for p in peaks {
        p.validate()?;
    }
    let mut contrast: Vec<f64> = grid.iter().map(|&f| model_contrast(peaks, 0.0, f)).collect();
    if noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sigma).map_err(|_| OdmrError::InvalidNoise)?;
        for c in contrast.iter_mut() {
            *c += normal.sample(&mut rng);
        }
    }
    OdmrSpectrum::new(
        grid.to_vec(),
        contrast,
        SpectrumMeta {
            noise_sigma: Some(noise_sigma),
            ..SpectrumMeta::default()
        },
    )
}

/// Turns a transition set into line peaks sharing `total_amplitude` in
/// proportion to drive weight.
pub fn peaks_from_transitions(ts: &TransitionSet, fwhm: f64, total_amplitude: f64) -> Vec<LinePeak> {
    let total: f64 = ts.transitions.iter().map(|t| t.drive_weight).sum();
    ts.transitions
        .iter()
        .map(|t| {
            let w = if total > 0.0 { t.drive_weight / total } else { 0.0 };
            LinePeak {
                center: t.frequency,
                fwhm,
                amplitude: total_amplitude * w,
                population_weight: w,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_peak_maximum_at_center() {
        let grid = linear_grid(0.0, 140.0, 281);
        let s = synthesize_spectrum(&[LinePeak::new(70.0, 8.0, 0.01)], &grid, 0.0, 1).unwrap();
        assert_eq!(s.freqs()[s.argmax()], 70.0);
        assert_eq!(s.contrast()[s.argmax()], 0.01);
    }

    #[test]
    fn noiseless_is_exact_model() {
        let grid = linear_grid(10.0, 100.0, 64);
        let peaks = [LinePeak::new(40.0, 8.0, 0.01), LinePeak::new(70.0, 8.0, 0.01)];
        let s = synthesize_spectrum(&peaks, &grid, 0.0, 9).unwrap();
        for (f, c) in s.freqs().iter().zip(s.contrast()) {
            assert_eq!(*c, model_contrast(&peaks, 0.0, *f));
        }
    }

    #[test]
    fn seeded_noise_is_deterministic() {
        let grid = linear_grid(10.0, 100.0, 64);
        let peaks = [LinePeak::new(40.0, 8.0, 0.01)];
        let a = synthesize_spectrum(&peaks, &grid, 0.001, 42).unwrap();
        let b = synthesize_spectrum(&peaks, &grid, 0.001, 42).unwrap();
        let c = synthesize_spectrum(&peaks, &grid, 0.001, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn bimodal_mixture() {
        let grid = linear_grid(20.0, 90.0, 141);
        let peaks = [LinePeak::new(40.0, 8.0, 0.01), LinePeak::new(70.0, 8.0, 0.01)];
        let s = synthesize_spectrum(&peaks, &grid, 0.0, 0).unwrap();
        let at = |f: f64| s.contrast()[s.freqs().iter().position(|&g| g == f).unwrap()];
        assert!(at(40.0) > at(55.0) && at(70.0) > at(55.0));
    }

    #[test]
    fn errors() {
        assert_eq!(
            synthesize_spectrum(&[], &[], 0.0, 0),
            Err(OdmrError::EmptyGrid)
        );
        let grid = linear_grid(0.0, 1.0, 10);
        assert_eq!(
            synthesize_spectrum(&[], &grid, 0.0, 0),
            Err(OdmrError::TooFewPoints(10))
        );
        let mut bad = linear_grid(0.0, 1.0, 20);
        bad.swap(3, 4);
        assert_eq!(
            OdmrSpectrum::new(bad, alloc::vec![0.0; 20], SpectrumMeta::default()),
            Err(OdmrError::NonMonotoneGrid(4))
        );
        assert!(synthesize_spectrum(&[LinePeak::new(1.0, -1.0, 1.0)], &grid, 0.0, 0).is_err());
    }
}
