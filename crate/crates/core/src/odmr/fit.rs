use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::lm::{LevenbergMarquardt, LmProblem};
use super::spectrum::{LinePeak, OdmrSpectrum};
use super::OdmrError;

/// Moving-average window (bins) used by auto-initialization.
const SMOOTHING_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    pub lm: LevenbergMarquardt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitWarning {
    /// JᵀJ is singular at the optimum; some parameter is not determined by
    /// the data (typically more peaks requested than resolvable).
    DegenerateCovariance,
    /// Two fitted lines sit closer than half a linewidth.
    UnresolvedPeaks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Sorted by center frequency.
    pub peaks: Vec<LinePeak>,
    pub baseline: f64,
    /// 1σ on each peak center, MHz, aligned with `peaks`.
    pub center_uncertainties: Vec<f64>,
    /// 1σ on (amplitude, center, fwhm) per peak.
    pub peak_uncertainties: Vec<[f64; 3]>,
    pub baseline_uncertainty: f64,
    /// sqrt(mean squared residual), contrast units.
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
    pub warnings: Vec<FitWarning>,
}

impl FitResult {
    /// Peak with the largest |amplitude| and its center uncertainty.
    pub fn dominant(&self) -> Option<(LinePeak, f64)> {
        self.peaks
            .iter()
            .zip(&self.center_uncertainties)
            .max_by(|a, b| a.0.amplitude.abs().total_cmp(&b.0.amplitude.abs()))
            .map(|(p, s)| (*p, *s))
    }
}

struct LorentzProblem<'a> {
    freqs: &'a [f64],
    contrast: &'a [f64],
    n_peaks: usize,
}

impl LmProblem for LorentzProblem<'_> {
    fn n_params(&self) -> usize {
        1 + 3 * self.n_peaks
    }

    fn n_residuals(&self) -> usize {
        self.freqs.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        for (i, (&f, &y)) in self.freqs.iter().zip(self.contrast).enumerate() {
            let mut model = p[0];
            for k in 0..self.n_peaks {
                let (a, c, g) = (p[1 + 3 * k], p[2 + 3 * k], p[3 + 3 * k]);
                let hw = 0.5 * g;
                let d = f - c;
                model += a * hw * hw / (d * d + hw * hw);
            }
            out[i] = model - y;
        }
    }

    fn jacobian(&self, p: &[f64], out: &mut [f64]) {
        let n = self.n_params();
        for (i, &f) in self.freqs.iter().enumerate() {
            let row = &mut out[i * n..(i + 1) * n];
            row[0] = 1.0;
            for k in 0..self.n_peaks {
                let (a, c, g) = (p[1 + 3 * k], p[2 + 3 * k], p[3 + 3 * k]);
                let hw = 0.5 * g;
                let d = f - c;
                let den = d * d + hw * hw;
                let l = hw * hw / den;
                row[1 + 3 * k] = l;
                row[2 + 3 * k] = a * 2.0 * hw * hw * d / (den * den);
                row[3 + 3 * k] = a * hw * d * d / (den * den);
            }
        }
    }

    fn is_admissible(&self, p: &[f64]) -> bool {
        (0..self.n_peaks).all(|k| p[3 + 3 * k] > 0.0) && p.iter().all(|v| v.is_finite())
    }
}

pub fn fit_spectrum(
    spec: &OdmrSpectrum,
    n_peaks: usize,
    init: Option<&[LinePeak]>,
) -> Result<FitResult, OdmrError> {
    fit_spectrum_with(spec, n_peaks, init, &FitOptions::default())
}

/// Fits `n_peaks` Lorentzians plus a constant baseline.
///
/// Without `init`, starting values come from a moving-average smoothed copy
/// of the spectrum: the strongest local extrema relative to the median
/// contrast, with widths from their half-maximum crossings.
pub fn fit_spectrum_with(
    spec: &OdmrSpectrum,
    n_peaks: usize,
    init: Option<&[LinePeak]>,
    opts: &FitOptions,
) -> Result<FitResult, OdmrError> {
    if n_peaks != 1 && n_peaks != 2 {
        return Err(OdmrError::UnsupportedPeakCount(n_peaks));
    }
    let (baseline0, peaks0) = match init {
        Some(peaks) => {
            if peaks.len() != n_peaks {
                return Err(OdmrError::InvalidPeak("init length differs from n_peaks"));
            }
            for p in peaks {
                p.validate()?;
            }
            (median(spec.contrast()), peaks.to_vec())
        }
        None => auto_initialize(spec, n_peaks)?,
    };

    let mut x0 = vec![baseline0];
    for p in &peaks0 {
        x0.extend_from_slice(&[p.amplitude, p.center, p.fwhm]);
    }
    let problem = LorentzProblem {
        freqs: spec.freqs(),
        contrast: spec.contrast(),
        n_peaks,
    };
    let out = opts.lm.minimize(&problem, &x0);

    let m = spec.len();
    let n = problem.n_params();
    let dof = m.saturating_sub(n).max(1) as f64;
    let scale = spec.contrast().iter().fold(0.0f64, |a, c| a.max(c.abs()));
    // Residual variance, floored at working precision so an exact fit still
    // reports a (tiny) positive uncertainty.
    let floor = (f64::EPSILON * scale.max(f64::MIN_POSITIVE)).powi(2);
    let variance = (out.cost / dof).max(floor);

    let mut warnings = Vec::new();
    let mut sigmas = vec![f64::INFINITY; n];
    match out.normal_matrix.spd_inverse(1e-13) {
        Some(inv) => {
            for (j, s) in sigmas.iter_mut().enumerate() {
                let v = inv.get(j, j) * variance;
                if v.is_finite() && v > 0.0 {
                    *s = v.sqrt();
                } else {
                    warnings.push(FitWarning::DegenerateCovariance);
                }
            }
        }
        None => warnings.push(FitWarning::DegenerateCovariance),
    }
    warnings.dedup();

    let p = &out.params;
    let total_amp: f64 = (0..n_peaks).map(|k| p[1 + 3 * k].abs()).sum();
    let mut fitted: Vec<(LinePeak, [f64; 3])> = (0..n_peaks)
        .map(|k| {
            let peak = LinePeak {
                center: p[2 + 3 * k],
                fwhm: p[3 + 3 * k],
                amplitude: p[1 + 3 * k],
                population_weight: if total_amp > 0.0 {
                    p[1 + 3 * k].abs() / total_amp
                } else {
                    0.0
                },
            };
            (peak, [sigmas[1 + 3 * k], sigmas[2 + 3 * k], sigmas[3 + 3 * k]])
        })
        .collect();
    fitted.sort_by(|a, b| a.0.center.total_cmp(&b.0.center));
    if n_peaks == 2 {
        let (a, b) = (&fitted[0].0, &fitted[1].0);
        if (b.center - a.center).abs() < 0.5 * a.fwhm.max(b.fwhm) {
            warnings.push(FitWarning::UnresolvedPeaks);
        }
    }

    Ok(FitResult {
        peaks: fitted.iter().map(|f| f.0).collect(),
        baseline: p[0],
        center_uncertainties: fitted.iter().map(|f| f.1[1]).collect(),
        peak_uncertainties: fitted.iter().map(|f| f.1).collect(),
        baseline_uncertainty: sigmas[0],
        residual_rms: (out.cost / m as f64).sqrt(),
        converged: out.converged,
        iterations: out.iterations,
        warnings,
    })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

fn auto_initialize(spec: &OdmrSpectrum, n_peaks: usize) -> Result<(f64, Vec<LinePeak>), OdmrError> {
    let freqs = spec.freqs();
    let smooth = moving_average(spec.contrast(), SMOOTHING_WINDOW);
    let baseline = median(spec.contrast());
    let dev: Vec<f64> = smooth.iter().map(|s| s - baseline).collect();
    let strongest = dev
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if strongest == 0.0 {
        return Err(OdmrError::NoPeakFound);
    }
    let sign = strongest.signum();
    let height: Vec<f64> = dev.iter().map(|d| d * sign).collect();

    let n = height.len();
    let mut candidates: Vec<usize> = (1..n - 1)
        .filter(|&i| height[i] > 0.0 && height[i] >= height[i - 1] && height[i] > height[i + 1])
        .collect();
    if candidates.is_empty() {
        // Monotone flank: take the global extremum even at the edge.
        let i = (0..n).max_by(|&a, &b| height[a].total_cmp(&height[b])).unwrap_or(0);
        if height[i] <= 0.0 {
            return Err(OdmrError::NoPeakFound);
        }
        candidates.push(i);
    }
    candidates.sort_by(|&a, &b| height[b].total_cmp(&height[a]));

    let step = (freqs[n - 1] - freqs[0]) / (n - 1) as f64;
    let width_at = |i: usize| -> f64 {
        let half = 0.5 * height[i];
        let crossing = |dir: isize| -> Option<f64> {
            let mut j = i as isize;
            while j + dir >= 0 && ((j + dir) as usize) < n {
                let k = (j + dir) as usize;
                if height[k] < half {
                    let (f0, f1) = (freqs[j as usize], freqs[k]);
                    let (h0, h1) = (height[j as usize], height[k]);
                    return Some(f0 + (half - h0) * (f1 - f0) / (h1 - h0));
                }
                j += dir;
            }
            None
        };
        let w = match (crossing(-1), crossing(1)) {
            (Some(l), Some(r)) => r - l,
            (Some(l), None) => 2.0 * (freqs[i] - l),
            (None, Some(r)) => 2.0 * (r - freqs[i]),
            (None, None) => freqs[n - 1] - freqs[0],
        };
        w.max(2.0 * step)
    };

    let first = candidates[0];
    let w1 = width_at(first);
    let mut peaks = vec![LinePeak::new(freqs[first], w1, dev[first])];
    if n_peaks == 2 {
        let second = candidates
            .iter()
            .copied()
            .find(|&i| (freqs[i] - freqs[first]).abs() >= 0.5 * w1);
        match second {
            Some(i) => peaks.push(LinePeak::new(freqs[i], width_at(i), dev[i])),
            None => {
                // Nothing resolvable: split the single feature.
                peaks[0].amplitude *= 0.5;
                peaks.push(LinePeak::new(freqs[first] + 0.25 * w1, w1, peaks[0].amplitude));
            }
        }
    }
    Ok((baseline, peaks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odmr::{linear_grid, synthesize_spectrum, SpectrumMeta};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn exact_single_recovery() {
        let grid = linear_grid(0.0, 140.0, 281);
        let truth = LinePeak::new(67.3, 8.0, 0.01);
        let s = synthesize_spectrum(&[truth], &grid, 0.0, 0).unwrap();
        let fit = fit_spectrum(&s, 1, None).unwrap();
        assert!(fit.converged);
        let p = fit.peaks[0];
        assert!(rel(p.center, 67.3) < 1e-8);
        assert!(rel(p.fwhm, 8.0) < 1e-8);
        assert!(rel(p.amplitude, 0.01) < 1e-8);
        assert!(fit.center_uncertainties[0] > 0.0);
    }

    #[test]
    fn two_peak_mixture() {
        let grid = linear_grid(10.0, 100.0, 181);
        let truth = [LinePeak::new(70.0, 8.0, 0.01), LinePeak::new(40.0, 8.0, 0.01)];
        let s = synthesize_spectrum(&truth, &grid, 0.0005, 7).unwrap();
        let fit = fit_spectrum(&s, 2, None).unwrap();
        assert!(fit.converged);
        assert!((fit.peaks[0].center - 40.0).abs() < 1.0);
        assert!((fit.peaks[1].center - 70.0).abs() < 1.0);
        assert!(fit.warnings.is_empty());
    }

    #[test]
    fn given_initial_values() {
        let grid = linear_grid(0.0, 140.0, 281);
        let s = synthesize_spectrum(&[LinePeak::new(34.0, 8.0, 0.01)], &grid, 0.0, 0).unwrap();
        let fit = fit_spectrum(&s, 1, Some(&[LinePeak::new(30.0, 5.0, 0.02)])).unwrap();
        assert!((fit.peaks[0].center - 34.0).abs() < 1e-8);
    }

    #[test]
    fn dip_convention() {
        let grid = linear_grid(0.0, 140.0, 281);
        let s = synthesize_spectrum(&[LinePeak::new(70.0, 8.0, -0.01)], &grid, 0.0, 0).unwrap();
        let fit = fit_spectrum(&s, 1, None).unwrap();
        assert!((fit.peaks[0].amplitude + 0.01).abs() < 1e-10);
    }

    #[test]
    fn overfit_single_line_is_flagged() {
        let grid = linear_grid(0.0, 140.0, 281);
        let s = synthesize_spectrum(&[LinePeak::new(70.0, 8.0, 0.01)], &grid, 0.0, 0).unwrap();
        let fit = fit_spectrum(&s, 2, None).unwrap();
        assert!(!fit.warnings.is_empty(), "{:?}", fit);
    }

    #[test]
    fn flat_spectrum_has_no_peak() {
        let grid = linear_grid(0.0, 140.0, 64);
        let s = OdmrSpectrum::new(grid, vec![0.5; 64], SpectrumMeta::default()).unwrap();
        assert_eq!(fit_spectrum(&s, 1, None), Err(OdmrError::NoPeakFound));
    }

    #[test]
    fn bad_peak_count() {
        let grid = linear_grid(0.0, 140.0, 64);
        let s = synthesize_spectrum(&[LinePeak::new(70.0, 8.0, 0.01)], &grid, 0.0, 0).unwrap();
        assert_eq!(fit_spectrum(&s, 3, None), Err(OdmrError::UnsupportedPeakCount(3)));
    }

    #[test]
    fn iteration_cap() {
        let grid = linear_grid(0.0, 140.0, 281);
        let s = synthesize_spectrum(&[LinePeak::new(70.0, 8.0, 0.01)], &grid, 0.001, 3).unwrap();
        let opts = FitOptions {
            lm: LevenbergMarquardt {
                max_iter: 1,
                ..Default::default()
            },
        };
        let fit = fit_spectrum_with(&s, 1, Some(&[LinePeak::new(60.0, 20.0, 0.005)]), &opts).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 1);
    }
}
