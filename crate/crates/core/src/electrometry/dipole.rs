use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{golden_section, resonance_model, BiasSeries, ElectrometryError};
use crate::spin::SpinSystem;

/// Records used for the parallel calibration must satisfy E⊥/E∥ below this.
pub const POINT1_MAX_PERP_RATIO: f64 = 0.01;

/// Value with 1σ uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipoleFit {
    /// MHz/(MV/cm).
    pub d_par_over_h: Estimate,
    /// MHz.
    pub zfs_d: Estimate,
    /// |d⊥/d∥|.
    pub ratio_r: Option<Estimate>,
    /// Covariance of (slope, intercept) of f = intercept + slope·E∥.
    pub covariance: [[f64; 2]; 2],
    pub chi2: f64,
    pub dof: usize,
}

impl DipoleFit {
    pub fn with_ratio(mut self, ratio: Estimate) -> Self {
        self.ratio_r = Some(ratio);
        self
    }

    /// Spin system with the fitted D and d∥; d⊥ from `ratio_r` when present.
    pub fn spin_system(&self) -> SpinSystem {
        let r = self.ratio_r.map_or(0.0, |e| e.value);
        SpinSystem::vsi_with(self.zfs_d.value, self.d_par_over_h.value, r * self.d_par_over_h.value.abs())
    }
}

/// Weighted linear regression of f against E∥.
pub fn fit_dipole_parallel(series: &BiasSeries) -> Result<DipoleFit, ElectrometryError> {
    series.validate()?;
    if series.len() < 3 {
        return Err(ElectrometryError::DegenerateDesign("at least 3 records are required"));
    }
    let mut worst: Option<(usize, f64)> = None;
    for (i, r) in series.records.iter().enumerate() {
        let ratio = if r.e_perp == 0.0 {
            0.0
        } else if r.e_par == 0.0 {
            f64::INFINITY
        } else {
            r.e_perp / r.e_par
        };
        if ratio >= POINT1_MAX_PERP_RATIO && worst.is_none_or(|(_, w)| ratio > w) {
            worst = Some((i, ratio));
        }
    }
    if let Some((index, ratio)) = worst {
        return Err(ElectrometryError::PerpRatioTooLarge {
            index,
            ratio,
            limit: POINT1_MAX_PERP_RATIO,
        });
    }

    let sigmas = series.sigmas()?;
    let (mut s, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (r, sig) in series.records.iter().zip(&sigmas) {
        let w = 1.0 / (sig * sig);
        s += w;
        sx += w * r.e_par;
        sxx += w * r.e_par * r.e_par;
        sy += w * r.f_mhz;
        sxy += w * r.e_par * r.f_mhz;
    }
    let det = s * sxx - sx * sx;
    if !(det > 1e-12 * s * sxx) {
        return Err(ElectrometryError::DegenerateDesign("all records share the same E∥"));
    }
    let slope = (s * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let var_slope = s / det;
    let var_intercept = sxx / det;
    let cov = -sx / det;
    let chi2 = series
        .records
        .iter()
        .zip(&sigmas)
        .map(|(r, sig)| ((intercept + slope * r.e_par - r.f_mhz) / sig).powi(2))
        .sum();

    Ok(DipoleFit {
        d_par_over_h: Estimate {
            value: 0.5 * slope,
            sigma: 0.5 * var_slope.sqrt(),
        },
        zfs_d: Estimate {
            value: 0.5 * intercept,
            sigma: 0.5 * var_intercept.sqrt(),
        },
        ratio_r: None,
        covariance: [[var_slope, cov], [cov, var_intercept]],
        chi2,
        dof: series.len() - 2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioScanOptions {
    pub r_max: f64,
    pub grid_step: f64,
    pub refine_tol: f64,
}

impl Default for RatioScanOptions {
    fn default() -> Self {
        Self {
            r_max: 2.0,
            grid_step: 1e-3,
            refine_tol: 1e-5,
        }
    }
}

/// Model frequency against E∥ along the series' typical E⊥/E∥ for one r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCurve {
    pub ratio_r: f64,
    pub e_par: Vec<f64>,
    pub f_mhz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioFit {
    pub ratio: Estimate,
    /// Δχ² = 1 interval.
    pub interval: (f64, f64),
    pub chi2_min: f64,
    pub d_par_over_h: f64,
    pub zfs_d: f64,
    /// χ² at each grid point of the coarse scan.
    pub scan: Vec<(f64, f64)>,
    pub curves: Vec<ModelCurve>,
}

pub fn fit_ratio_perp(series: &BiasSeries, d_par_over_h: f64, zfs_d: f64) -> Result<RatioFit, ElectrometryError> {
    fit_ratio_perp_with(series, d_par_over_h, zfs_d, &RatioScanOptions::default())
}

/// Least squares over r = |d⊥/d∥| with d∥ and D held fixed.
pub fn fit_ratio_perp_with(
    series: &BiasSeries,
    d_par_over_h: f64,
    zfs_d: f64,
    opts: &RatioScanOptions,
) -> Result<RatioFit, ElectrometryError> {
    series.validate()?;
    if series.len() < 3 {
        return Err(ElectrometryError::DegenerateDesign("at least 3 records are required"));
    }
    if !(d_par_over_h.is_finite() && d_par_over_h != 0.0 && zfs_d.is_finite()) {
        return Err(ElectrometryError::InvalidInput("d∥ must be finite and non-zero"));
    }
    if !(opts.r_max > 0.0 && opts.grid_step > 0.0 && opts.refine_tol > 0.0) {
        return Err(ElectrometryError::InvalidInput("scan options must be positive"));
    }
    let sigmas = series.sigmas()?;
    let system = |r: f64| SpinSystem::vsi_with(zfs_d, d_par_over_h, r * d_par_over_h.abs());
    let chi2_at = |r: f64| -> Result<f64, ElectrometryError> {
        let sys = system(r);
        let mut acc = 0.0;
        for (rec, sig) in series.records.iter().zip(&sigmas) {
            let f = resonance_model(&sys, rec.e_par, rec.e_perp)?;
            acc += ((f - rec.f_mhz) / sig).powi(2);
        }
        Ok(acc)
    };
    // Surfaces invalid systems or fields once; afterwards evaluation cannot fail.
    chi2_at(opts.r_max)?;
    let mut chi2 = |r: f64| chi2_at(r).unwrap_or(f64::INFINITY);

    let n_grid = (opts.r_max / opts.grid_step).round() as usize;
    let scan: Vec<(f64, f64)> = (0..=n_grid)
        .map(|i| {
            let r = (i as f64 * opts.grid_step).min(opts.r_max);
            (r, chi2(r))
        })
        .collect();
    let (mut best, mut lo_chi, mut hi_chi) = (0, f64::INFINITY, f64::NEG_INFINITY);
    for (i, &(_, c)) in scan.iter().enumerate() {
        if c < scan[best].1 {
            best = i;
        }
        lo_chi = lo_chi.min(c);
        hi_chi = hi_chi.max(c);
    }
    if !(hi_chi - lo_chi >= 1.0) {
        return Err(ElectrometryError::IllConditionedRatio {
            delta_chi2: hi_chi - lo_chi,
        });
    }

    let a = scan[best.saturating_sub(1)].0;
    let b = scan[(best + 1).min(n_grid)].0;
    let (mut r_hat, mut chi2_min) = golden_section(&mut chi2, a, b, opts.refine_tol);
    if scan[best].1 < chi2_min {
        (r_hat, chi2_min) = scan[best];
    }
    let target = chi2_min + 1.0;

    // Δχ² = 1 crossings: bracket on the grid, then bisect.
    let bisect = |mut inside: f64, mut outside: f64| {
        for _ in 0..60 {
            let mid = 0.5 * (inside + outside);
            if chi2(mid) <= target {
                inside = mid;
            } else {
                outside = mid;
            }
            if (outside - inside).abs() < 0.1 * opts.refine_tol {
                break;
            }
        }
        0.5 * (inside + outside)
    };
    let lower = match scan[..=best].iter().rposition(|&(_, c)| c > target) {
        Some(j) => bisect(r_hat, scan[j].0),
        None => 0.0,
    };
    let upper = match scan[best..].iter().position(|&(_, c)| c > target) {
        Some(j) => bisect(r_hat, scan[best + j].0),
        None => opts.r_max,
    };
    let sigma = (0.5 * (upper - lower)).max(opts.refine_tol);

    let curves = model_curves(series, &system)?;
    Ok(RatioFit {
        ratio: Estimate { value: r_hat, sigma },
        interval: (lower, upper),
        chi2_min,
        d_par_over_h,
        zfs_d,
        scan,
        curves,
    })
}

const CURVE_RATIOS: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];
const CURVE_POINTS: usize = 51;

fn model_curves<S: Fn(f64) -> SpinSystem>(series: &BiasSeries, system: &S) -> Result<Vec<ModelCurve>, ElectrometryError> {
    let e_max = series.records.iter().map(|r| r.e_par).fold(0.0, f64::max);
    let mut ratios: Vec<f64> = series
        .records
        .iter()
        .filter(|r| r.e_par > 0.0)
        .map(|r| r.e_perp / r.e_par)
        .collect();
    ratios.sort_by(f64::total_cmp);
    let perp_ratio = if ratios.is_empty() { 0.0 } else { ratios[ratios.len() / 2] };
    let e_par: Vec<f64> = (0..CURVE_POINTS)
        .map(|i| e_max * i as f64 / (CURVE_POINTS - 1) as f64)
        .collect();
    CURVE_RATIOS
        .iter()
        .map(|&r| {
            let sys = system(r);
            let f_mhz = e_par
                .iter()
                .map(|&e| resonance_model(&sys, e, perp_ratio * e))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ModelCurve {
                ratio_r: r,
                e_par: e_par.clone(),
                f_mhz,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::electrometry::{BiasRecord, FieldSource};

    fn affine_series(d_par: f64, zfs: f64, es: &[f64], perp_ratio: f64) -> BiasSeries {
        let records = es
            .iter()
            .enumerate()
            .map(|(i, &e)| BiasRecord {
                bias_v: 100.0 * i as f64,
                e_par: e,
                e_perp: perp_ratio * e,
                f_mhz: 2.0 * zfs + 2.0 * d_par * e,
                f_sigma_mhz: Some(0.3),
            })
            .collect();
        BiasSeries::new(records, FieldSource::Synthetic).unwrap()
    }

    fn model_series(sys: &SpinSystem, es: &[f64], perp_ratio: f64) -> BiasSeries {
        let records = es
            .iter()
            .enumerate()
            .map(|(i, &e)| BiasRecord {
                bias_v: 100.0 * i as f64,
                e_par: e,
                e_perp: perp_ratio * e,
                f_mhz: resonance_model(sys, e, perp_ratio * e).unwrap(),
                f_sigma_mhz: Some(0.3),
            })
            .collect();
        BiasSeries::new(records, FieldSource::Synthetic).unwrap()
    }

    #[test]
    fn exact_three_point_recovery() {
        let fit = fit_dipole_parallel(&affine_series(-15.0, 35.5, &[0.0, 0.4, 1.0], 0.0)).unwrap();
        assert!((fit.d_par_over_h.value + 15.0).abs() / 15.0 < 1e-10);
        assert!((fit.zfs_d.value - 35.5).abs() / 35.5 < 1e-10);
        assert!(fit.d_par_over_h.sigma > 0.0 && fit.zfs_d.sigma > 0.0);
        assert!(fit.chi2 < 1e-18);
    }

    #[test]
    fn standard_errors_match_closed_form() {
        // Equal weights: var(slope) = σ²/Σ(x−x̄)².
        let s = affine_series(-15.0, 35.5, &[0.0, 0.5, 1.0, 1.5], 0.0);
        let fit = fit_dipole_parallel(&s).unwrap();
        let sxx: f64 = [0.75f64, 0.25, 0.25, 0.75].iter().map(|d| d * d).sum();
        assert!((fit.covariance[0][0] - 0.09 / sxx).abs() < 1e-14);
    }

    #[test]
    fn perp_ratio_precondition_names_worst() {
        let mut s = affine_series(-15.0, 35.5, &[0.0, 0.5, 1.0, 1.5], 0.0);
        s.records[2].e_perp = 0.05;
        s.records[3].e_perp = 0.003;
        match fit_dipole_parallel(&s) {
            Err(ElectrometryError::PerpRatioTooLarge { index, ratio, .. }) => {
                assert_eq!(index, 2);
                assert!((ratio - 0.05).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_designs() {
        let two = affine_series(-15.0, 35.5, &[0.0, 1.0], 0.0);
        assert!(matches!(fit_dipole_parallel(&two), Err(ElectrometryError::DegenerateDesign(_))));
        let mut same = affine_series(-15.0, 35.5, &[1.0, 1.0, 1.0], 0.0);
        same.records[1].f_mhz += 0.1;
        assert!(matches!(fit_dipole_parallel(&same), Err(ElectrometryError::DegenerateDesign(_))));
    }

    #[test]
    fn ratio_zero_noiseless() {
        let sys = SpinSystem::vsi_with(35.5, -15.0, 0.0);
        let es: Vec<f64> = (0..16).map(|i| 0.1 * i as f64).collect();
        let fit = fit_ratio_perp(&model_series(&sys, &es, 0.19), -15.0, 35.5).unwrap();
        assert!(fit.ratio.value < 1e-4, "{}", fit.ratio.value);
        assert_eq!(fit.interval.0, 0.0);
        assert_eq!(fit.curves.len(), 5);
    }

    #[test]
    fn ratio_noiseless_interior() {
        let sys = SpinSystem::vsi_with(35.5, -15.0, 1.1 * 15.0);
        let es: Vec<f64> = (0..16).map(|i| 0.1 * i as f64).collect();
        let fit = fit_ratio_perp(&model_series(&sys, &es, 0.19), -15.0, 35.5).unwrap();
        assert!((fit.ratio.value - 1.1).abs() < 1e-4, "{}", fit.ratio.value);
        assert!(fit.interval.0 < 1.1 && fit.interval.1 > 1.1);
        assert!(fit.ratio.sigma > 0.0);
    }

    #[test]
    fn no_transverse_field_is_ill_conditioned() {
        let sys = SpinSystem::vsi_with(35.5, -15.0, 16.5);
        let es: Vec<f64> = (0..6).map(|i| 0.2 * i as f64).collect();
        assert!(matches!(
            fit_ratio_perp(&model_series(&sys, &es, 0.0), -15.0, 35.5),
            Err(ElectrometryError::IllConditionedRatio { .. })
        ));
    }

    #[test]
    fn fit_builds_spin_system() {
        let fit = fit_dipole_parallel(&affine_series(-15.0, 35.5, &[0.0, 0.4, 1.0], 0.0))
            .unwrap()
            .with_ratio(Estimate { value: 1.1, sigma: 0.06 });
        let sys = fit.spin_system();
        assert!((sys.d_perp_over_h - 16.5).abs() < 1e-9);
    }
}
