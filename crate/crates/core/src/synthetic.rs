//! Seeded bias-series fixtures mimicking the low-E⊥ ("point1") and
//! high-E⊥ ("point3") calibration spots.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::electrometry::{resonance_model, BiasRecord, BiasSeries, FieldSource};
use crate::spin::{SpinError, SpinSystem};

/// Linear field-vs-bias fixture with Gaussian frequency noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFixture {
    pub system: SpinSystem,
    pub biases_v: Vec<f64>,
    /// E∥ per applied volt, (MV/cm)/V.
    pub e_par_per_volt: f64,
    /// E⊥/E∥.
    pub perp_ratio: f64,
    /// MHz.
    pub sigma_f: f64,
}

impl SeriesFixture {
    /// Six biases 0–1000 V, E∥ up to 1.0 MV/cm, E⊥/E∥ = 0.005.
    pub fn point1() -> Self {
        Self {
            system: SpinSystem::vsi_with(35.5, -15.0, 1.1 * 15.0),
            biases_v: (0..6).map(|i| 200.0 * i as f64).collect(),
            e_par_per_volt: 1e-3,
            perp_ratio: 0.005,
            sigma_f: 0.3,
        }
    }

    /// Sixteen biases 0–1500 V, E∥ up to 1.5 MV/cm, E⊥/E∥ = 0.19.
    pub fn point3() -> Self {
        Self {
            system: SpinSystem::vsi_with(35.5, -15.0, 1.1 * 15.0),
            biases_v: (0..16).map(|i| 100.0 * i as f64).collect(),
            e_par_per_volt: 1e-3,
            perp_ratio: 0.19,
            sigma_f: 0.3,
        }
    }

    /// (E∥, E⊥) at `bias_v`.
    pub fn field_at(&self, bias_v: f64) -> (f64, f64) {
        let e = self.e_par_per_volt * bias_v;
        (e, self.perp_ratio * e)
    }

    pub fn noiseless(&self) -> Result<BiasSeries, SpinError> {
        self.build(|_| 0.0)
    }

    /// Series with N(0, σ_f) frequency noise drawn from `seed`.
    pub fn sample(&self, seed: u64) -> Result<BiasSeries, SpinError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, self.sigma_f).expect("σ_f is finite and non-negative");
        self.build(|_| normal.sample(&mut rng))
    }

    fn build(&self, mut noise: impl FnMut(usize) -> f64) -> Result<BiasSeries, SpinError> {
        let mut records = Vec::with_capacity(self.biases_v.len());
        for (i, &bias) in self.biases_v.iter().enumerate() {
            let (e_par, e_perp) = self.field_at(bias);
            let f = resonance_model(&self.system, e_par, e_perp)?;
            records.push(BiasRecord {
                bias_v: bias,
                e_par,
                e_perp,
                f_mhz: f + noise(i),
                f_sigma_mhz: Some(self.sigma_f),
            });
        }
        Ok(BiasSeries {
            records,
            spot: None,
            source: FieldSource::Synthetic,
        })
    }
}
