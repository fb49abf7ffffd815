use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::constants::BOHR_MHZ_PER_MT;

use super::eigen::eigh;
use super::hamiltonian::{build_hamiltonian, spin_operators};
use super::{CrystalField, SpinError, SpinSystem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// MHz, always positive.
    pub frequency: f64,
    /// Σ |⟨i|S_x|j⟩|² over the states of the two levels.
    pub drive_weight: f64,
}

/// Levels and S_x-allowed transitions of one Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionSet {
    /// All eigenvalues in MHz, ascending (degenerate ones repeated).
    pub eigenvalues: Vec<f64>,
    /// Sorted by ascending frequency.
    pub transitions: Vec<Transition>,
}

impl TransitionSet {
    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        self.transitions.iter().map(|t| t.frequency)
    }

    /// The transition with the largest drive weight.
    pub fn dominant(&self) -> Option<Transition> {
        self.transitions
            .iter()
            .copied()
            .max_by(|a, b| a.drive_weight.total_cmp(&b.drive_weight))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionOptions {
    /// Minimum |⟨i|S_x|j⟩|² for a transition to be reported.
    pub weight_threshold: f64,
    /// Eigenvalues closer than this (relative to max(1, ‖H‖_F)) are merged
    /// into one level.
    pub degeneracy_tolerance: f64,
}

impl Default for TransitionOptions {
    fn default() -> Self {
        Self {
            weight_threshold: 1e-6,
            degeneracy_tolerance: 1e-10,
        }
    }
}

pub fn transition_frequencies(
    sys: &SpinSystem,
    field: &CrystalField,
) -> Result<TransitionSet, SpinError> {
    transition_frequencies_with(sys, field, &TransitionOptions::default())
}

pub fn transition_frequencies_with(
    sys: &SpinSystem,
    field: &CrystalField,
    opts: &TransitionOptions,
) -> Result<TransitionSet, SpinError> {
    let h = build_hamiltonian(sys, field)?;
    let ops = spin_operators(sys.twice_spin)?;
    let eig = eigh(&h);
    let n = eig.dim();
    let values = eig.values();

    // Group eigenvalues into (possibly degenerate) levels.
    let tol = opts.degeneracy_tolerance * h.frobenius_norm().max(1.0);
    let mut levels: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut start = 0;
    for k in 1..=n {
        if k == n || values[k] - values[k - 1] > tol {
            levels.push((start, k));
            start = k;
        }
    }
    let level_energy =
        |&(a, b): &(usize, usize)| values[a..b].iter().sum::<f64>() / (b - a) as f64;

    let mut transitions = Vec::new();
    for (li, lo) in levels.iter().enumerate() {
        for hi in &levels[li + 1..] {
            let mut weight = 0.0;
            for i in lo.0..lo.1 {
                for j in hi.0..hi.1 {
                    weight += ops.sx.sandwich(eig.vector(i), eig.vector(j)).norm_sqr();
                }
            }
            if weight > opts.weight_threshold {
                transitions.push(Transition {
                    frequency: level_energy(hi) - level_energy(lo),
                    drive_weight: weight,
                });
            }
        }
    }
    transitions.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));

    Ok(TransitionSet {
        eigenvalues: values.to_vec(),
        transitions,
    })
}

/// Closed-form resonances for a purely axial E and B:
/// f± = |2(D + d∥/h E∥) ± gμB/h B∥|. Returns `(f_plus, f_minus)`.
pub fn analytic_axial_frequency(sys: &SpinSystem, e_par: f64, b_par: f64) -> (f64, f64) {
    let axial = 2.0 * (sys.zfs_d + sys.d_par_over_h * e_par);
    let zeeman = sys.g_factor * BOHR_MHZ_PER_MT * b_par;
    ((axial + zeeman).abs(), (axial - zeeman).abs())
}
