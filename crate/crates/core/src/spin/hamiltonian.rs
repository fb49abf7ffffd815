use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::constants::BOHR_MHZ_PER_MT;

use super::{CrystalField, SpinError, SpinSystem};

/// Largest supported matrix dimension (S = 3/2).
pub const MAX_DIM: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense complex square matrix of dimension ≤ [`MAX_DIM`], used for spin
/// operators and Hamiltonians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: [[Complex64; MAX_DIM]; MAX_DIM],
}

impl HermitianMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Self {
            dim,
            data: [[ZERO; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i][i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for row in out.data.iter_mut().take(self.dim) {
            for v in row.iter_mut().take(self.dim) {
                *v *= s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.data[i][j] = self.data[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.data[i][j].norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Largest |H_ij − conj(H_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.data[i][j] - self.data[j][i].conj()).norm());
            }
        }
        worst
    }

    /// ⟨u|self|v⟩ for column vectors.
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..self.dim {
            let mut row = ZERO;
            for j in 0..self.dim {
                row += self.data[i][j] * v[j];
            }
            acc += u[i].conj() * row;
        }
        acc
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> [Complex64; MAX_DIM] {
        let mut out = [ZERO; MAX_DIM];
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            for j in 0..self.dim {
                *o += self.data[i][j] * v[j];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i][j]
    }
}

impl IndexMut<(usize, usize)> for HermitianMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i][j]
    }
}

impl Add for HermitianMatrix {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.data[i][j] += rhs.data[i][j];
            }
        }
        self
    }
}

impl Sub for HermitianMatrix {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.data[i][j] -= rhs.data[i][j];
            }
        }
        self
    }
}

impl Mul for HermitianMatrix {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                let a = self.data[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..self.dim {
                    out.data[i][j] += a * rhs.data[k][j];
                }
            }
        }
        out
    }
}

/// Cartesian spin operators in the |m = S, S−1, …, −S⟩ basis.
#[derive(Debug, Clone, Copy)]
pub struct SpinOperators {
    pub sx: HermitianMatrix,
    pub sy: HermitianMatrix,
    pub sz: HermitianMatrix,
}

/// Builds S_x, S_y, S_z for spin `twice_spin / 2` from the ladder operators
/// ⟨m+1|S₊|m⟩ = √(S(S+1) − m(m+1)).
pub fn spin_operators(twice_spin: u32) -> Result<SpinOperators, SpinError> {
    if twice_spin != 2 && twice_spin != 3 {
        return Err(SpinError::UnsupportedSpin { twice_spin });
    }
    let dim = twice_spin as usize + 1;
    let s = twice_spin as f64 / 2.0;
    let mut sz = HermitianMatrix::zeros(dim);
    let mut s_plus = HermitianMatrix::zeros(dim);
    for i in 0..dim {
        let m = s - i as f64;
        sz[(i, i)] = Complex64::new(m, 0.0);
        if i > 0 {
            // row i-1 holds m+1
            s_plus[(i - 1, i)] = Complex64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let s_minus = s_plus.adjoint();
    let sx = (s_plus + s_minus).scale(0.5);
    let mut sy = s_plus - s_minus;
    // (S+ − S−)/(2i) = −i/2 (S+ − S−)
    for i in 0..dim {
        for j in 0..dim {
            sy[(i, j)] *= Complex64::new(0.0, -0.5);
        }
    }
    Ok(SpinOperators { sx, sy, sz })
}

/// Assembles the spin Hamiltonian in MHz.
pub fn build_hamiltonian(
    sys: &SpinSystem,
    field: &CrystalField,
) -> Result<HermitianMatrix, SpinError> {
    sys.validate()?;
    field.validate()?;
    let ops = spin_operators(sys.twice_spin)?;
    let dim = sys.dim();
    let s = sys.spin();

    let gamma = sys.g_factor * BOHR_MHZ_PER_MT;
    let zeeman = ops.sx.scale(gamma * field.b_perp_x)
        + ops.sy.scale(gamma * field.b_perp_y)
        + ops.sz.scale(gamma * field.b_par);

    let sz2 = ops.sz * ops.sz;
    let traceless = sz2 - HermitianMatrix::identity(dim).scale(s * (s + 1.0) / 3.0);
    let axial = traceless.scale(sys.zfs_d + sys.d_par_over_h * field.e_par);

    let sxsy = ops.sx * ops.sy + ops.sy * ops.sx;
    let sx2_sy2 = ops.sx * ops.sx - ops.sy * ops.sy;
    let transverse = (sxsy.scale(field.e_perp_x) + sx2_sy2.scale(field.e_perp_y))
        .scale(-sys.d_perp_over_h);

    let mut h = zeeman + axial + transverse;
    // Enforce exact Hermiticity against rounding in the products above.
    for i in 0..dim {
        h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        for j in (i + 1)..dim {
            let avg = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            h[(i, j)] = avg;
            h[(j, i)] = avg.conj();
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn commutator(a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix {
        a * b - b * a
    }

    #[test]
    fn spin_algebra() {
        for twice in [2, 3] {
            let ops = spin_operators(twice).unwrap();
            let s = twice as f64 / 2.0;
            // [Sx, Sy] = i Sz
            let c = commutator(ops.sx, ops.sy);
            let isz = {
                let mut m = ops.sz;
                for i in 0..m.dim() {
                    for j in 0..m.dim() {
                        m[(i, j)] *= Complex64::new(0.0, 1.0);
                    }
                }
                m
            };
            assert!((c - isz).frobenius_norm() < 1e-14);
            // S² = S(S+1)
            let s2 = ops.sx * ops.sx + ops.sy * ops.sy + ops.sz * ops.sz;
            let target = HermitianMatrix::identity(ops.sz.dim()).scale(s * (s + 1.0));
            assert!((s2 - target).frobenius_norm() < 1e-13);
        }
    }

    #[test]
    fn sz_diagonal_for_three_halves() {
        let ops = spin_operators(3).unwrap();
        let diag: [f64; 4] = core::array::from_fn(|i| ops.sz[(i, i)].re);
        assert_eq!(diag, [1.5, 0.5, -0.5, -1.5]);
    }

    #[test]
    fn zero_field_axial_pattern() {
        let sys = SpinSystem::vsi_with(35.0, -15.0, 16.5);
        let h = build_hamiltonian(&sys, &CrystalField::zero()).unwrap();
        // D [Sz² − 5/4] = D {1, −1, −1, 1}
        let diag: [f64; 4] = core::array::from_fn(|i| h[(i, i)].re);
        assert_eq!(diag, [35.0, -35.0, -35.0, 35.0]);
        assert!(h.trace().norm() < 1e-12);
    }

    #[test]
    fn hermitian_and_traceless() {
        let sys = SpinSystem::vsi_with(35.0, -15.0, 16.5);
        let field = CrystalField {
            e_par: 1.3,
            e_perp_x: 0.4,
            e_perp_y: -0.2,
            b_par: 0.7,
            b_perp_x: 0.3,
            b_perp_y: -1.1,
        };
        let h = build_hamiltonian(&sys, &field).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        assert!(h.trace().norm() < 1e-12);
    }

    #[test]
    fn rejects_unsupported_spin() {
        let sys = SpinSystem::new(1, 35.0, 0.0, 0.0);
        assert_eq!(
            build_hamiltonian(&sys, &CrystalField::zero()),
            Err(SpinError::UnsupportedSpin { twice_spin: 1 })
        );
    }
}
