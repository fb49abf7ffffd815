use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::hamiltonian::{HermitianMatrix, MAX_DIM};

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen {
    dim: usize,
    values: [f64; MAX_DIM],
    /// `vectors[k]` is the k-th normalized eigenvector.
    vectors: [[Complex64; MAX_DIM]; MAX_DIM],
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values[..self.dim]
    }

    pub fn vector(&self, k: usize) -> &[Complex64] {
        &self.vectors[k][..self.dim]
    }

    /// max_k ‖H v_k − λ_k v_k‖.
    pub fn backward_error(&self, h: &HermitianMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.dim {
            let v = self.vector(k);
            let hv = h.mul_vec(v);
            let mut acc = 0.0;
            for i in 0..self.dim {
                acc += (hv[i] - v[i] * self.values[k]).norm_sqr();
            }
            worst = worst.max(acc.sqrt());
        }
        worst
    }
}

/// Cyclic complex Jacobi diagonalization.
///
/// Each rotation first removes the phase of the pivot element with a diagonal
/// unitary, then applies the real symmetric Jacobi rotation that annihilates
/// it.
pub fn eigh(h: &HermitianMatrix) -> HermitianEigen {
    let n = h.dim();
    let mut a = *h;
    let mut v = HermitianMatrix::identity(n);
    let scale = h.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= f64::EPSILON * 1e-3 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b == 0.0 || b <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / b; // e^{iφ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * b);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U = diag(1, e^{-iφ}) · R, with R = [[c, s], [-s, c]] on (p, q).
                let e = phase.conj();
                let u_pp = Complex64::new(c, 0.0);
                let u_pq = Complex64::new(s, 0.0);
                let u_qp = e * (-s);
                let u_qq = e * c;
                // A ← A U (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                // A ← U† A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: [usize; MAX_DIM] = [0, 1, 2, 3];
    order[..n].sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let mut values = [0.0; MAX_DIM];
    let mut vectors = [[Complex64::new(0.0, 0.0); MAX_DIM]; MAX_DIM];
    for (slot, &k) in order[..n].iter().enumerate() {
        values[slot] = a[(k, k)].re;
        for i in 0..n {
            vectors[slot][i] = v[(i, k)];
        }
    }
    HermitianEigen {
        dim: n,
        values,
        vectors,
    }
}
