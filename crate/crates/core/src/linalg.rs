//! Small dense and banded linear solvers.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    /// Inverse of a symmetric positive (semi)definite matrix by Gauss-Jordan
    /// elimination with full diagonal pivoting. Returns `None` when a pivot
    /// falls below `rel_tol` times the largest diagonal entry.
    pub fn spd_inverse(&self, rel_tol: f64) -> Option<DenseMatrix> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = vec![0.0; n * n];
        for i in 0..n {
            inv[i * n + i] = 1.0;
        }
        let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return None;
        }
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col].abs() <= rel_tol * scale {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                    inv.swap(piv * n + c, col * n + c);
                }
            }
            let p = a[col * n + col];
            for c in 0..n {
                a[col * n + c] /= p;
                inv[col * n + c] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0.0 {
                    continue;
                }
                for c in 0..n {
                    a[r * n + c] -= f * a[col * n + c];
                    inv[r * n + c] -= f * inv[col * n + c];
                }
            }
        }
        Some(DenseMatrix { n, data: inv })
    }

    /// Solves `self · x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return None;
        }
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col].abs() <= 1e-300 {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                }
                x.swap(piv, col);
            }
            for r in col + 1..n {
                let f = a[r * n + col] / a[col * n + col];
                if f == 0.0 {
                    continue;
                }
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
                x[r] -= f * x[col];
            }
        }
        for r in (0..n).rev() {
            let mut acc = x[r];
            for c in r + 1..n {
                acc -= a[r * n + c] * x[c];
            }
            x[r] = acc / a[r * n + r];
        }
        Some(x)
    }
}

/// Symmetric positive-definite banded matrix stored as its lower band.
///
/// Row `i` stores columns `i - bw ..= i` in ascending order:
/// `band[i * (bw + 1) + (bw - d)]` holds entry `(i, i - d)`.
#[derive(Debug, Clone)]
pub struct BandedSpd {
    n: usize,
    bw: usize,
    band: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotPositiveDefinite {
    pub row: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..n {
        s += a[k] * b[k];
    }
    s
}

impl BandedSpd {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            bw: bandwidth,
            band: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    pub fn clear(&mut self) {
        self.band.iter_mut().for_each(|v| *v = 0.0);
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        (d <= self.bw).then(|| r * (self.bw + 1) + (self.bw - d))
    }

    /// Adds `v` to entry (i, j) (and implicitly (j, i)). Requires |i − j| ≤ bw.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.band[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.band[s])
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..i {
                let a = self.get(i, j);
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += self.get(i, i) * x[i];
        }
        y
    }

    /// In-place Cholesky factorization A = L Lᵀ.
    pub fn factor(mut self) -> Result<BandedCholesky, NotPositiveDefinite> {
        let bw = self.bw;
        let w = bw + 1;
        let n = self.n;
        for j in 0..n {
            let kmin = j.saturating_sub(bw);
            let row_j = j * w + (bw - (j - kmin));
            let len = j - kmin;
            let diag = self.band[j * w + bw] - dot(&self.band[row_j..row_j + len], &self.band[row_j..row_j + len]);
            if !(diag > 0.0) {
                return Err(NotPositiveDefinite { row: j });
            }
            let ljj = diag.sqrt();
            self.band[j * w + bw] = ljj;
            let imax = (j + bw).min(n - 1);
            for i in (j + 1)..=imax {
                // columns max(i − bw, j − bw) .. j of rows i and j
                let k0 = i.saturating_sub(bw);
                let len = j - k0;
                let a = i * w + (bw - (i - k0));
                let b = j * w + (bw - (j - k0));
                let (lo, hi) = self.band.split_at_mut(i * w);
                let s = hi[a - i * w + len] - dot(&hi[a - i * w..a - i * w + len], &lo[b..b + len]);
                hi[a - i * w + len] = s / ljj;
            }
        }
        Ok(BandedCholesky { n, bw, l: self.band })
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let bw = self.bw;
        let w = bw + 1;
        // L y = b
        for i in 0..self.n {
            let k0 = i.saturating_sub(bw);
            let row = i * w + (bw - (i - k0));
            let s = b[i] - dot(&self.l[row..row + (i - k0)], &b[k0..i]);
            b[i] = s / self.l[i * w + bw];
        }
        // Lᵀ x = y
        for i in (0..self.n).rev() {
            let bi = b[i] / self.l[i * w + bw];
            b[i] = bi;
            let k0 = i.saturating_sub(bw);
            let row = i * w + (bw - (i - k0));
            for (bk, l) in b[k0..i].iter_mut().zip(&self.l[row..row + (i - k0)]) {
                *bk -= l * bi;
            }
        }
    }
}
