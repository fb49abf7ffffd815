use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::DenseMatrix;

/// A nonlinear least-squares problem with an analytic Jacobian.
pub trait LmProblem {
    fn n_params(&self) -> usize;
    fn n_residuals(&self) -> usize;
    /// Writes residuals r_i(p) into `out`.
    fn residuals(&self, params: &[f64], out: &mut [f64]);
    /// Writes the row-major Jacobian ∂r_i/∂p_j into `out`.
    fn jacobian(&self, params: &[f64], out: &mut [f64]);
    /// Rejects parameter vectors outside the model domain.
    fn is_admissible(&self, _params: &[f64]) -> bool {
        true
    }
}

/// Levenberg-Marquardt with multiplicative damping updates and
/// diagonal (Marquardt) scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevenbergMarquardt {
    pub initial_lambda: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
    pub max_iter: usize,
    /// Stop once a successful step changes the cost by less than this
    /// fraction.
    pub rel_cost_tol: f64,
    /// Damping beyond which no downhill step exists at working precision.
    pub max_lambda: f64,
}

impl Default for LevenbergMarquardt {
    fn default() -> Self {
        Self {
            initial_lambda: 1e-3,
            lambda_up: 10.0,
            lambda_down: 10.0,
            max_iter: 200,
            rel_cost_tol: 1e-10,
            max_lambda: 1e16,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    /// Σ r_i² at `params`.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// JᵀJ at `params`, row-major.
    pub normal_matrix: DenseMatrix,
}

impl LevenbergMarquardt {
    pub fn minimize<P: LmProblem>(&self, problem: &P, initial: &[f64]) -> LmOutcome {
        let n = problem.n_params();
        let m = problem.n_residuals();
        let mut params = initial.to_vec();
        let mut r = vec![0.0; m];
        let mut jac = vec![0.0; m * n];
        problem.residuals(&params, &mut r);
        let mut cost = sum_sq(&r);
        let mut lambda = self.initial_lambda;
        let mut converged = false;
        let mut iterations = 0;
        let mut trial = vec![0.0; n];
        let mut r_trial = vec![0.0; m];

        while iterations < self.max_iter {
            iterations += 1;
            if cost == 0.0 {
                converged = true;
                break;
            }
            problem.jacobian(&params, &mut jac);
            let (jtj, grad) = normal_equations(&jac, &r, m, n);

            let mut accepted = false;
            while lambda <= self.max_lambda {
                let mut damped = jtj.clone();
                for j in 0..n {
                    let d = jtj.get(j, j);
                    damped.add(j, j, lambda * if d > 0.0 { d } else { 1.0 });
                }
                let neg_grad: Vec<f64> = grad.iter().map(|g| -g).collect();
                let step = match damped.solve(&neg_grad) {
                    Some(s) if s.iter().all(|v| v.is_finite()) => s,
                    _ => {
                        lambda *= self.lambda_up;
                        continue;
                    }
                };
                for j in 0..n {
                    trial[j] = params[j] + step[j];
                }
                if !problem.is_admissible(&trial) {
                    lambda *= self.lambda_up;
                    continue;
                }
                problem.residuals(&trial, &mut r_trial);
                let new_cost = sum_sq(&r_trial);
                if new_cost.is_finite() && new_cost < cost {
                    let rel = (cost - new_cost) / cost;
                    params.copy_from_slice(&trial);
                    r.copy_from_slice(&r_trial);
                    cost = new_cost;
                    lambda /= self.lambda_down;
                    accepted = true;
                    if rel < self.rel_cost_tol {
                        converged = true;
                    }
                    break;
                }
                lambda *= self.lambda_up;
            }
            if !accepted {
                // No downhill step at any damping: stationary to working precision.
                converged = true;
            }
            if converged {
                break;
            }
        }

        problem.jacobian(&params, &mut jac);
        let (normal_matrix, _) = normal_equations(&jac, &r, m, n);
        LmOutcome {
            params,
            cost,
            iterations,
            converged,
            normal_matrix,
        }
    }
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn normal_equations(jac: &[f64], r: &[f64], m: usize, n: usize) -> (DenseMatrix, Vec<f64>) {
    let mut jtj = DenseMatrix::zeros(n);
    let mut grad = vec![0.0; n];
    for i in 0..m {
        let row = &jac[i * n..(i + 1) * n];
        for a in 0..n {
            grad[a] += row[a] * r[i];
            for b in a..n {
                jtj.add(a, b, row[a] * row[b]);
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            jtj.set(a, b, jtj.get(b, a));
        }
    }
    (jtj, grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Float;

    /// Exponential decay y = a exp(−k t).
    struct Decay {
        t: Vec<f64>,
        y: Vec<f64>,
    }

    impl LmProblem for Decay {
        fn n_params(&self) -> usize {
            2
        }
        fn n_residuals(&self) -> usize {
            self.t.len()
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            for (i, (&t, &y)) in self.t.iter().zip(&self.y).enumerate() {
                out[i] = p[0] * (-p[1] * t).exp() - y;
            }
        }
        fn jacobian(&self, p: &[f64], out: &mut [f64]) {
            for (i, &t) in self.t.iter().enumerate() {
                let e = (-p[1] * t).exp();
                out[2 * i] = e;
                out[2 * i + 1] = -p[0] * t * e;
            }
        }
    }

    #[test]
    fn recovers_exact_decay() {
        let t: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let y = t.iter().map(|&t| 2.5 * (-1.3 * t).exp()).collect();
        let out = LevenbergMarquardt::default().minimize(&Decay { t, y }, &[1.0, 0.5]);
        assert!(out.converged);
        assert!((out.params[0] - 2.5).abs() < 1e-10);
        assert!((out.params[1] - 1.3).abs() < 1e-10);
    }

    #[test]
    fn iteration_cap_reports_unconverged() {
        let t: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let y = t.iter().map(|&t| 2.5 * (-1.3 * t).exp()).collect();
        let lm = LevenbergMarquardt {
            max_iter: 1,
            ..Default::default()
        };
        let out = lm.minimize(&Decay { t, y }, &[0.1, 5.0]);
        assert!(!out.converged);
        assert_eq!(out.iterations, 1);
    }
}
