//! Brute-force minimizer for the per-step composite objective
//!
//! ```text
//! q(w) = (eps/2) ||w||^2 + (eta/2) sum_s c_s ||w - w_s||^2
//!        + <w, g_sum> + lam ||w||_1
//! ```
//!
//! with history weights `c_s = 1` (uniform) or `c_s = s` (linear, 1-based).
//! The objective separates per coordinate; each coordinate is minimized by
//! evaluating `q` directly at the three stationary candidates of the two
//! smooth branches and at zero. No shared code with the production update.

use crate::{Result, TestkitError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistoryWeights {
    Uniform,
    /// `c_s = s`, with s running 1..=len(history).
    LinearInS,
}

#[derive(Debug, Clone)]
pub struct ProxInstance {
    pub epsilon: f64,
    pub eta: f64,
    /// Past iterates `w_1 .. w_{t-1}`.
    pub history: Vec<Vec<f64>>,
    /// Accumulated gradients, already weighted by `c_s` for `LinearInS`.
    pub g_sum: Vec<f64>,
    pub lambda: f64,
    pub weights: HistoryWeights,
}

impl ProxInstance {
    fn weight(&self, s_index: usize) -> f64 {
        match self.weights {
            HistoryWeights::Uniform => 1.0,
            HistoryWeights::LinearInS => (s_index + 1) as f64,
        }
    }

    /// Direct evaluation of the coordinate objective at scalar `w`.
    fn coord_objective(&self, i: usize, w: f64) -> f64 {
        let mut q = 0.5 * self.epsilon * w * w + w * self.g_sum[i] + self.lambda * w.abs();
        for (s, ws) in self.history.iter().enumerate() {
            let diff = w - ws[i];
            q += 0.5 * self.eta * self.weight(s) * diff * diff;
        }
        q
    }
}

/// Minimize the instance objective coordinate by coordinate.
///
/// Fails when the objective is unbounded below (no quadratic term and the
/// linear term beats the l1 penalty).
pub fn prox_oracle(inst: &ProxInstance) -> Result<Vec<f64>> {
    let d = inst.g_sum.len();
    if inst.epsilon < 0.0 || inst.eta < 0.0 || inst.lambda < 0.0 {
        return Err(TestkitError::InvalidInput(
            "epsilon, eta, lambda must be nonnegative".into(),
        ));
    }
    for (s, ws) in inst.history.iter().enumerate() {
        if ws.len() != d {
            return Err(TestkitError::InvalidInput(format!(
                "history entry {s} has d={}, expected {d}",
                ws.len()
            )));
        }
    }
    let weight_total: f64 = (0..inst.history.len()).map(|s| inst.weight(s)).sum();
    let curvature = inst.epsilon + inst.eta * weight_total;

    let mut out = vec![0.0; d];
    for i in 0..d {
        if curvature == 0.0 {
            // q(w) = g w + lam |w|: minimized at 0 iff |g| <= lam
            if inst.g_sum[i].abs() <= inst.lambda {
                out[i] = 0.0;
                continue;
            }
            return Err(TestkitError::Unbounded(format!(
                "coordinate {i}: zero curvature and |g| = {} > lambda = {}",
                inst.g_sum[i].abs(),
                inst.lambda
            )));
        }
        // smooth linear coefficient: b = eta sum_s c_s w_s,i - g_i
        let mut b = -inst.g_sum[i];
        for (s, ws) in inst.history.iter().enumerate() {
            b += inst.eta * inst.weight(s) * ws[i];
        }
        let plus = (b - inst.lambda) / curvature;
        let minus = (b + inst.lambda) / curvature;
        let mut best = 0.0;
        let mut best_q = inst.coord_objective(i, 0.0);
        if plus > 0.0 {
            let q = inst.coord_objective(i, plus);
            if q < best_q {
                best_q = q;
                best = plus;
            }
        }
        if minus < 0.0 {
            let q = inst.coord_objective(i, minus);
            if q < best_q {
                best = minus;
            }
        }
        out[i] = best;
    }
    Ok(out)
}

/// First-order optimality violation of `w` for the instance objective:
/// the max over coordinates of the distance from zero to the subdifferential.
pub fn prox_subgradient_residual(inst: &ProxInstance, w: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..w.len() {
        // derivative of the smooth part
        let mut smooth = inst.epsilon * w[i] + inst.g_sum[i];
        for (s, ws) in inst.history.iter().enumerate() {
            smooth += inst.eta * inst.weight(s) * (w[i] - ws[i]);
        }
        let v = if w[i] > 0.0 {
            (smooth + inst.lambda).abs()
        } else if w[i] < 0.0 {
            (smooth - inst.lambda).abs()
        } else {
            (smooth.abs() - inst.lambda).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_history_reduces_to_soft_threshold() {
        // q(w) = (eps/2) w^2 + g w + lam |w| minimized at S_lam(-g)/eps
        let inst = ProxInstance {
            epsilon: 2.0,
            eta: 1.0,
            history: vec![],
            g_sum: vec![-3.0, 0.5, 3.0],
            lambda: 1.0,
            weights: HistoryWeights::Uniform,
        };
        let w = prox_oracle(&inst).unwrap();
        assert_eq!(w, vec![1.0, 0.0, -1.0]);
        assert!(prox_subgradient_residual(&inst, &w) < 1e-12);
    }

    #[test]
    fn single_history_entry_hand_value() {
        // eps=0, eta=1, history w_1 = 0, g = -2, lam = 0.5*sqrt(3)
        let lam = 0.5 * 3.0f64.sqrt();
        let inst = ProxInstance {
            epsilon: 0.0,
            eta: 1.0,
            history: vec![vec![0.0, 0.0]],
            g_sum: vec![-2.0, 0.0],
            lambda: lam,
            weights: HistoryWeights::Uniform,
        };
        let w = prox_oracle(&inst).unwrap();
        assert!((w[0] - (2.0 - lam)).abs() < 1e-15);
        assert_eq!(w[1], 0.0);
    }

    #[test]
    fn zero_curvature_cases() {
        let mut inst = ProxInstance {
            epsilon: 0.0,
            eta: 0.0,
            history: vec![],
            g_sum: vec![0.3],
            lambda: 0.5,
            weights: HistoryWeights::Uniform,
        };
        assert_eq!(prox_oracle(&inst).unwrap(), vec![0.0]);
        inst.g_sum = vec![0.7];
        assert!(matches!(prox_oracle(&inst), Err(TestkitError::Unbounded(_))));
    }

    #[test]
    fn returned_point_satisfies_optimality_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..500 {
            let d = rng.gen_range(1..6);
            let hist_len = rng.gen_range(0..8);
            let weights = if trial % 2 == 0 {
                HistoryWeights::Uniform
            } else {
                HistoryWeights::LinearInS
            };
            let inst = ProxInstance {
                epsilon: rng.gen_range(0.0..2.0),
                eta: rng.gen_range(0.01..2.0),
                history: (0..hist_len)
                    .map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect())
                    .collect(),
                g_sum: (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect(),
                lambda: rng.gen_range(0.0..3.0),
                weights,
            };
            let w = prox_oracle(&inst).unwrap();
            let resid = prox_subgradient_residual(&inst, &w);
            assert!(resid < 1e-8, "trial {trial}: residual {resid}");
        }
    }
}
