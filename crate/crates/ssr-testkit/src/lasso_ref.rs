//! Proximal-gradient (ISTA) reference solver for the batch lasso, used to
//! cross-check the coordinate-descent fit through a completely different
//! iteration.

use ssr_core::baselines::LassoProblem;
use ssr_core::vector::soft_threshold_scalar;

use crate::{Result, TestkitError};

/// Largest eigenvalue of `(1/n) X^T X` by power iteration.
fn smooth_lipschitz(prob: &LassoProblem) -> f64 {
    let d = prob.d();
    let n = prob.n();
    let mut v = vec![1.0 / (d as f64).sqrt(); d];
    let mut lam = 0.0;
    for _ in 0..200 {
        // u = (1/n) X^T (X v)
        let mut xv = vec![0.0; n];
        for (i, slot) in xv.iter_mut().enumerate() {
            let row = prob.row(i);
            *slot = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let mut u = vec![0.0; d];
        for (i, &xvi) in xv.iter().enumerate() {
            for (uj, &rj) in u.iter_mut().zip(prob.row(i)) {
                *uj += rj * xvi;
            }
        }
        let inv_n = 1.0 / n as f64;
        for uj in &mut u {
            *uj *= inv_n;
        }
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm;
        for (vj, uj) in v.iter_mut().zip(&u) {
            *vj = uj / norm;
        }
        if (next - lam).abs() <= 1e-12 * next.max(1.0) {
            lam = next;
            break;
        }
        lam = next;
    }
    lam
}

/// Iterative soft thresholding from zero. `step_size` must be at most `1/L`
/// where `L` is the largest eigenvalue of `(1/n) X^T X`; `None` picks
/// `0.95 / L` from a power-iteration estimate. Runs for at most `steps`
/// iterations, stopping early once the objective stalls below 1e-14 relative
/// change. Ten consecutive objective increases are treated as divergence and
/// reported as an error.
pub fn lasso_pg_fit(prob: &LassoProblem, steps: usize, step_size: Option<f64>) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(TestkitError::InvalidInput("steps must be >= 1".into()));
    }
    if let Some(s) = step_size {
        if !(s.is_finite() && s > 0.0) {
            return Err(TestkitError::InvalidInput(format!("step size must be > 0, got {s}")));
        }
    }
    let l = smooth_lipschitz(prob);
    if l == 0.0 && step_size.is_none() {
        // X is all zeros: objective is lam ||w||_1 (+ const), minimized at 0
        return Ok(vec![0.0; prob.d()]);
    }
    let step = step_size.unwrap_or(0.95 / l);
    let shrink = step * prob.lam;
    let mut w = vec![0.0; prob.d()];
    let mut prev_obj = prob.objective(&w);
    let mut increases = 0;
    for _ in 0..steps {
        let g = prob.smooth_gradient(&w);
        for j in 0..w.len() {
            w[j] = soft_threshold_scalar(w[j] - step * g[j], shrink);
        }
        let obj = prob.objective(&w);
        if !obj.is_finite() {
            return Err(TestkitError::Diverged("objective became non-finite".into()));
        }
        if obj > prev_obj {
            increases += 1;
            if increases >= 10 {
                return Err(TestkitError::Diverged(format!(
                    "objective rose for {increases} consecutive iterations"
                )));
            }
        } else {
            increases = 0;
            if prev_obj - obj <= 1e-14 * prev_obj.abs().max(1e-14) {
                break;
            }
        }
        prev_obj = obj;
    }
    Ok(w)
}
