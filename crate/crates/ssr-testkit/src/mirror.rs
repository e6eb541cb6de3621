//! Mirror-descent form of averaged SGD, rebuilt step by step from a gradient
//! history via the closed-form stationary point
//!
//! ```text
//! w_t = mean(w_1 .. w_{t-1}) - theta_t / (eta (t-1)),   theta_t = sum_{s<t} g_s
//! ```
//!
//! starting from `w_1 = 0`. Independent route to the same iterates as the
//! recursive `w_{t+1} = w_t - g_t / (eta t)` update.

use crate::{Result, TestkitError};

/// Reconstruct `w_t` for `t = len(grad_history) + 1` from the supplied
/// per-step gradients. Needs at least one gradient (`t >= 2`); the `t = 1`
/// iterate is zero by convention and never produced here.
pub fn md_sgd_oracle(grad_history: &[Vec<f64>], eta: f64) -> Result<Vec<f64>> {
    if grad_history.is_empty() {
        return Err(TestkitError::InvalidInput(
            "need at least one gradient; w_1 = 0 is the caller's convention".into(),
        ));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(TestkitError::InvalidInput(format!("eta must be > 0, got {eta}")));
    }
    let d = grad_history[0].len();
    for (s, g) in grad_history.iter().enumerate() {
        if g.len() != d {
            return Err(TestkitError::InvalidInput(format!(
                "gradient {s} has d={}, expected {d}",
                g.len()
            )));
        }
    }

    let t_final = grad_history.len() + 1;
    let mut iterate_sum = vec![0.0; d]; // sum of w_1 .. w_{s-1}, w_1 = 0
    let mut theta = vec![0.0; d]; // sum of g_1 .. g_{s-1}
    let mut w = vec![0.0; d];
    for s in 2..=t_final {
        for i in 0..d {
            theta[i] += grad_history[s - 2][i];
        }
        let denom = (s - 1) as f64;
        for i in 0..d {
            w[i] = iterate_sum[i] / denom - theta[i] / (eta * denom);
        }
        if s < t_final {
            for i in 0..d {
                iterate_sum[i] += w[i];
            }
        }
    }
    Ok(w)
}
