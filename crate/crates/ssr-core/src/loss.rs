//! Examples and the three supported per-example losses.
//!
//! Every loss is a function of the margin `z = w . x` and the label, so the
//! hot path works with the scalar derivative d loss / d z ("gradient factor")
//! and never materializes the full gradient vector.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SsrError};
use crate::vector::WeightVector;

/// One observation: a dense feature vector and a label.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub x: Vec<f64>,
    pub y: f64,
}

impl Example {
    /// Validates that all entries are finite.
    pub fn new(x: Vec<f64>, y: f64) -> Result<Self> {
        if !y.is_finite() {
            return Err(SsrError::InvalidInput(format!("label is not finite: {y}")));
        }
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(SsrError::InvalidInput(format!(
                "feature vector contains non-finite value {bad}"
            )));
        }
        Ok(Example { x, y })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Loss applied to each incoming example.
///
/// * `Squared`: `(y - z)^2 / 2`
/// * `Huber`: quadratic within `clip` of the label, linear outside
/// * `Logistic`: binary cross-entropy on labels in `{0, 1}`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LossModel {
    Squared,
    Huber {
        #[serde(default = "default_huber_clip")]
        clip: f64,
    },
    Logistic,
}

fn default_huber_clip() -> f64 {
    1.0
}

impl LossModel {
    pub fn validate(&self) -> Result<()> {
        if let LossModel::Huber { clip } = self {
            if !(clip.is_finite() && *clip > 0.0) {
                return Err(SsrError::ConfigRejected(format!(
                    "huber clip must be a positive finite real, got {clip}"
                )));
            }
        }
        Ok(())
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Loss evaluated at margin `z` with label `y`.
#[inline]
pub fn loss_at_margin(model: &LossModel, z: f64, y: f64) -> f64 {
    match model {
        LossModel::Squared => {
            let r = y - z;
            0.5 * r * r
        }
        LossModel::Huber { clip } => {
            let r = y - z;
            if r.abs() < *clip {
                0.5 * r * r
            } else {
                clip * (r.abs() - 0.5 * clip)
            }
        }
        // max(z,0) + log(1 + exp(-|z|)) - y z, stable for large |z|
        LossModel::Logistic => z.max(0.0) + (-z.abs()).exp().ln_1p() - y * z,
    }
}

/// Derivative of the loss with respect to the margin. The full gradient is
/// this factor times `x`.
#[inline]
pub fn gradient_factor(model: &LossModel, z: f64, y: f64) -> f64 {
    match model {
        LossModel::Squared => z - y,
        LossModel::Huber { clip } => (z - y).clamp(-clip, *clip),
        LossModel::Logistic => sigmoid(z) - y,
    }
}

/// Prediction issued from weights `w`: the raw margin for regression losses,
/// the sigmoid of the margin for logistic.
#[inline]
pub fn predict(model: &LossModel, w: &WeightVector, x: &[f64]) -> f64 {
    let z = w.dot(x);
    match model {
        LossModel::Logistic => sigmoid(z),
        _ => z,
    }
}

/// `f(w)` on one example.
pub fn loss_value(model: &LossModel, w: &WeightVector, e: &Example) -> Result<f64> {
    if w.dim() != e.dim() {
        return Err(SsrError::InvalidInput(format!(
            "dimension mismatch: weights have d={}, example has d={}",
            w.dim(),
            e.dim()
        )));
    }
    Ok(loss_at_margin(model, w.dot(&e.x), e.y))
}

/// Full gradient vector of `f` at `w` on one example.
pub fn loss_gradient(model: &LossModel, w: &WeightVector, e: &Example) -> Result<Vec<f64>> {
    if w.dim() != e.dim() {
        return Err(SsrError::InvalidInput(format!(
            "dimension mismatch: weights have d={}, example has d={}",
            w.dim(),
            e.dim()
        )));
    }
    let factor = gradient_factor(model, w.dot(&e.x), e.y);
    Ok(e.x.iter().map(|&xi| factor * xi).collect())
}
