//! Evaluation metrics for online runs.
//!
//! Everything here is prequential: measurements at step t are taken with the
//! weights the learner held before it saw example t.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Result, SsrError};
use crate::vector::WeightVector;

pub const DEFAULT_WINDOW: usize = 1000;

/// One measurement row of an online run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub t: u64,
    pub inst_loss: f64,
    pub window_loss: Option<f64>,
    pub param_err: Option<f64>,
    pub avg_param_err: Option<f64>,
    pub regret: Option<f64>,
    pub support_size: usize,
    pub support_precision: Option<f64>,
    pub support_recall: Option<f64>,
    pub elapsed_ns: u128,
}

/// Trailing window of instantaneous losses with a fixed capacity.
#[derive(Debug, Clone)]
pub struct LossWindow {
    buf: VecDeque<f64>,
    cap: usize,
}

impl LossWindow {
    pub fn new(cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(SsrError::InvalidInput("window capacity must be >= 1".into()));
        }
        Ok(LossWindow { buf: VecDeque::with_capacity(cap), cap })
    }

    pub fn push(&mut self, loss: f64) {
        if self.buf.len() == self.cap {
            self.buf.pop_front();
        }
        self.buf.push_back(loss);
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// Mean of the buffered losses; None before the first push.
    pub fn mean(&self) -> Option<f64> {
        if self.buf.is_empty() {
            return None;
        }
        Some(self.buf.iter().sum::<f64>() / self.buf.len() as f64)
    }
}

/// Squared l2 distance between an estimate and a reference, computed over
/// the union of their supports so neither side's zeros are scanned.
pub fn param_error(w: &WeightVector, w_star: &WeightVector) -> Result<f64> {
    if w.dim() != w_star.dim() {
        return Err(SsrError::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            w.dim(),
            w_star.dim()
        )));
    }
    let mut sq = 0.0;
    for &i in w.support() {
        let dlt = w.get(i) - w_star.get(i);
        sq += dlt * dlt;
    }
    for &i in w_star.support() {
        // skip coordinates already counted above
        if w.get(i) == 0.0 {
            let v = w_star.get(i);
            sq += v * v;
        }
    }
    Ok(sq)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportMetrics {
    pub size: usize,
    /// Fraction of reported coordinates that are truly active; 1 when
    /// nothing is reported.
    pub precision: f64,
    /// Fraction of truly active coordinates that are reported; 1 when the
    /// true support is empty.
    pub recall: f64,
}

pub fn support_metrics(w: &WeightVector, true_support: &[usize]) -> SupportMetrics {
    let size = w.nnz();
    let hits = true_support.iter().filter(|&&i| i < w.dim() && w.get(i) != 0.0).count();
    let precision = if size == 0 { 1.0 } else { hits as f64 / size as f64 };
    let recall =
        if true_support.is_empty() { 1.0 } else { hits as f64 / true_support.len() as f64 };
    SupportMetrics { size, precision, recall }
}

/// Running regret accumulator: sum of f_t(w_t) - f_t(w*).
#[derive(Debug, Clone, Copy, Default)]
pub struct Regret {
    total: f64,
}

impl Regret {
    pub fn new() -> Self {
        Regret::default()
    }

    pub fn update(&mut self, learner_loss: f64, comparator_loss: f64) {
        self.total += learner_loss - comparator_loss;
    }

    pub fn total(&self) -> f64 {
        self.total
    }
}
