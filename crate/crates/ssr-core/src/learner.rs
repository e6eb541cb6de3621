//! Common surface every online learner exposes to the harness.

use crate::error::Result;
use crate::loss::{Example, LossModel};
use crate::vector::WeightVector;

/// Threshold-side diagnostics for learners that gate coordinates on
/// accumulated evidence. Used to assert the zero-until-evidence invariant:
/// whenever `theta_inf <= lambda` the weight vector must be exactly zero.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdDiag {
    /// Max-norm of the accumulated (negated-gradient) statistics.
    pub theta_inf: f64,
    /// Threshold currently in force.
    pub lambda: f64,
}

/// A learner that consumes one example at a time.
///
/// The contract is prequential: `step` must issue its prediction from the
/// weights as they stood before the example's label is used, and the weights
/// returned by `weights()` between steps are exactly those that will produce
/// the next prediction.
pub trait OnlineLearner {
    /// Consume one example; returns the prediction made before the update.
    fn step(&mut self, example: &Example, model: &LossModel) -> Result<f64>;

    /// Weights used for the next prediction.
    fn weights(&self) -> &WeightVector;

    /// Estimate of record. Defaults to the prediction weights; averaged
    /// learners return their running average instead.
    fn estimate(&self) -> &WeightVector {
        self.weights()
    }

    /// Present only for learners with an explicit sparsification threshold.
    fn threshold_diag(&self) -> Option<ThresholdDiag> {
        None
    }
}
