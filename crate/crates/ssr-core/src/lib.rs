//! One-pass streaming sparse regression.
//!
//! The library is organized around a single idea: accumulate negated
//! gradients, soft-threshold with a growing cutoff, and divide by accumulated
//! curvature, so that coordinates stay exactly zero until the stream has
//! produced evidence for them.
//!
//! * [`vector`]: weight vectors with exact support tracking, soft threshold
//! * [`loss`]: examples and the squared / huber / logistic losses
//! * [`ssr`]: the streaming and averaged sparse learners and their threshold
//!   schedules
//! * [`baselines`]: SGD, p-norm dual averaging, and a buffered batch lasso
//! * [`datagen`]: synthetic stream generators, preprocessing, file ingestion,
//!   and design diagnostics
//! * [`metrics`]: prequential run records and their accumulators
//! * [`learner`]: the online-learner trait the harness drives

pub mod baselines;
pub mod datagen;
pub mod error;
pub mod learner;
pub mod loss;
pub mod metrics;
pub mod ssr;
pub mod vector;

pub use error::{Result, SsrError};
pub use learner::{OnlineLearner, ThresholdDiag};
pub use loss::{Example, LossModel};
pub use vector::WeightVector;
