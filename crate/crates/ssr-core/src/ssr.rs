//! The streaming sparse regression learners.
//!
//! Both learners keep one dense accumulator `theta` and materialize weights
//! by soft thresholding it and dividing by accumulated curvature:
//!
//! * Streaming mode, at step t:
//!   `lambda_t` from the schedule, `w_t = S_{lambda_t}(theta_t) / (eps + eta (t-1))`,
//!   `theta_{t+1} = theta_t - (grad_t(w_t) - eta w_t)`.
//! * Averaged mode weights step t by t:
//!   `w_t = S_{lambda_t}(theta_t) / (eps + eta t(t-1)/2)`,
//!   `theta_{t+1} = theta_t - t (grad_t(w_t) - eta w_t)`, and maintains the
//!   tail-weighted average `avg_t = (1 - 2/(t+1)) avg_{t-1} + (2/(t+1)) w_t`.
//!
//! Because the threshold maps everything in `[-lambda_t, lambda_t]` to exactly
//! zero, a coordinate stays zero until the stream has accumulated evidence
//! for it; state is O(d) and never grows with t.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SsrError};
use crate::learner::{OnlineLearner, ThresholdDiag};
use crate::loss::{gradient_factor, sigmoid, Example, LossModel};
use crate::vector::{soft_threshold_scalar, WeightVector};

/// Growth rule for the sparsification threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule {
    /// `lambda * sqrt(t + 1)`: the streaming-mode default.
    SqrtGrowth,
    /// `lambda * t^(3/2)`: the averaged-mode default.
    BatchGrowth,
    /// Adaptive floor that keeps at most `k` active coordinates when per-step
    /// accumulator moves are bounded by `B`:
    /// `lambda_{t+1} = max(lambda_t, |theta_t|_(k+1) + B)` where
    /// `|theta|_(m)` is the m-th largest absolute entry.
    ForceK {
        k: usize,
        #[serde(rename = "B")]
        b: f64,
    },
    Constant,
}

/// m-th largest absolute value of `v`, 1-indexed.
fn kth_largest_abs(v: &[f64], m: usize) -> Result<f64> {
    if m == 0 || m > v.len() {
        return Err(SsrError::InvalidInput(format!(
            "order statistic {m} out of range for length {}",
            v.len()
        )));
    }
    let mut scratch: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let (_, kth, _) = scratch.select_nth_unstable_by(m - 1, |a, b| b.total_cmp(a));
    Ok(*kth)
}

/// Threshold value for step `t`. For `ForceK`, `lambda` is the previous
/// threshold and `theta` must be the accumulator as it stood before the
/// latest gradient update.
pub fn lambda_schedule(
    schedule: &Schedule,
    lambda: f64,
    t: u64,
    theta: Option<&[f64]>,
) -> Result<f64> {
    if t == 0 {
        return Err(SsrError::InvalidInput("step counter starts at 1".into()));
    }
    let tf = t as f64;
    match schedule {
        Schedule::SqrtGrowth => Ok(lambda * (tf + 1.0).sqrt()),
        Schedule::BatchGrowth => Ok(lambda * tf * tf.sqrt()),
        Schedule::Constant => Ok(lambda),
        Schedule::ForceK { k, b } => {
            let theta = theta.ok_or_else(|| {
                SsrError::InvalidInput("force_k schedule needs the accumulator".into())
            })?;
            Ok(lambda.max(kth_largest_abs(theta, k + 1)? + b))
        }
    }
}

/// Which guarantee the threshold scale is calibrated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaRule {
    /// Regret of the streaming learner.
    StreamingRegret,
    /// Parameter error of the averaged learner.
    AveragedEstimation,
    /// Support control under pure noise.
    NoiseSupport,
    /// Support recovery under a correlated design with incoherence `rho`.
    IrrepresentableDesign,
}

#[derive(Debug, Clone, Copy)]
pub struct TheoryLambda {
    pub value: f64,
    /// True when the confidence argument fell below 1 and the log was
    /// clamped at zero.
    pub clamped: bool,
}

fn clamped_ln(x: f64) -> (f64, bool) {
    let l = x.ln();
    if l < 0.0 {
        (0.0, true)
    } else {
        (l, false)
    }
}

/// Theory-calibrated scale for the threshold schedule, given a gradient bound
/// `b`, dimension `d`, horizon `t_horizon`, and failure probability `delta`.
/// `rho` is required by (and only by) `IrrepresentableDesign`, and must lie
/// in `[0, 1/sqrt(24))`.
pub fn theory_lambda(
    rule: LambdaRule,
    b: f64,
    d: usize,
    t_horizon: u64,
    delta: f64,
    rho: Option<f64>,
) -> Result<TheoryLambda> {
    if !(b.is_finite() && b > 0.0) {
        return Err(SsrError::InvalidInput(format!("gradient bound must be > 0, got {b}")));
    }
    if d == 0 || t_horizon == 0 {
        return Err(SsrError::InvalidInput("d and t_horizon must be >= 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(SsrError::InvalidInput(format!("delta must lie in (0,1), got {delta}")));
    }
    let df = d as f64;
    let tf = t_horizon as f64;
    // log2(2 T) and log2(2 T^3) without forming T^3
    let lg_2t = 1.0 + tf.log2();
    let lg_2t3 = 1.0 + 3.0 * tf.log2();
    let (value, clamped) = match rule {
        LambdaRule::StreamingRegret => {
            let (l, c) = clamped_ln(6.0 * df * lg_2t / delta);
            (1.5 * b * l.sqrt(), c)
        }
        LambdaRule::AveragedEstimation => {
            let (l, c) = clamped_ln(6.0 * df * lg_2t3 / delta);
            (1.5 * b * l.sqrt(), c)
        }
        LambdaRule::NoiseSupport => {
            let (l, c) = clamped_ln(2.0 * df * lg_2t / delta);
            (1.5 * b * l.sqrt(), c)
        }
        LambdaRule::IrrepresentableDesign => {
            let rho = rho.ok_or_else(|| {
                SsrError::InvalidInput("irrepresentable rule needs rho".into())
            })?;
            if !(rho >= 0.0 && rho * rho < 1.0 / 24.0) {
                return Err(SsrError::InvalidInput(format!(
                    "rho must lie in [0, 1/sqrt(24)), got {rho}"
                )));
            }
            let (l, c) = clamped_ln(2.0 * df * lg_2t3 / delta);
            ((228.0 * b * b * l / (1.0 - 24.0 * rho * rho)).sqrt(), c)
        }
    };
    Ok(TheoryLambda { value, clamped })
}

/// Step-size scale matched to a strong-convexity constant `alpha`.
#[inline]
pub fn eta_from_alpha(alpha: f64) -> f64 {
    0.5 * alpha
}

/// Weight of the newest iterate in the tail-weighted running average at
/// step `t`; the average satisfies `avg_t = (2 / (t (t+1))) sum_{s<=t} s w_s`.
#[inline]
pub fn average_coefficient(t: u64) -> f64 {
    2.0 / (t as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Streaming,
    Averaged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsrHyperparams {
    pub eta: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub schedule: Schedule,
}

impl SsrHyperparams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eta", self.eta), ("lambda", self.lambda), ("epsilon", self.epsilon)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SsrError::ConfigRejected(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if self.eta == 0.0 && self.epsilon == 0.0 && self.lambda == 0.0 {
            return Err(SsrError::ConfigRejected(
                "eta, epsilon and lambda cannot all be zero".into(),
            ));
        }
        if let Schedule::ForceK { k, b } = self.schedule {
            if k == 0 {
                return Err(SsrError::ConfigRejected("force_k needs k >= 1".into()));
            }
            if !(b.is_finite() && b > 0.0) {
                return Err(SsrError::ConfigRejected(format!(
                    "force_k needs a positive accumulator bound, got {b}"
                )));
            }
        }
        Ok(())
    }
}

/// Streaming sparse regression learner (both modes).
///
/// At rest after `t-1` examples the state holds the counter `t`, the
/// accumulator `theta_t`, the threshold `lambda_t`, the weights
/// `w_t = S_{lambda_t}(theta_t) / denom_t`, and in averaged mode
/// `avg_t = (2/(t(t+1))) sum_{s<=t} s w_s`. The prediction for the next
/// example always comes from `w_t`.
#[derive(Debug, Clone)]
pub struct SsrLearner {
    mode: Mode,
    hp: SsrHyperparams,
    t: u64,
    theta: Vec<f64>,
    w: WeightVector,
    w_avg: Option<WeightVector>,
    lambda_t: f64,
    theta_inf: f64,
    poisoned: bool,
}

impl SsrLearner {
    pub fn new(d: usize, hp: SsrHyperparams, mode: Mode) -> Result<Self> {
        if d == 0 {
            return Err(SsrError::InvalidInput("d must be >= 1".into()));
        }
        hp.validate()?;
        if let Schedule::ForceK { k, .. } = hp.schedule {
            if k >= d {
                return Err(SsrError::ConfigRejected(format!(
                    "force_k needs k < d, got k={k}, d={d}"
                )));
            }
        }
        let theta = vec![0.0; d];
        let lambda_t = lambda_schedule(&hp.schedule, hp.lambda, 1, Some(&theta))?;
        let mut learner = SsrLearner {
            mode,
            hp,
            t: 1,
            theta,
            w: WeightVector::zeros(d),
            w_avg: match mode {
                Mode::Averaged => Some(WeightVector::zeros(d)),
                Mode::Streaming => None,
            },
            lambda_t,
            theta_inf: 0.0,
            poisoned: false,
        };
        learner.rebuild()?;
        Ok(learner)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    /// Step counter: number of examples consumed plus one.
    #[inline]
    pub fn t(&self) -> u64 {
        self.t
    }

    #[inline]
    pub fn mode(&self) -> Mode {
        self.mode
    }

    #[inline]
    pub fn lambda_t(&self) -> f64 {
        self.lambda_t
    }

    #[inline]
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Max-norm of the accumulator, maintained as weights are rebuilt.
    #[inline]
    pub fn theta_inf(&self) -> f64 {
        self.theta_inf
    }

    pub fn avg_weights(&self) -> Option<&WeightVector> {
        self.w_avg.as_ref()
    }

    fn denominator(&self) -> f64 {
        let tf = self.t as f64;
        match self.mode {
            Mode::Streaming => self.hp.epsilon + self.hp.eta * (tf - 1.0),
            Mode::Averaged => self.hp.epsilon + self.hp.eta * tf * (tf - 1.0) * 0.5,
        }
    }

    /// Materialize `w_t` from the accumulator, track `theta_inf`, and fold the
    /// fresh weights into the running average.
    fn rebuild(&mut self) -> Result<()> {
        let denom = self.denominator();
        let lam = self.lambda_t;
        let SsrLearner { theta, w, .. } = self;
        let mut max_abs = 0.0f64;
        let mut ok = true;
        w.update(|i, _| {
            let th = theta[i];
            if !th.is_finite() {
                ok = false;
                return 0.0;
            }
            let a = th.abs();
            if a > max_abs {
                max_abs = a;
            }
            let s = soft_threshold_scalar(th, lam);
            if s == 0.0 {
                0.0
            } else if denom > 0.0 {
                s / denom
            } else {
                // 0/0 is zero by convention, but evidence above the threshold
                // with no curvature to divide by has no finite value
                ok = false;
                0.0
            }
        });
        self.theta_inf = max_abs;
        if !ok || !lam.is_finite() {
            self.poisoned = true;
            return Err(SsrError::NumericalFailure(format!(
                "weights not representable at t={} (threshold {lam}, denominator {denom})",
                self.t
            )));
        }
        if let SsrLearner { w_avg: Some(avg), w, t, .. } = self {
            let c = average_coefficient(*t);
            let w = &*w;
            avg.update(|i, old| (1.0 - c) * old + c * w.get(i));
        }
        Ok(())
    }

    /// Core recursion: consume one gradient, advance the counter, refresh the
    /// threshold and weights. `grad(i)` is the i-th gradient coordinate.
    fn advance(&mut self, grad: impl Fn(usize) -> f64) -> Result<()> {
        // force_k reads the accumulator as it stood during this step
        let next_floor = match self.hp.schedule {
            Schedule::ForceK { k, b } => {
                Some(self.lambda_t.max(kth_largest_abs(&self.theta, k + 1)? + b))
            }
            _ => None,
        };
        let step_weight = match self.mode {
            Mode::Streaming => 1.0,
            Mode::Averaged => self.t as f64,
        };
        let eta = self.hp.eta;
        {
            let SsrLearner { theta, w, .. } = self;
            for (i, th) in theta.iter_mut().enumerate() {
                *th -= step_weight * grad(i);
            }
            if eta > 0.0 {
                for (i, wv) in w.iter_nonzero() {
                    theta[i] += step_weight * eta * wv;
                }
            }
        }
        self.t += 1;
        self.lambda_t = match next_floor {
            Some(floor) => floor,
            None => lambda_schedule(&self.hp.schedule, self.hp.lambda, self.t, None)?,
        };
        self.rebuild()
    }

    /// Advance with a caller-supplied gradient vector instead of one derived
    /// from an example. This is the full update; plugins with bespoke losses
    /// and the equivalence tests drive the learner through it.
    pub fn step_with_gradient(&mut self, g: &[f64]) -> Result<()> {
        if self.poisoned {
            return Err(SsrError::NumericalFailure("learner state is poisoned".into()));
        }
        if g.len() != self.theta.len() {
            return Err(SsrError::InvalidInput(format!(
                "gradient has d={}, learner has d={}",
                g.len(),
                self.theta.len()
            )));
        }
        if let Some(bad) = g.iter().find(|v| !v.is_finite()) {
            self.poisoned = true;
            return Err(SsrError::NumericalFailure(format!(
                "non-finite gradient coordinate {bad} at t={}",
                self.t
            )));
        }
        self.advance(|i| g[i])
    }
}

impl OnlineLearner for SsrLearner {
    fn step(&mut self, e: &Example, model: &LossModel) -> Result<f64> {
        if self.poisoned {
            return Err(SsrError::NumericalFailure("learner state is poisoned".into()));
        }
        if e.dim() != self.theta.len() {
            return Err(SsrError::InvalidInput(format!(
                "example has d={}, learner has d={}",
                e.dim(),
                self.theta.len()
            )));
        }
        let z = self.w.dot(&e.x);
        let pred = match model {
            LossModel::Logistic => sigmoid(z),
            _ => z,
        };
        let factor = gradient_factor(model, z, e.y);
        if !factor.is_finite() {
            self.poisoned = true;
            return Err(SsrError::NumericalFailure(format!(
                "non-finite gradient at t={}",
                self.t
            )));
        }
        let x = &e.x;
        // split borrow: advance takes &mut self, closure reads only x/factor
        let grad = move |i: usize| factor * x[i];
        self.advance(grad)?;
        Ok(pred)
    }

    fn weights(&self) -> &WeightVector {
        &self.w
    }

    fn estimate(&self) -> &WeightVector {
        self.w_avg.as_ref().unwrap_or(&self.w)
    }

    fn threshold_diag(&self) -> Option<ThresholdDiag> {
        Some(ThresholdDiag { theta_inf: self.theta_inf, lambda: self.lambda_t })
    }
}
