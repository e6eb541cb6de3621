//! One-pass feature standardization with clipping.

use crate::error::{Result, SsrError};
use crate::loss::Example;

/// Streaming center/scale/clip transform. Each example is standardized with
/// the running per-coordinate mean and sample standard deviation of the
/// examples that preceded it, then clipped to [-clip, clip]; the raw features
/// are folded into the statistics afterwards. Labels pass through untouched.
///
/// The first example has no statistics and is clipped only; coordinates whose
/// trailing standard deviation is zero (or not yet defined) map to 0.
#[derive(Debug, Clone)]
pub struct StandardizeClip {
    clip: f64,
    n: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl StandardizeClip {
    pub fn new(d: usize, clip: f64) -> Result<Self> {
        if d == 0 {
            return Err(SsrError::InvalidInput("d must be >= 1".into()));
        }
        if !(clip.is_finite() && clip > 0.0) {
            return Err(SsrError::InvalidInput(format!(
                "clip must be finite and > 0, got {clip}"
            )));
        }
        Ok(StandardizeClip { clip, n: 0, mean: vec![0.0; d], m2: vec![0.0; d] })
    }

    /// Number of examples folded into the statistics so far.
    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn transform(&mut self, e: &Example) -> Result<Example> {
        let d = self.mean.len();
        if e.dim() != d {
            return Err(SsrError::InvalidInput(format!(
                "example has d={}, transform has d={d}",
                e.dim()
            )));
        }
        let mut out = vec![0.0; d];
        for (i, slot) in out.iter_mut().enumerate() {
            let v = if self.n == 0 {
                e.x[i]
            } else if self.n == 1 {
                // one prior example: sample variance is undefined, sd-zero rule
                0.0
            } else {
                let sd = (self.m2[i] / (self.n - 1) as f64).sqrt();
                if sd > 0.0 {
                    (e.x[i] - self.mean[i]) / sd
                } else {
                    0.0
                }
            };
            *slot = v.clamp(-self.clip, self.clip);
        }
        // Welford update with the raw features, after they were used
        self.n += 1;
        let nf = self.n as f64;
        for i in 0..d {
            let delta = e.x[i] - self.mean[i];
            self.mean[i] += delta / nf;
            self.m2[i] += delta * (e.x[i] - self.mean[i]);
        }
        Example::new(out, e.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn first_example_is_clipped_only() {
        let mut s = StandardizeClip::new(2, 3.0).unwrap();
        let e = Example::new(vec![5.0, -1.0], 7.0).unwrap();
        let out = s.transform(&e).unwrap();
        assert_eq!(out.x, vec![3.0, -1.0]);
        assert_eq!(out.y, 7.0);
    }

    #[test]
    fn constant_feature_maps_to_zero_after_first() {
        let mut s = StandardizeClip::new(1, 3.0).unwrap();
        for i in 0..10 {
            let out = s.transform(&Example::new(vec![4.0], 0.0).unwrap()).unwrap();
            if i == 0 {
                assert_eq!(out.x[0], 3.0);
            } else {
                assert_eq!(out.x[0], 0.0);
            }
        }
    }

    #[test]
    fn known_trailing_statistics() {
        let mut s = StandardizeClip::new(1, 10.0).unwrap();
        s.transform(&Example::new(vec![1.0], 0.0).unwrap()).unwrap();
        s.transform(&Example::new(vec![3.0], 0.0).unwrap()).unwrap();
        // previous examples 1, 3: mean 2, sample sd sqrt(2)
        let out = s.transform(&Example::new(vec![4.0], 0.0).unwrap()).unwrap();
        assert!((out.x[0] - 2.0 / 2.0f64.sqrt()).abs() < 1e-12);
        // same stream with clip 1 saturates
        let mut s = StandardizeClip::new(1, 1.0).unwrap();
        s.transform(&Example::new(vec![1.0], 0.0).unwrap()).unwrap();
        s.transform(&Example::new(vec![3.0], 0.0).unwrap()).unwrap();
        let out = s.transform(&Example::new(vec![4.0], 0.0).unwrap()).unwrap();
        assert_eq!(out.x[0], 1.0);
    }

    #[test]
    fn long_run_output_is_standardized() {
        let mut s = StandardizeClip::new(1, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let mut outs = Vec::with_capacity(n);
        for _ in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            let e = Example::new(vec![10.0 + 4.0 * z], 0.0).unwrap();
            outs.push(s.transform(&e).unwrap().x[0]);
        }
        let mean = outs.iter().sum::<f64>() / n as f64;
        let var = outs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.05, "long-run mean {mean}");
        assert!((var.sqrt() - 1.0).abs() < 0.05, "long-run sd {}", var.sqrt());
    }
}
