//! Stream descriptions and true-weight construction.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SsrError};
use crate::loss::LossModel;
use crate::vector::WeightVector;

use super::stream::{substream, ROLE_WSTAR};

/// Feature distribution of a synthetic stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Design {
    /// x ~ N(0, I).
    IidGaussian,
    /// Cov(x_i, x_j) = rho^|i-j|, realized by a first-order recursion.
    Ar1Correlated { rho_corr: f64 },
    /// Independent +-1 coordinates with logistic labels.
    RandomSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Placement {
    RandomIndices,
    Consecutive,
}

fn default_noise_sigma() -> f64 {
    1.0
}

fn default_wstar_sd() -> f64 {
    0.2
}

fn default_placement() -> Placement {
    Placement::RandomIndices
}

/// Full description of a synthetic stream; equal specs generate bit-identical
/// sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamSpec {
    pub d: usize,
    pub k: usize,
    pub design: Design,
    #[serde(default = "default_noise_sigma")]
    pub noise_sigma: f64,
    #[serde(default = "default_wstar_sd")]
    pub wstar_sd: f64,
    #[serde(default = "default_placement")]
    pub support_placement: Placement,
    pub seed: u64,
    pub loss_kind: LossModel,
}

impl StreamSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(SsrError::InvalidInput("d must be >= 1".into()));
        }
        if self.k == 0 || self.k > self.d {
            return Err(SsrError::InvalidInput(format!(
                "k must lie in 1..=d, got k={}, d={}",
                self.k, self.d
            )));
        }
        if let Design::Ar1Correlated { rho_corr } = self.design {
            if !(rho_corr > 0.0 && rho_corr < 1.0) {
                return Err(SsrError::InvalidInput(format!(
                    "rho_corr must lie in (0,1), got {rho_corr}"
                )));
            }
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(SsrError::InvalidInput(format!(
                "noise_sigma must be finite and >= 0, got {}",
                self.noise_sigma
            )));
        }
        if !(self.wstar_sd.is_finite() && self.wstar_sd > 0.0) {
            return Err(SsrError::InvalidInput(format!(
                "wstar_sd must be finite and > 0, got {}",
                self.wstar_sd
            )));
        }
        self.loss_kind.validate()?;
        if matches!(self.design, Design::RandomSign)
            && !matches!(self.loss_kind, LossModel::Logistic)
        {
            return Err(SsrError::InvalidInput(
                "random_sign design produces 0/1 labels and needs the logistic loss".into(),
            ));
        }
        Ok(())
    }
}

/// Ground truth behind a synthetic stream.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueModel {
    pub wstar: WeightVector,
    /// Sorted active coordinates; equals supp(wstar) and has size k.
    pub support: Vec<usize>,
}

impl TrueModel {
    /// l1 radius of the truth, a scale diagnostic for threshold settings.
    pub fn l1_radius(&self) -> f64 {
        self.wstar.l1_norm()
    }
}

/// Draw the true weights for a spec: k nonzero entries, normal with standard
/// deviation `wstar_sd`, placed per `support_placement`. Depends only on the
/// seed, never on the substream index.
pub fn make_wstar(spec: &StreamSpec) -> Result<TrueModel> {
    spec.validate()?;
    let mut rng = substream(spec.seed, 0, ROLE_WSTAR);
    let mut support: Vec<usize> = match spec.support_placement {
        Placement::Consecutive => (0..spec.k).collect(),
        Placement::RandomIndices => {
            rand::seq::index::sample(&mut rng, spec.d, spec.k).into_vec()
        }
    };
    support.sort_unstable();
    let normal = Normal::new(0.0, spec.wstar_sd).expect("validated sd");
    let mut dense = vec![0.0; spec.d];
    for &i in &support {
        let mut v = normal.sample(&mut rng);
        // a zero draw would shrink the support below k
        while v == 0.0 {
            v = normal.sample(&mut rng);
        }
        dense[i] = v;
    }
    Ok(TrueModel { wstar: WeightVector::from_dense(dense), support })
}

/// Convenience for tests and diagnostics that need an arbitrary generator.
#[allow(dead_code)]
pub(crate) fn any_rng(seed: u64) -> impl Rng {
    substream(seed, 0, ROLE_WSTAR)
}
