//! Dense weight vector with an exact nonzero index set, plus the scalar
//! soft-threshold operator both learners are built on.

use crate::error::{Result, SsrError};

/// Soft threshold of a single coordinate. Values with `|v| <= lam` map to
/// exactly 0.0, so downstream support sets stay exact.
#[inline(always)]
pub fn soft_threshold_scalar(v: f64, lam: f64) -> f64 {
    if v > lam {
        v - lam
    } else if v < -lam {
        v + lam
    } else {
        0.0
    }
}

/// Coordinatewise soft threshold with input validation.
pub fn soft_threshold(v: &[f64], lam: f64) -> Result<Vec<f64>> {
    if !lam.is_finite() || lam < 0.0 {
        return Err(SsrError::InvalidInput(format!(
            "soft threshold requires finite lam >= 0, got {lam}"
        )));
    }
    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(SsrError::InvalidInput(format!(
            "soft threshold input contains non-finite value {bad}"
        )));
    }
    Ok(v.iter().map(|&x| soft_threshold_scalar(x, lam)).collect())
}

/// Dense `f64` vector of fixed dimension with a maintained, sorted index set
/// of its nonzero coordinates. The index set always equals
/// `{i : values[i] != 0.0}` at rest; mutation goes through [`update`] which
/// rebuilds the set in the same pass.
///
/// [`update`]: WeightVector::update
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
    support: Vec<usize>,
}

impl WeightVector {
    pub fn zeros(d: usize) -> Self {
        WeightVector { values: vec![0.0; d], support: Vec::new() }
    }

    pub fn from_dense(values: Vec<f64>) -> Self {
        let support = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect();
        WeightVector { values, support }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.support.len()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sorted indices of the nonzero coordinates.
    #[inline]
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().map(move |&i| (i, self.values[i]))
    }

    /// Inner product with a dense slice, visiting only nonzero coordinates.
    pub fn dot(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.values.len());
        let mut acc = 0.0;
        for &i in &self.support {
            acc += self.values[i] * x[i];
        }
        acc
    }

    pub fn l1_norm(&self) -> f64 {
        self.support.iter().map(|&i| self.values[i].abs()).sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.support.iter().map(|&i| self.values[i] * self.values[i]).sum()
    }

    /// Recompute every coordinate as `f(i, old_value)` in one pass, rebuilding
    /// the support set so the invariant holds on return.
    pub fn update(&mut self, mut f: impl FnMut(usize, f64) -> f64) {
        self.support.clear();
        for (i, slot) in self.values.iter_mut().enumerate() {
            let v = f(i, *slot);
            *slot = v;
            if v != 0.0 {
                self.support.push(i);
            }
        }
    }

    /// True when every stored value is finite.
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}
