//! Design incoherence diagnostics.
//!
//! Both measures are evaluated lazily from a covariance description, so
//! structured forms never materialize a d x d matrix; only the k x k
//! on-support block is ever dense.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, SsrError};

/// Covariance of the feature distribution, either structured or explicit.
#[derive(Debug, Clone, PartialEq)]
pub enum Sigma {
    Identity,
    /// Unit diagonal, constant off-diagonal c.
    Equicorrelated { c: f64 },
    /// Entry (i, j) equals rho^|i-j|.
    Ar1 { rho: f64 },
    Dense { d: usize, entries: Vec<f64> },
}

impl Sigma {
    /// Explicit covariance from rows; must be square, finite, and symmetric.
    pub fn dense(rows: &[Vec<f64>]) -> Result<Sigma> {
        let d = rows.len();
        if d == 0 {
            return Err(SsrError::InvalidInput("covariance must be nonempty".into()));
        }
        let mut entries = vec![0.0; d * d];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(SsrError::InvalidInput(format!(
                    "row {i} has {} entries in a {d}-dimensional covariance",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(SsrError::InvalidInput(format!(
                        "non-finite covariance entry at ({i},{j})"
                    )));
                }
                entries[i * d + j] = v;
            }
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let a = entries[i * d + j];
                let b = entries[j * d + i];
                if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                    return Err(SsrError::InvalidInput(format!(
                        "covariance not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(Sigma::Dense { d, entries })
    }

    fn validate(&self, d: usize) -> Result<()> {
        if d == 0 {
            return Err(SsrError::InvalidInput("d must be >= 1".into()));
        }
        match self {
            Sigma::Identity => Ok(()),
            Sigma::Equicorrelated { c } => {
                if !(c.is_finite() && c.abs() < 1.0) {
                    return Err(SsrError::InvalidInput(format!(
                        "equicorrelated c must lie in (-1,1), got {c}"
                    )));
                }
                Ok(())
            }
            Sigma::Ar1 { rho } => {
                if !(rho.is_finite() && rho.abs() < 1.0) {
                    return Err(SsrError::InvalidInput(format!(
                        "ar1 rho must lie in (-1,1), got {rho}"
                    )));
                }
                Ok(())
            }
            Sigma::Dense { d: dd, .. } => {
                if *dd != d {
                    return Err(SsrError::InvalidInput(format!(
                        "dense covariance is {dd}-dimensional, expected {d}"
                    )));
                }
                Ok(())
            }
        }
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            Sigma::Identity => {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            }
            Sigma::Equicorrelated { c } => {
                if i == j {
                    1.0
                } else {
                    *c
                }
            }
            Sigma::Ar1 { rho } => rho.powi((i as i64 - j as i64).unsigned_abs() as i32),
            Sigma::Dense { d, entries } => entries[i * d + j],
        }
    }
}

fn checked_support(d: usize, support: &[usize]) -> Result<Vec<usize>> {
    if support.is_empty() {
        return Err(SsrError::InvalidInput("support must be nonempty".into()));
    }
    let mut s = support.to_vec();
    s.sort_unstable();
    for pair in s.windows(2) {
        if pair[0] == pair[1] {
            return Err(SsrError::InvalidInput(format!(
                "duplicate support index {}",
                pair[0]
            )));
        }
    }
    if *s.last().unwrap() >= d {
        return Err(SsrError::InvalidInput(format!(
            "support index {} out of range for d={d}",
            s.last().unwrap()
        )));
    }
    Ok(s)
}

fn on_support_block(sigma: &Sigma, s: &[usize]) -> DMatrix<f64> {
    let k = s.len();
    DMatrix::from_fn(k, k, |a, b| sigma.entry(s[a], s[b]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrrepDiag {
    /// Smallest incoherence level the design satisfies.
    pub rho: f64,
    /// Smallest eigenvalue of the on-support covariance block.
    pub alpha: f64,
}

/// Incoherence of the off-support features against the signal features:
/// the smallest rho with |Cov(x_j, tau . x_S)| <= rho (alpha/sqrt(k)) ||tau||_2
/// for every j outside S. The worst tau aligns with Sigma_{j,S}, so the value
/// is max_j ||Sigma_{j,S}||_2 sqrt(k) / alpha with alpha = lambda_min(Sigma_SS).
pub fn irrep_rho(sigma: &Sigma, d: usize, support: &[usize]) -> Result<IrrepDiag> {
    sigma.validate(d)?;
    let s = checked_support(d, support)?;
    let k = s.len();
    let block = on_support_block(sigma, &s);
    let eigen = SymmetricEigen::new(block);
    let alpha = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(alpha.is_finite() && alpha > 1e-12) {
        return Err(SsrError::InvalidInput(format!(
            "on-support covariance block is singular (lambda_min = {alpha})"
        )));
    }
    let mut worst = 0.0f64;
    let mut in_s = vec![false; d];
    for &i in &s {
        in_s[i] = true;
    }
    for (j, &on_support) in in_s.iter().enumerate() {
        if on_support {
            continue;
        }
        let norm_sq: f64 = s.iter().map(|&i| sigma.entry(j, i).powi(2)).sum();
        worst = worst.max(norm_sq.sqrt());
    }
    Ok(IrrepDiag { rho: worst * (k as f64).sqrt() / alpha, alpha })
}

/// Batch-style incoherence: max over sign vectors tau of
/// ||Sigma_{~S,S} Sigma_SS^{-1} tau||_inf. Each row of the matrix attains its
/// own maximum at tau = sign(row), so the value is the largest row 1-norm;
/// this closed form is exact for every k, no enumeration needed.
pub fn classic_irrep(sigma: &Sigma, d: usize, support: &[usize]) -> Result<f64> {
    sigma.validate(d)?;
    let s = checked_support(d, support)?;
    let block = on_support_block(sigma, &s);
    let chol = Cholesky::new(block).ok_or_else(|| {
        SsrError::InvalidInput("on-support covariance block is not positive definite".into())
    })?;
    let mut in_s = vec![false; d];
    for &i in &s {
        in_s[i] = true;
    }
    let mut worst = 0.0f64;
    for (j, &on_support) in in_s.iter().enumerate() {
        if on_support {
            continue;
        }
        let b = DVector::from_fn(s.len(), |a, _| sigma.entry(s[a], j));
        let row = chol.solve(&b);
        worst = worst.max(row.iter().map(|v| v.abs()).sum());
    }
    Ok(worst)
}
