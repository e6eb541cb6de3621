use crate::error::{HarnessError, Result};

/// Least-squares slope of log(err) against log(T).
///
/// An error decaying like T^s fits slope s, so 1/T data gives exactly -1.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(HarnessError::Config(format!(
            "rate fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for &(t, err) in points {
        if !(t > 0.0 && t.is_finite()) {
            return Err(HarnessError::Config(format!("nonpositive T value {t}")));
        }
        if !(err > 0.0 && err.is_finite()) {
            return Err(HarnessError::Config(format!("nonpositive error value {err}")));
        }
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, err) in points {
        let x = t.ln();
        let y = err.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return Err(HarnessError::Config(
            "rate fit needs at least two distinct T values".into(),
        ));
    }
    Ok((n * sxy - sx * sy) / denom)
}
