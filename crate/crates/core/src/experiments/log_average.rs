//! Logarithmic averages `(1/log T) ∫_1^T (·) dθ/θ` on a θ grid.
//!
//! Each grid point owns the cell between the log-midpoints to its
//! neighbours; the first and last cells are half cells. Cells are clipped
//! to the integration range.

use crate::error::{LabError, Result};
use crate::metrics::WeightedEmpiricalMeasure;

/// Lengths in `log θ` of each point's cell intersected with
/// `[log lo, log hi]`.
pub fn log_cells(thetas: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    let (first, last) = match (thetas.first(), thetas.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(LabError::Domain("θ grid is empty".into())),
    };
    if !(first > 0.0) {
        return Err(LabError::Domain("log averages need θ > 0".into()));
    }
    if lo < first * (1.0 - 1e-12) {
        return Err(LabError::Domain(format!(
            "range starts at {lo}, below the first grid point {first}"
        )));
    }
    if hi > last * (1.0 + 1e-12) {
        return Err(LabError::Domain(format!(
            "range ends at {hi}, beyond the last grid point {last}"
        )));
    }
    if hi < lo {
        return Err(LabError::Domain(format!("empty range [{lo}, {hi}]")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let logs: Vec<f64> = thetas.iter().map(|t| t.ln()).collect();
    let n = logs.len();
    Ok((0..n)
        .map(|k| {
            let left = if k == 0 { logs[0] } else { 0.5 * (logs[k - 1] + logs[k]) };
            let right = if k + 1 == n { logs[n - 1] } else { 0.5 * (logs[k] + logs[k + 1]) };
            (right.min(b) - left.max(a)).max(0.0)
        })
        .collect())
}

/// `ν_T = (1 / log(T/θ_0)) ∫_{θ_0}^T δ_{x(θ)} dθ/θ`.
pub fn log_average(thetas: &[f64], values: &[f64], t: f64) -> Result<WeightedEmpiricalMeasure> {
    if thetas.len() != values.len() {
        return Err(LabError::Domain("grid and values differ in length".into()));
    }
    let first = *thetas
        .first()
        .ok_or_else(|| LabError::Domain("θ grid is empty".into()))?;
    if t < first {
        return Err(LabError::Domain(format!(
            "T = {t} lies below the first grid point {first}"
        )));
    }
    if t == first {
        return WeightedEmpiricalMeasure::dirac(values[0]);
    }
    let cells = log_cells(thetas, first, t)?;
    let (points, weights): (Vec<f64>, Vec<f64>) = values
        .iter()
        .zip(&cells)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&v, &w)| (v, w))
        .unzip();
    WeightedEmpiricalMeasure::normalized(points, weights)
}

/// `(1/log T) ∫_1^T h(θ) dθ/θ` by the same cell rule; the grid must start
/// at or below 1.
pub fn log_mean(thetas: &[f64], values: &[f64], t: f64) -> Result<f64> {
    if !(t > 1.0) {
        return Err(LabError::Domain(format!("T must exceed 1, got {t}")));
    }
    let cells = log_cells(thetas, 1.0, t)?;
    let s: f64 = cells.iter().zip(values).map(|(w, h)| w * h).sum();
    Ok(s / t.ln())
}
