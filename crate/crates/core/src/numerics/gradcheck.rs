use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Compares `analytic_grad` with central finite differences of `f` at `at`.
///
/// Returns the largest per-coordinate `|a - n| / max(1, |a| + |n|)`.
pub fn check_gradient<F>(f: F, analytic_grad: &Matrix, at: &Matrix, eps: f64) -> Result<f64>
where
    F: Fn(&Matrix) -> f64,
{
    if !(eps > 0.0 && eps <= 1e-2) {
        return Err(Error::InvalidArgument(format!("eps {eps} outside (0, 1e-2]")));
    }
    if analytic_grad.shape() != at.shape() {
        return Err(Error::DimensionMismatch(format!(
            "gradient {:?} vs point {:?}",
            analytic_grad.shape(),
            at.shape()
        )));
    }
    let mut probe = at.clone();
    let mut worst: f64 = 0.0;
    for k in 0..at.as_slice().len() {
        let x0 = at.as_slice()[k];
        probe.as_mut_slice()[k] = x0 + eps;
        let plus = f(&probe);
        probe.as_mut_slice()[k] = x0 - eps;
        let minus = f(&probe);
        probe.as_mut_slice()[k] = x0;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFiniteEvaluation);
        }
        let numeric = (plus - minus) / (2.0 * eps);
        let analytic = analytic_grad.as_slice()[k];
        let err = (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1.0);
        worst = worst.max(err);
    }
    Ok(worst)
}
