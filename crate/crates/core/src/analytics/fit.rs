//! Least-squares power-law fit on a log-log scale.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_FIT_POINTS: usize = 4;
/// Required ratio between the largest and smallest `n`.
pub const MIN_FIT_SPAN: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {MIN_FIT_POINTS} points, got {0}")]
    TooFewPoints(usize),
    #[error("grid spans a factor of {0:.3}, need at least {MIN_FIT_SPAN}")]
    NarrowSpan(f64),
    #[error("duplicate n = {0}")]
    DuplicateN(f64),
    #[error("point ({n}, {value}) is not strictly positive and finite")]
    NonPositive { n: f64, value: f64 },
}

/// `ln value = log_coefficient + exponent * ln n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub log_coefficient: f64,
    /// Root mean square of the log residuals.
    pub residual: f64,
    pub points: usize,
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<FitResult, FitError> {
    if points.len() < MIN_FIT_POINTS {
        return Err(FitError::TooFewPoints(points.len()));
    }
    for &(n, value) in points {
        if !(n > 0.0 && value > 0.0 && n.is_finite() && value.is_finite()) {
            return Err(FitError::NonPositive { n, value });
        }
    }
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    if let Some(w) = ns.windows(2).find(|w| w[0] == w[1]) {
        return Err(FitError::DuplicateN(w[0]));
    }
    let span = ns[ns.len() - 1] / ns[0];
    if span < MIN_FIT_SPAN {
        return Err(FitError::NarrowSpan(span));
    }

    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = points.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let exponent = sxy / sxx;
    let log_coefficient = my - exponent * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - log_coefficient - exponent * x).powi(2))
        .sum();
    Ok(FitResult {
        exponent,
        log_coefficient,
        residual: (sse / m).sqrt(),
        points: points.len(),
    })
}
