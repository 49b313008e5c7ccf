use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    pub amplitude: f64,
    pub window: (f64, f64),
    pub points: usize,
    /// Euclidean norm of the log-scale residuals.
    pub residual_norm: f64,
}

/// Least-squares fit of `log v = log A - rate * t` over the leading run of
/// points with `v > floor`.
pub fn fit_exponential_rate(series: &[(f64, f64)], floor: f64) -> Result<RateFit> {
    let window: Vec<(f64, f64)> = series
        .iter()
        .take_while(|(_, v)| *v > floor && *v > 0.0)
        .map(|&(t, v)| (t, v.ln()))
        .collect();
    if window.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            found: window.len(),
        });
    }
    let n = window.len() as f64;
    let tm = window.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = window.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = window.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = window.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("fit window has a single time value".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * tm;
    let residual_norm = window
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(RateFit {
        rate: -slope,
        amplitude: intercept.exp(),
        window: (window[0].0, window[window.len() - 1].0),
        points: window.len(),
        residual_norm,
    })
}
