use serde::{Deserialize, Serialize};

use super::hitting::HittingSample;
use super::stats::MeanEstimate;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpMomentEstimate {
    /// Sample mean of `(e^(lambda T) - 1) / lambda`, censored samples entering at their horizon.
    pub estimate: MeanEstimate,
    pub censored_n: usize,
    /// False when censoring exceeded the allowed fraction; `estimate` is then only a lower bound.
    pub point_estimate: bool,
}

/// Estimates `E[(e^(lambda T) - 1) / lambda]`. Censored samples contribute
/// their horizon, so the estimate always bounds the moment from below.
pub fn exp_moment_estimate(samples: &[HittingSample], lambda: f64, max_censored_fraction: f64) -> Result<ExpMomentEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("hitting samples"));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let censored_n = samples.iter().filter(|s| s.censored).count();
    let fraction = censored_n as f64 / samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| (lambda * s.time).exp_m1() / lambda).collect();
    Ok(ExpMomentEstimate {
        estimate: MeanEstimate::from_samples(&xs)?,
        censored_n,
        point_estimate: fraction <= max_censored_fraction,
    })
}
