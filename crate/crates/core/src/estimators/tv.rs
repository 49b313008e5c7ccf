//! Histogram total-variation estimates, normalized to `[0, 2]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 100;

/// Equal-width bins on `[lo, hi]`; values outside are clamped into the end bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl Binning {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo < hi) || bins == 0 {
            return Err(Error::Domain(format!("invalid binning [{lo}, {hi}] with {bins} bins")));
        }
        Ok(Self { lo, hi, bins })
    }

    /// Spans the pooled range of the given samples.
    pub fn pooled(samples: &[&[f64]], bins: usize) -> Result<Self> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in samples {
            for &x in *s {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        if !lo.is_finite() {
            return Err(Error::EmptyInput("samples"));
        }
        if lo == hi {
            hi = lo + 1.0;
        }
        Self::new(lo, hi, bins)
    }

    pub fn index(&self, x: f64) -> usize {
        let k = ((x - self.lo) / (self.hi - self.lo) * self.bins as f64).floor();
        (k.max(0.0) as usize).min(self.bins - 1)
    }

    pub fn edges(&self, k: usize) -> (f64, f64) {
        let w = (self.hi - self.lo) / self.bins as f64;
        (self.lo + w * k as f64, self.lo + w * (k + 1) as f64)
    }

    pub fn histogram(&self, xs: &[f64]) -> Vec<f64> {
        let mut h = vec![0.0; self.bins];
        for &x in xs {
            h[self.index(x)] += 1.0;
        }
        let n = xs.len() as f64;
        h.iter_mut().for_each(|v| *v /= n);
        h
    }
}

/// `sum_bins |p_hat - q_hat|`.
pub fn tv_distance_estimate(a: &[f64], b: &[f64], binning: &Binning) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    let (p, q) = (binning.histogram(a), binning.histogram(b));
    Ok(p.iter().zip(&q).map(|(x, y)| (x - y).abs()).sum())
}

/// Histogram TV against a law given by its bin probabilities. Mass of the law
/// outside `[lo, hi]` is counted in full.
pub fn tv_against_law<F: Fn(f64, f64) -> Result<f64>>(xs: &[f64], binning: &Binning, probability: F) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    let mut inner = vec![0.0; binning.bins];
    for &x in xs {
        if x >= binning.lo && x <= binning.hi {
            inner[binning.index(x)] += 1.0;
        }
    }
    let n = xs.len() as f64;
    let outside_samples = 1.0 - inner.iter().sum::<f64>() / n;
    let mut total = 0.0;
    let mut law_inside = 0.0;
    for (k, count) in inner.iter().enumerate() {
        let (lo, hi) = binning.edges(k);
        let q = probability(lo, hi)?;
        law_inside += q;
        total += (count / n - q).abs();
    }
    Ok(total + outside_samples + (1.0 - law_inside).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_disjoint() {
        let a = [0.1, 0.2, 0.3];
        let b = Binning::new(0.0, 1.0, 10).unwrap();
        assert_eq!(tv_distance_estimate(&a, &a, &b).unwrap(), 0.0);
        assert_eq!(tv_distance_estimate(&[0.05], &[0.95], &b).unwrap(), 2.0);
        assert!(tv_distance_estimate(&[], &a, &b).is_err());
    }

    #[test]
    fn pooled_binning_covers_range() {
        let b = Binning::pooled(&[&[1.0, 2.0], &[-1.0]], 4).unwrap();
        assert_eq!((b.lo, b.hi), (-1.0, 2.0));
        assert_eq!(b.index(2.0), 3);
        assert_eq!(b.index(-1.0), 0);
    }
}
