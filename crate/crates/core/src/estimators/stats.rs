//! Sample summaries, confidence bounds and report records.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanEstimate {
    /// Sums in index order so that results do not depend on scheduling.
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::EmptyInput("samples"));
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Ok(Self {
            mean,
            se: (var / n).sqrt(),
            n: xs.len(),
        })
    }

    /// One-sided upper bound at confidence `conf` (normal approximation).
    pub fn upper(&self, conf: f64) -> f64 {
        self.mean + normal_quantile(conf) * self.se
    }

    pub fn lower(&self, conf: f64) -> f64 {
        self.mean - normal_quantile(conf) * self.se
    }

    /// Two-sided interval at confidence `conf`.
    pub fn interval(&self, conf: f64) -> (f64, f64) {
        let z = normal_quantile(0.5 + conf / 2.0);
        (self.mean - z * self.se, self.mean + z * self.se)
    }
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Exact one-sided upper confidence bound for a binomial proportion.
pub fn clopper_pearson_upper(successes: usize, n: usize, conf: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyInput("binomial trials"));
    }
    if successes >= n {
        return Ok(1.0);
    }
    let beta = Beta::new(successes as f64 + 1.0, (n - successes) as f64)
        .map_err(|e| Error::Domain(e.to_string()))?;
    Ok(beta.inverse_cdf(conf))
}

/// Exact one-sided lower confidence bound for a binomial proportion.
pub fn clopper_pearson_lower(successes: usize, n: usize, conf: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyInput("binomial trials"));
    }
    if successes == 0 {
        return Ok(0.0);
    }
    let beta = Beta::new(successes as f64, (n - successes) as f64 + 1.0)
        .map_err(|e| Error::Domain(e.to_string()))?;
    Ok(beta.inverse_cdf(1.0 - conf))
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("KS samples"));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Asymptotic critical value of the two-sample KS statistic at level `alpha`.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// One estimated quantity, serialized as the JSON report record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub quantity: String,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
    pub censored_n: usize,
    pub params: serde_json::Value,
}

/// `t, value, se` rows, optionally preceded by a `# comment` line.
pub fn write_series_csv<W: Write>(mut w: W, rows: &[(f64, f64, f64)], comment: Option<&str>) -> std::io::Result<()> {
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "t,value,se")?;
    for (t, v, se) in rows {
        writeln!(w, "{t},{v},{se}")?;
    }
    Ok(())
}
