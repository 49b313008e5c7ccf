//! Parameter pack for the three-ball cluster recurrence argument.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleConditions {
    /// `eps_plus < 2/(3a)` and `eps_plus <= 2/d`.
    pub eps_plus_small: bool,
    /// `lambda < (9/8) a^2`.
    pub lambda_below_nine_eighths: bool,
    /// `lambda <= 6a - 6d/(2R + 3 + eps_plus)`.
    pub lambda_downhill: bool,
    /// Uphill drift condition on `R'`.
    pub r_prime_uphill: bool,
    /// Border separation condition linking `R`, `R'` and `Q`.
    pub r_separation: bool,
}

impl ScheduleConditions {
    pub fn all(&self) -> bool {
        self.eps_plus_small
            && self.lambda_below_nine_eighths
            && self.lambda_downhill
            && self.r_prime_uphill
            && self.r_separation
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterSchedule {
    pub a: f64,
    pub d: usize,
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub lambda: f64,
    pub r_prime: f64,
    pub q: f64,
    /// `ln R_min`; `R_min` itself overflows for `a` below about 15.
    pub ln_r_min: f64,
    pub conditions: ScheduleConditions,
    pub admissible: bool,
}

impl ClusterSchedule {
    /// `R_min` when representable, otherwise `+inf`.
    pub fn r_min(&self) -> f64 {
        self.ln_r_min.exp()
    }
}

/// `ln(e^x + e^y)`.
fn ln_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x > y { (x, y) } else { (y, x) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Evaluates the five conditions for an arbitrary parameter pack with `R = e^ln_r`.
pub fn check_conditions(
    a: f64,
    d: usize,
    eps_plus: f64,
    lambda: f64,
    r_prime: f64,
    q: f64,
    ln_r: f64,
) -> ScheduleConditions {
    let d = d as f64;
    let r = ln_r.exp();
    let downhill_margin = 6.0 * d / (2.0 * r + 3.0 + eps_plus);
    let uphill = r_prime * (6.0 * a - lambda) - 2.0 * lambda * (1.0 + eps_plus)
        + 3.0 * a * (1.0 - 2.0 * eps_plus)
        - 3.0 * d;
    let ln_lhs = ln_add(2f64.ln() + ln_r, ((3.0 - eps_plus) / 2.0).ln());
    let ln_rhs = (6.0 * q / r_prime).sqrt() + 6.0 * a * q + (5.0 + 4.0 * r_prime + 2.0 * eps_plus).ln();
    ScheduleConditions {
        eps_plus_small: eps_plus < 2.0 / (3.0 * a) && eps_plus <= 2.0 / d,
        lambda_below_nine_eighths: lambda < 9.0 / 8.0 * a * a,
        lambda_downhill: lambda <= 6.0 * a - downhill_margin,
        r_prime_uphill: uphill >= 72.0 * (1.0 / eps_plus + 2.0),
        r_separation: ln_lhs > ln_rhs,
    }
}

pub fn schedule(a: f64, d: usize) -> Result<ClusterSchedule> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("schedule needs a > 0, got {a}")));
    }
    if d < 2 {
        return Err(Error::Domain(format!("schedule needs d >= 2, got {d}")));
    }
    let df = d as f64;
    let eps_plus = 2.0 / (3.0 * a + df);
    let lambda = a.min(a * a);
    let r_prime = (22.0 * a + 8.0 * df + 30.0) / a;
    let q = 32.0 * (1.0 + 2.0 * eps_plus) * 4f64.exp() / (3.0 * a * a);
    let ln_r_min = ((48.0 * a + 16.0 * df + 60.0) / a).ln() + 10505.0 / a;
    let conditions = check_conditions(a, d, eps_plus, lambda, r_prime, q, ln_r_min);
    Ok(ClusterSchedule {
        a,
        d,
        eps_plus,
        eps_minus: eps_plus / 2.0,
        lambda,
        r_prime,
        q,
        ln_r_min,
        conditions,
        admissible: conditions.all(),
    })
}

/// Lower bound `eps_plus^2 / (24 (1 + 2 eps_plus))` on the uphill-stage exponential moment.
pub fn uphill_moment_lower_bound(eps_plus: f64) -> f64 {
    eps_plus * eps_plus / (24.0 * (1.0 + 2.0 * eps_plus))
}
