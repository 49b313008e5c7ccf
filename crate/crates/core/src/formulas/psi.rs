//! Exponential moments of the level-hitting time of Brownian motion with drift
//! `C`, reflected at `1/2`, travelling from `1/2 + eps_minus` to `1/2 + eps_plus`.

use crate::error::{Error, Result};

fn check_levels(eps_minus: f64, eps_plus: f64) -> Result<()> {
    if !(0.0 <= eps_minus && eps_minus < eps_plus) || !eps_plus.is_finite() {
        return Err(Error::Domain(format!(
            "need 0 <= eps_minus < eps_plus, got ({eps_minus}, {eps_plus})"
        )));
    }
    Ok(())
}

/// `ln(v cosh x + sinh x)` without overflow; `None` when the value is not positive.
fn ln_cosh_sinh(v: f64, x: f64) -> Option<f64> {
    let s = x.signum();
    let h = 0.5 * (v + s) + 0.5 * (v - s) * (-2.0 * x.abs()).exp();
    (h > 0.0).then(|| x.abs() + h.ln())
}

/// `E exp(lambda * sigma_hat)`.
pub fn psi_exp_moment(lambda: f64, c: f64, eps_minus: f64, eps_plus: f64) -> Result<f64> {
    check_levels(eps_minus, eps_plus)?;
    if c == 0.0 || !c.is_finite() {
        return Err(Error::Domain("drift C must be nonzero".into()));
    }
    if !(lambda < c * c / 2.0) {
        return Err(Error::Domain(format!(
            "lambda = {lambda} violates lambda < C^2/2 = {}",
            c * c / 2.0
        )));
    }
    if lambda > 0.0 && !(-c * eps_plus < 1.0) {
        return Err(Error::Domain(format!(
            "lambda > 0 requires -C eps_plus < 1, got {}",
            -c * eps_plus
        )));
    }
    let v = (1.0 - 2.0 * lambda / (c * c)).sqrt();
    let num = ln_cosh_sinh(v, c * eps_minus * v);
    let den = ln_cosh_sinh(v, c * eps_plus * v);
    match (num, den) {
        (Some(n), Some(d)) => Ok((c * (eps_plus - eps_minus) + n - d).exp()),
        _ => Err(Error::Domain("exponential moment is infinite at these parameters".into())),
    }
}

/// `E sigma_hat` for `eps_minus = eps_plus / 2`.
pub fn sigma_hat_mean(c: f64, eps_plus: f64) -> Result<f64> {
    if !(eps_plus >= 0.0) || !eps_plus.is_finite() || !c.is_finite() {
        return Err(Error::Domain(format!("need eps_plus >= 0 and finite C, got ({c}, {eps_plus})")));
    }
    let x = c * eps_plus;
    if x.abs() < 0.5 {
        // eps^2 * sum_{k>=2} (-1)^k (2^k - 1) x^(k-2) / (2 k!)
        let mut sum: f64 = 0.0;
        let mut pow2: f64 = 4.0;
        let mut term = 1.0 / 2.0; // x^(k-2)/k! at k = 2
        for k in 2..40u32 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let t = sign * (pow2 - 1.0) * term / 2.0;
            sum += t;
            if t.abs() < 1e-18 * sum.abs() {
                break;
            }
            pow2 *= 2.0;
            term *= x / (k + 1) as f64;
        }
        return Ok(eps_plus * eps_plus * sum);
    }
    Ok(((-2.0 * x).exp() - (-x).exp()) / (2.0 * c * c) + eps_plus / (2.0 * c))
}

/// Upper bound `2 eps_plus^2 e^4 / C^2` on `E sigma_hat^2` for negative drift.
pub fn sigma_hat_second_moment_upper(c_negative: f64, eps_plus: f64) -> Result<f64> {
    if !(c_negative < 0.0) {
        return Err(Error::Domain(format!("drift must be negative, got {c_negative}")));
    }
    if !(-c_negative * eps_plus < 1.0) || !(eps_plus > 0.0) {
        return Err(Error::Domain(format!(
            "need 0 < eps_plus and -C eps_plus < 1, got {}",
            -c_negative * eps_plus
        )));
    }
    Ok(2.0 * eps_plus * eps_plus * 4f64.exp() / (c_negative * c_negative))
}
