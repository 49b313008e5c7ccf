//! Tricomi's confluent hypergeometric function `U(alpha, b, z)` for real arguments, `z > 0`.
//!
//! The primary evaluation uses the Laplace-type integral for `alpha > 0` and
//! the three-term recurrence in `alpha` below that. An independent series
//! evaluation is provided for cross-checking at moderate `z`.

use statrs::function::gamma::{digamma, gamma, ln_gamma};

use super::quadrature::integrate_to_infinity;
use crate::error::{Error, Result};

const INTEGRAL_REL_TOL: f64 = 1e-13;
const MAX_RECURRENCE: f64 = 500.0;
const MAX_SERIES_TERMS: usize = 2000;

fn check_args(alpha: f64, b: f64, z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("U needs z > 0, got {z}")));
    }
    if !alpha.is_finite() || !b.is_finite() {
        return Err(Error::Domain("U needs finite parameters".into()));
    }
    if alpha < -MAX_RECURRENCE {
        return Err(Error::Domain(format!(
            "alpha = {alpha} is below the supported recurrence depth {}",
            -MAX_RECURRENCE
        )));
    }
    Ok(())
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// `1 / Gamma(x)`, zero at the poles.
fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Integral representation, valid for `alpha > 0`.
fn integral(alpha: f64, b: f64, z: f64) -> Result<f64> {
    let c = b - alpha - 1.0;
    let v = if alpha < 1.0 {
        // t = s^(1/alpha) removes the t^(alpha-1) endpoint singularity.
        let p = 1.0 / alpha;
        let lg = ln_gamma(alpha + 1.0);
        integrate_to_infinity(
            |s| {
                let t = s.powf(p);
                (-z * t + c * t.ln_1p() - lg).exp()
            },
            0.0,
            0.0,
            INTEGRAL_REL_TOL,
        )?
    } else {
        // t = u/z.
        let lg = ln_gamma(alpha);
        let lz = z.ln();
        integrate_to_infinity(
            |u| {
                if u == 0.0 {
                    return if alpha == 1.0 { (-lz - lg).exp() } else { 0.0 };
                }
                let t = u / z;
                (-u + (alpha - 1.0) * t.ln() + c * t.ln_1p() - lz - lg).exp()
            },
            0.0,
            0.0,
            INTEGRAL_REL_TOL,
        )?
    };
    Ok(v.value)
}

/// `U(alpha, b, z)` by the integral representation, continued to `alpha <= 0`
/// through the recurrence `U(a-1) = (2a - b + z) U(a) - a (a - b + 1) U(a+1)`.
pub fn tricomi_u(alpha: f64, b: f64, z: f64) -> Result<f64> {
    check_args(alpha, b, z)?;
    if alpha == 0.0 {
        return Ok(1.0);
    }
    if alpha > 0.0 {
        return integral(alpha, b, z);
    }
    let mut a0 = alpha - alpha.floor();
    if a0 == 0.0 {
        a0 = 1.0;
    }
    let mut upper = integral(a0 + 1.0, b, z)?;
    let mut current = integral(a0, b, z)?;
    let mut a = a0;
    while a > alpha + 0.5 {
        let next = (2.0 * a - b + z) * current - a * (a - b + 1.0) * upper;
        upper = current;
        current = next;
        a -= 1.0;
    }
    Ok(current)
}

/// `(x)_k` for integer `k >= 0`.
fn pochhammer(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (x + j as f64))
}

/// Kummer's `M(a, b, z)` by its power series; `b` must not be a nonpositive integer.
fn kummer_m(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        sum += term;
        if term == 0.0 || (term.abs() < 1e-17 * sum.abs() && kf > z) {
            return Ok(sum);
        }
    }
    Err(Error::Domain(format!("M({a}, {b}, {z}) series did not converge")))
}

/// `U(alpha, b, z)` from the Kummer-function series (logarithmic form for integer `b`).
pub fn tricomi_u_series(alpha: f64, b: f64, z: f64) -> Result<f64> {
    check_args(alpha, b, z)?;
    if is_nonpositive_integer(alpha) {
        let m = (-alpha) as usize;
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 0..=m {
            sum += term;
            let kf = k as f64;
            term *= (alpha + kf) / (b + kf) * z / (kf + 1.0);
        }
        return Ok(sign * pochhammer(b, m) * sum);
    }
    if b.fract() != 0.0 {
        let first = gamma(1.0 - b) * rgamma(alpha - b + 1.0) * kummer_m(alpha, b, z)?;
        let second = gamma(b - 1.0) * rgamma(alpha) * z.powf(1.0 - b) * kummer_m(alpha - b + 1.0, 2.0 - b, z)?;
        return Ok(first + second);
    }
    if b <= 0.0 {
        return Ok(z.powf(1.0 - b) * tricomi_u_series(alpha - b + 1.0, 2.0 - b, z)?);
    }
    let n = (b - 1.0) as usize;
    let nf = n as f64;
    let lz = z.ln();
    let mut log_sum = 0.0;
    let pref = rgamma(alpha - nf);
    if pref != 0.0 {
        let mut coef = 1.0; // (alpha)_k / ((n+1)_k k!) z^k
        for k in 0..MAX_SERIES_TERMS {
            let kf = k as f64;
            let t = coef * (lz + digamma(alpha + kf) - digamma(1.0 + kf) - digamma(nf + kf + 1.0));
            log_sum += t;
            if kf > z && t.abs() < 1e-17 * log_sum.abs() {
                break;
            }
            coef *= (alpha + kf) / ((nf + 1.0 + kf) * (kf + 1.0)) * z;
            if k + 1 == MAX_SERIES_TERMS {
                return Err(Error::Domain(format!("U({alpha}, {b}, {z}) series did not converge")));
            }
        }
        let sign = if (n + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        log_sum *= sign * pref / gamma(nf + 1.0);
    }
    let mut finite = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        finite += gamma(kf) * pochhammer(1.0 - alpha + kf, n - k) / gamma((n - k) as f64 + 1.0) * z.powi(-(k as i32));
    }
    Ok(log_sum + rgamma(alpha) * finite)
}
