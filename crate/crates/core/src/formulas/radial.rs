//! The reversible law of the two-ball radial process, `nu_a(drho) ∝ rho^(d-1) e^(-4 a rho^2)` on `rho > r/2`.

use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, integrate_to_infinity, ABS_FLOOR, REL_TARGET};
use crate::error::{Error, Result};
use crate::geometry::{is_admissible, quadratic_energy, BallSystem, ReducedConfiguration};

/// `-a V(state)` on the admissible set, `-inf` off it. For two balls this is
/// the exponent `-4 a rho^2` of the radial law.
pub fn reduced_invariant_log_density(state: &ReducedConfiguration, a: f64) -> f64 {
    if !is_admissible(state, state.feasibility_tol()) {
        return f64::NEG_INFINITY;
    }
    -a * quadratic_energy(state).value()
}

/// Normalized radial density with its normalizer computed by quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialDensity {
    pub a: f64,
    pub d: usize,
    pub r: f64,
    /// Log of the unnormalized density at the mode, factored out for stability.
    log_peak: f64,
    /// Integral of `exp(log_unnormalized - log_peak)` over `(r/2, inf)`.
    scaled_mass: f64,
}

impl RadialDensity {
    pub fn new(a: f64, d: usize, r: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Domain(format!("radial density needs a > 0, got {a}")));
        }
        if d < 1 || !(r > 0.0) {
            return Err(Error::Domain(format!("need d >= 1 and r > 0, got d = {d}, r = {r}")));
        }
        let mut out = Self {
            a,
            d,
            r,
            log_peak: 0.0,
            scaled_mass: 1.0,
        };
        out.log_peak = out.log_unnormalized(out.mode());
        let lo = r / 2.0;
        out.scaled_mass = integrate_to_infinity(|x| out.scaled(x), lo, ABS_FLOOR, REL_TARGET)?.value;
        Ok(out)
    }

    fn log_unnormalized(&self, rho: f64) -> f64 {
        (self.d as f64 - 1.0) * rho.ln() - 4.0 * self.a * rho * rho
    }

    fn scaled(&self, rho: f64) -> f64 {
        if rho <= self.r / 2.0 {
            0.0
        } else {
            (self.log_unnormalized(rho) - self.log_peak).exp()
        }
    }

    /// `max(r/2, sqrt((d-1)/(8a)))`.
    pub fn mode(&self) -> f64 {
        (self.r / 2.0).max(((self.d as f64 - 1.0) / (8.0 * self.a)).sqrt())
    }

    /// Normalizing constant of `rho^(d-1) e^(-4 a rho^2)` over `(r/2, inf)`.
    pub fn normalizer(&self) -> f64 {
        self.scaled_mass * self.log_peak.exp()
    }

    pub fn pdf(&self, rho: f64) -> f64 {
        self.scaled(rho) / self.scaled_mass
    }

    /// `nu_a((lo, hi])`.
    pub fn probability(&self, lo: f64, hi: f64) -> Result<f64> {
        let lo = lo.max(self.r / 2.0);
        if hi <= lo {
            return Ok(0.0);
        }
        let p = if hi.is_infinite() {
            integrate_to_infinity(|x| self.scaled(x), lo, ABS_FLOOR, REL_TARGET)?
        } else {
            integrate(|x| self.scaled(x), lo, hi, ABS_FLOOR, REL_TARGET)?
        };
        Ok(p.value / self.scaled_mass)
    }

    /// `E[f(rho)]` under `nu_a`.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let lo = self.r / 2.0;
        let v = integrate_to_infinity(|x| f(x) * self.scaled(x), lo, ABS_FLOOR, REL_TARGET)?;
        Ok(v.value / self.scaled_mass)
    }
}

/// Normalized density value; builds the normalizer on every call, so prefer
/// [`RadialDensity`] in loops.
pub fn radial_density(rho: f64, a: f64, d: usize, r: f64) -> Result<f64> {
    Ok(RadialDensity::new(a, d, r)?.pdf(rho))
}

/// Incomplete-gamma form of the normalizer, `(1/2)(4a)^(-d/2) Gamma(d/2, a r^2)`.
pub fn radial_normalizer_closed_form(a: f64, d: usize, r: f64) -> f64 {
    let s = d as f64 / 2.0;
    0.5 * (4.0 * a).powf(-s) * statrs::function::gamma::gamma_ui(s, a * r * r)
}
