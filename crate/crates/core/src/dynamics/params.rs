use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FEASIBILITY_TOL_FACTOR;

pub const DEFAULT_MAX_SWEEPS: usize = 1000;

/// Physical and numerical parameters shared by every stepper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub a: f64,
    pub r: f64,
    pub d: usize,
    pub n: usize,
    pub dt: f64,
    pub t_max: f64,
    pub seed: u64,
    pub max_projection_sweeps: usize,
    pub contact_band: f64,
    pub feasibility_tol: f64,
    /// Reject `dt` above [`SimParams::dt_stability`].
    pub strict_dt: bool,
}

impl SimParams {
    /// Parameters with default tolerances and `dt = dt_stability`.
    pub fn new(a: f64, r: f64, d: usize, n: usize) -> Self {
        let dt = dt_stability(a, r, n);
        Self {
            a,
            r,
            d,
            n,
            dt,
            t_max: 1.0,
            seed: 0,
            max_projection_sweeps: DEFAULT_MAX_SWEEPS,
            contact_band: 2.0 * dt.sqrt(),
            feasibility_tol: FEASIBILITY_TOL_FACTOR * r,
            strict_dt: true,
        }
    }

    /// Sets `dt` and moves the contact band to its default `2 sqrt(dt)`.
    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self.contact_band = 2.0 * dt.sqrt();
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn dt_stability(&self) -> f64 {
        dt_stability(self.a, self.r, self.n)
    }

    /// Number of steps to reach `t_max`.
    pub fn n_steps(&self) -> u64 {
        (self.t_max / self.dt).round() as u64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0) || !self.a.is_finite() {
            return Err(Error::Domain(format!("a must be >= 0, got {}", self.a)));
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::Domain(format!("r must be > 0, got {}", self.r)));
        }
        if self.d < 1 || self.n < 1 {
            return Err(Error::Domain("d and n must be positive".into()));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Domain(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.strict_dt && self.dt > self.dt_stability() * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "dt = {} exceeds the stability limit {}",
                self.dt,
                self.dt_stability()
            )));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(Error::Domain(format!("t_max must be >= 0, got {}", self.t_max)));
        }
        if self.max_projection_sweeps == 0 {
            return Err(Error::Domain("max_projection_sweeps must be positive".into()));
        }
        if !(self.contact_band >= 0.0) || !(self.feasibility_tol >= 0.0) {
            return Err(Error::Domain("tolerances must be nonnegative".into()));
        }
        Ok(())
    }
}

/// `min(0.01 / (a n), (0.05 r)^2)`.
pub fn dt_stability(a: f64, r: f64, n: usize) -> f64 {
    let diffusive = r * r / 400.0;
    if a > 0.0 {
        diffusive.min(0.01 / (a * n as f64))
    } else {
        diffusive
    }
}
