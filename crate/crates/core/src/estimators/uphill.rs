use serde::{Deserialize, Serialize};

use super::hitting::{merge_audits, HittingSample};
use crate::dynamics::{run_ensemble, ProcessKind, ReflectionAudit, SimParams, Simulator, State};
use crate::error::{Error, Result};
use crate::geometry::{BallSystem, ReducedConfiguration};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UphillConfig {
    /// Squared-distance excess of the distant ball at the start of the stage.
    pub r_start: f64,
    /// Border level in force during the stage.
    pub r_prime: f64,
    pub eps_minus: f64,
    pub eps_plus: f64,
    /// Truncation time.
    pub q: f64,
    pub n_rep: usize,
}

/// Three balls with `|Y_1 - Y_2|^2 = r^2 (1 + 2 eps_minus)` and ball 0 on their
/// bisector at squared distance `r^2 (1 + r_start)` from both.
pub fn uphill_initial_state(d: usize, r: f64, r_start: f64, eps_minus: f64) -> Result<ReducedConfiguration> {
    let r2 = r * r;
    let base2 = r2 * (1.0 + 2.0 * eps_minus);
    let h2 = r2 * (1.0 + r_start) - base2 / 4.0;
    if !(r_start >= 0.0 && eps_minus >= 0.0) {
        return Err(Error::Domain(format!("r_start = {r_start} and eps_minus = {eps_minus} overlap the balls")));
    }
    let mut ball0 = vec![0.0; d];
    let mut ball1 = vec![0.0; d];
    let mut ball2 = vec![0.0; d];
    ball0[1] = h2.sqrt();
    ball1[0] = -base2.sqrt() / 2.0;
    ball2[0] = base2.sqrt() / 2.0;
    ReducedConfiguration::centered(&[ball0, ball1, ball2], r)
}

/// Durations of the uphill stage: it ends when ball 0 comes within `r_prime`
/// of the pair, the pair separates to `1 + 2 eps_plus`, or at `q`. Samples
/// truncated by `q` are marked censored.
pub fn uphill_stage_samples(p: &SimParams, cfg: &UphillConfig) -> Result<(Vec<HittingSample>, ReflectionAudit)> {
    if p.n != 3 {
        return Err(Error::Unsupported("the uphill stage is defined for three balls".into()));
    }
    if !(0.0 < cfg.eps_minus && cfg.eps_minus < cfg.eps_plus && cfg.r_prime < cfg.r_start && cfg.q > 0.0) {
        return Err(Error::Domain("need 0 < eps_minus < eps_plus, r_prime < r_start and q > 0".into()));
    }
    let init = uphill_initial_state(p.d, p.r, cfg.r_start, cfg.eps_minus)?;
    let p = p.with_t_max(cfg.q);
    let r2 = p.r * p.r;
    let near = r2 * (1.0 + cfg.r_prime);
    let apart = r2 * (1.0 + 2.0 * cfg.eps_plus);
    let out = run_ensemble(cfg.n_rep, |i| {
        let mut sim = Simulator::new(ProcessKind::Reduced, State::Reduced(init.clone()), p, i)?;
        let ended = sim.run_until(|s| {
            let c = s.state().as_reduced().unwrap();
            c.distance_sq(0, 1).min(c.distance_sq(0, 2)) <= near || c.distance_sq(1, 2) >= apart
        })?;
        Ok((
            HittingSample {
                time: sim.time(),
                state: sim.state().clone(),
                censored: !ended,
            },
            *sim.audit(),
        ))
    })?;
    Ok(merge_audits(out))
}
