use serde::{Deserialize, Serialize};

use super::stats::{clopper_pearson_upper, MeanEstimate};
use crate::dynamics::{run_ensemble, NoiseSource, ProcessKind, ReflectionAudit, SimParams, Simulator, State};
use crate::error::{Error, Result};
use crate::geometry::{forms_cluster, quadratic_energy, BallSystem, ReducedConfiguration};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingSample {
    /// First sampled time the target condition held, or the horizon if censored.
    pub time: f64,
    pub state: State,
    pub censored: bool,
}

/// Hitting times of the contact level `r/2` by the radial process started at
/// `init_y`; detection uses `y <= r/2 + contact_band`.
pub fn hitting_time_packing(p: &SimParams, init_y: f64, n_rep: usize, t_max: f64) -> Result<(Vec<HittingSample>, ReflectionAudit)> {
    let p = p.with_t_max(t_max);
    let level = p.r / 2.0 + p.contact_band;
    let out = run_ensemble(n_rep, |i| {
        let mut sim = Simulator::new(ProcessKind::Radial, State::Scalar(init_y), p, i)?;
        let hit = sim.run_until(|s| s.state().as_scalar().is_some_and(|y| y <= level))?;
        Ok((
            HittingSample {
                time: sim.time(),
                state: sim.state().clone(),
                censored: !hit,
            },
            *sim.audit(),
        ))
    })?;
    Ok(merge_audits(out))
}

/// Noise-stream index offset for auxiliary draws that must not disturb a
/// replica's driving noise.
const AUX_STREAM: u64 = 1 << 63;

/// Times for Brownian motion with drift `c`, reflected at `1/2`, to climb from
/// `from` to `to`. A crossing inside a step is detected with the Brownian-bridge
/// exceedance probability `exp(-2 (to - u0)(to - u1) / dt)`; the reported time is
/// the end of that step.
pub fn drift_bm_level_hitting(c: f64, from: f64, to: f64, p: &SimParams, n_rep: usize) -> Result<(Vec<HittingSample>, ReflectionAudit)> {
    if !(0.5 <= from && from < to) {
        return Err(Error::Domain(format!("need 1/2 <= from < to, got ({from}, {to})")));
    }
    let out = run_ensemble(n_rep, |i| {
        let mut sim = Simulator::new(ProcessKind::ReflectedDriftBm { c }, State::Scalar(from), *p, i)?;
        let mut aux = NoiseSource::new(p.seed, AUX_STREAM | i);
        let mut prev = from;
        let hit = sim.run_until(|s| {
            let u = s.state().as_scalar().unwrap();
            let crossed = u >= to || s.steps() > 0 && {
                let bridge = (-2.0 * (to - prev) * (to - u) / p.dt).exp();
                aux.uniform_open() < bridge
            };
            prev = u;
            crossed
        })?;
        Ok((
            HittingSample {
                time: sim.time(),
                state: sim.state().clone(),
                censored: !hit,
            },
            *sim.audit(),
        ))
    })?;
    Ok(merge_audits(out))
}

pub(crate) fn merge_audits<T>(items: Vec<(T, ReflectionAudit)>) -> (Vec<T>, ReflectionAudit) {
    let mut audit = ReflectionAudit::default();
    let values = items
        .into_iter()
        .map(|(v, a)| {
            audit.merge(&a);
            v
        })
        .collect();
    (values, audit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub t: f64,
    pub survivors: usize,
    pub n: usize,
    pub estimate: f64,
    /// One-sided Clopper–Pearson upper bound.
    pub upper: f64,
}

/// Empirical `P(tau > t)` on `grid` with exact upper confidence bounds.
/// Censored samples count as survivors up to their censoring time.
pub fn survival_curve(samples: &[HittingSample], grid: &[f64], conf: f64) -> Result<Vec<SurvivalPoint>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("hitting samples"));
    }
    grid.iter()
        .map(|&t| {
            if samples.iter().any(|s| s.censored && s.time < t) {
                return Err(Error::Domain(format!("survival at t = {t} is beyond the censoring horizon")));
            }
            let survivors = samples.iter().filter(|s| s.time > t || s.censored).count();
            let n = samples.len();
            Ok(SurvivalPoint {
                t,
                survivors,
                n,
                estimate: survivors as f64 / n as f64,
                upper: clopper_pearson_upper(survivors, n, conf)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterHittingConfig {
    pub cluster_radius: f64,
    pub lambda: f64,
    pub n_rep: usize,
    pub t_max: f64,
    /// Times at which `V(Y(t)) 1{tau > t}` is recorded.
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivingEnergy {
    pub t: f64,
    pub estimate: MeanEstimate,
    /// `2 e^(-lambda t) V(init)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterMomentReport {
    /// `e^(lambda tau) V(Y(tau))`; censored replicas enter at the horizon, making this a lower bound.
    pub weighted_energy_at_hit: MeanEstimate,
    pub v_init: f64,
    pub censored_n: usize,
    pub init_clustered: bool,
    pub surviving_energy: Vec<SurvivingEnergy>,
    pub audit: ReflectionAudit,
}

/// Hitting times of the R-cluster set by the reduced three-ball system.
pub fn cluster_hitting(p: &SimParams, init: &ReducedConfiguration, cfg: &ClusterHittingConfig) -> Result<(Vec<HittingSample>, ClusterMomentReport)> {
    if init.count() != 3 {
        return Err(Error::Unsupported("cluster hitting is defined for three balls".into()));
    }
    let p = p.with_t_max(cfg.t_max);
    let grid_steps: Vec<u64> = cfg.grid.iter().map(|t| (t / p.dt).round() as u64).collect();
    let radius = cfg.cluster_radius;
    let init_clustered = forms_cluster(init, radius)?;
    let v_init = quadratic_energy(init).value();
    let replicas = run_ensemble(cfg.n_rep, |i| {
        let mut sim = Simulator::new(ProcessKind::Reduced, State::Reduced(init.clone()), p, i)?;
        let mut grid_energy = vec![0.0; grid_steps.len()];
        let is_cluster = |s: &Simulator| forms_cluster(s.state().as_reduced().unwrap(), radius).unwrap_or(false);
        let hit = sim.run_until(|s| {
            let clustered = is_cluster(s);
            if !clustered {
                for (slot, &k) in grid_energy.iter_mut().zip(&grid_steps) {
                    if k == s.steps() {
                        *slot = s.energy().unwrap();
                    }
                }
            }
            clustered
        })?;
        let sample = HittingSample {
            time: sim.time(),
            state: sim.state().clone(),
            censored: !hit,
        };
        let weighted = (cfg.lambda * sim.time()).exp() * sim.energy().unwrap();
        Ok(((sample, weighted, grid_energy), *sim.audit()))
    })?;
    let (replicas, audit) = merge_audits(replicas);
    let weighted: Vec<f64> = replicas.iter().map(|r| r.1).collect();
    let surviving_energy = cfg
        .grid
        .iter()
        .enumerate()
        .map(|(g, &t)| {
            let xs: Vec<f64> = replicas.iter().map(|r| r.2[g]).collect();
            Ok(SurvivingEnergy {
                t,
                estimate: MeanEstimate::from_samples(&xs)?,
                bound: 2.0 * (-cfg.lambda * t).exp() * v_init,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<HittingSample> = replicas.into_iter().map(|r| r.0).collect();
    let report = ClusterMomentReport {
        weighted_energy_at_hit: MeanEstimate::from_samples(&weighted)?,
        v_init,
        censored_n: samples.iter().filter(|s| s.censored).count(),
        init_clustered,
        surviving_energy,
        audit,
    };
    Ok((samples, report))
}
