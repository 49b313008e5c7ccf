use serde::{Deserialize, Serialize};

use crate::dynamics::{run_ensemble, state_energy, ProcessKind, ReflectionAudit, SimParams, Simulator, State};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantSampling {
    /// Time discarded at the start of every chain.
    pub burn_in: f64,
    pub n_samples: usize,
    /// Steps between consecutive samples of a chain.
    pub stride: u64,
    /// Independent chains; chain `c` uses noise stream `c`.
    pub chains: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub kind: ProcessKind,
    pub states: Vec<State>,
    pub audit: ReflectionAudit,
}

impl SampleSet {
    /// Values of a scalar process.
    pub fn scalars(&self) -> Vec<f64> {
        self.states.iter().filter_map(State::as_scalar).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().filter_map(|s| state_energy(&self.kind, s)).collect()
    }
}

/// Samples states after `burn_in`, every `stride` steps, from `chains`
/// independent chains started at `init`. No chain runs past `p.t_max`, so a
/// short horizon yields fewer than `n_samples` states.
pub fn sample_invariant(kind: ProcessKind, init: &State, p: &SimParams, cfg: &InvariantSampling) -> Result<SampleSet> {
    if !(cfg.burn_in >= 0.0) || cfg.stride == 0 || cfg.chains == 0 {
        return Err(Error::Domain("need burn_in >= 0, stride >= 1 and chains >= 1".into()));
    }
    let burn_steps = (cfg.burn_in / p.dt).round() as u64;
    let horizon = p.n_steps();
    let per_chain = run_ensemble(cfg.chains, |c| {
        let quota = cfg.n_samples / cfg.chains + usize::from((c as usize) < cfg.n_samples % cfg.chains);
        let mut sim = Simulator::new(kind, init.clone(), *p, c)?;
        let mut out = Vec::with_capacity(quota);
        let mut next = burn_steps;
        while out.len() < quota && next <= horizon {
            while sim.steps() < next {
                sim.step()?;
            }
            out.push(sim.state().clone());
            next += cfg.stride;
        }
        Ok((out, *sim.audit()))
    })?;
    let mut states = Vec::with_capacity(cfg.n_samples);
    let mut audit = ReflectionAudit::default();
    for (s, a) in per_chain {
        states.extend(s);
        audit.merge(&a);
    }
    Ok(SampleSet { kind, states, audit })
}
