use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ledger::LocalTimeLedger;
use super::noise::NoiseSource;
use super::params::SimParams;
use super::steps::{
    median_increments, median_pair_update, step_affine, step_balls, step_radial, step_reflected_drift_bm,
    step_u_squared,
};
use crate::error::{Error, Result};
use crate::geometry::{
    forms_cluster, is_admissible, norm_sq, quadratic_energy, BallSystem, Configuration, ReducedConfiguration,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "snake_case")]
pub enum ProcessKind {
    /// System (A), absolute positions.
    Full,
    /// System (B), positions relative to the center of mass.
    Reduced,
    /// Half-distance of two balls.
    Radial,
    /// `y^2 - r^2/4` of the radial process.
    Affine,
    /// Brownian motion with drift `c` reflected at `1/2`.
    ReflectedDriftBm { c: f64 },
    /// `|U23|^2` of the three-ball median pair.
    USquared,
    /// Scaled median and opposite side of three balls.
    MedianPair,
}

impl ProcessKind {
    pub(crate) fn tag(&self) -> u8 {
        match self {
            ProcessKind::Full => 0,
            ProcessKind::Reduced => 1,
            ProcessKind::Radial => 2,
            ProcessKind::Affine => 3,
            ProcessKind::ReflectedDriftBm { .. } => 4,
            ProcessKind::USquared => 5,
            ProcessKind::MedianPair => 6,
        }
    }

    pub(crate) fn from_tag(tag: u8, c: f64) -> Option<Self> {
        Some(match tag {
            0 => ProcessKind::Full,
            1 => ProcessKind::Reduced,
            2 => ProcessKind::Radial,
            3 => ProcessKind::Affine,
            4 => ProcessKind::ReflectedDriftBm { c },
            5 => ProcessKind::USquared,
            6 => ProcessKind::MedianPair,
            _ => return None,
        })
    }

    pub(crate) fn drift(&self) -> f64 {
        match self {
            ProcessKind::ReflectedDriftBm { c } => *c,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum State {
    Full(Configuration),
    Reduced(ReducedConfiguration),
    Scalar(f64),
    MedianPair { u1: Vec<f64>, u23: Vec<f64> },
}

impl State {
    /// Flat coordinates in export order.
    pub fn coordinates(&self) -> Vec<f64> {
        match self {
            State::Full(c) => c.flat().to_vec(),
            State::Reduced(c) => c.flat().to_vec(),
            State::Scalar(v) => vec![*v],
            State::MedianPair { u1, u23 } => u1.iter().chain(u23).copied().collect(),
        }
    }

    pub fn as_reduced(&self) -> Option<&ReducedConfiguration> {
        match self {
            State::Reduced(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            State::Scalar(v) => Some(*v),
            _ => None,
        }
    }
}

/// Counts of reflection-contract violations seen by a [`Simulator`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ReflectionAudit {
    pub steps: u64,
    /// States outside the domain by more than `feasibility_tol`.
    pub inadmissible: u64,
    /// Positive local-time increments without end-of-step contact within `contact_band`.
    pub unsupported_increments: u64,
    /// Local-time increments below zero (ledger decreasing).
    pub negative_increments: u64,
    /// Reduced states whose center drifted beyond `centering_tol`.
    pub uncentered: u64,
    /// Largest constraint violation seen.
    pub worst_violation: f64,
}

impl ReflectionAudit {
    pub fn merge(&mut self, other: &ReflectionAudit) {
        self.steps += other.steps;
        self.inadmissible += other.inadmissible;
        self.unsupported_increments += other.unsupported_increments;
        self.negative_increments += other.negative_increments;
        self.uncentered += other.uncentered;
        self.worst_violation = self.worst_violation.max(other.worst_violation);
    }

    pub fn is_clean(&self) -> bool {
        self.inadmissible == 0 && self.unsupported_increments == 0 && self.negative_increments == 0 && self.uncentered == 0
    }
}

/// Quadratic energy of multi-ball states; `4 y^2` for the radial process and
/// `3(|U1|^2 + |U23|^2)` for the median pair.
pub fn state_energy(kind: &ProcessKind, state: &State) -> Option<f64> {
    match (kind, state) {
        (_, State::Full(c)) => Some(quadratic_energy(&crate::geometry::reduce(c)).value()),
        (_, State::Reduced(c)) => Some(quadratic_energy(c).value()),
        (ProcessKind::Radial, State::Scalar(y)) => Some(4.0 * y * y),
        (_, State::MedianPair { u1, u23 }) => Some(3.0 * (norm_sq(u1) + norm_sq(u23))),
        _ => None,
    }
}

/// A single trajectory being stepped forward, with its noise stream and audit.
#[derive(Debug, Clone)]
pub struct Simulator {
    kind: ProcessKind,
    params: SimParams,
    state: State,
    ledger: LocalTimeLedger,
    noise: NoiseSource,
    steps: u64,
    scratch: Vec<f64>,
    audit: ReflectionAudit,
}

fn validate_init(kind: &ProcessKind, init: &State, p: &SimParams) -> Result<usize> {
    let tol = p.feasibility_tol;
    let bad = |msg: &str| Err(Error::Domain(msg.to_string()));
    match (kind, init) {
        (ProcessKind::Full, State::Full(c)) => {
            check_system(c, p)?;
            if !is_admissible(c, tol) {
                return bad("initial configuration is not admissible");
            }
            Ok(c.count())
        }
        (ProcessKind::Reduced, State::Reduced(c)) => {
            check_system(c, p)?;
            if !is_admissible(c, tol) {
                return bad("initial configuration is not admissible");
            }
            Ok(c.count())
        }
        (ProcessKind::Radial, State::Scalar(y)) if *y >= p.r / 2.0 - tol => Ok(2),
        (ProcessKind::Affine, State::Scalar(z)) if *z >= 0.0 => Ok(2),
        (ProcessKind::ReflectedDriftBm { .. } | ProcessKind::USquared, State::Scalar(u)) if *u >= 0.5 => Ok(2),
        (ProcessKind::MedianPair, State::MedianPair { u1, u23 }) => {
            if u1.len() != p.d || u23.len() != p.d {
                return Err(Error::Structural("median coordinates must have dimension d".into()));
            }
            if 2.0 * norm_sq(u23) < (1.0 - tol).powi(2) {
                return bad("|U23| below the contact level 1/sqrt(2)");
            }
            Ok(2)
        }
        (ProcessKind::Radial | ProcessKind::Affine | ProcessKind::ReflectedDriftBm { .. } | ProcessKind::USquared, State::Scalar(v)) => {
            Err(Error::Domain(format!("initial value {v} outside the state space of {kind:?}")))
        }
        _ => Err(Error::Structural(format!("initial state does not match process {kind:?}"))),
    }
}

fn check_system<S: BallSystem>(s: &S, p: &SimParams) -> Result<()> {
    if s.count() != p.n || s.dimension() != p.d || (s.radius() - p.r).abs() > 1e-15 * p.r {
        return Err(Error::Structural(format!(
            "state (n = {}, d = {}, r = {}) does not match parameters (n = {}, d = {}, r = {})",
            s.count(),
            s.dimension(),
            s.radius(),
            p.n,
            p.d,
            p.r
        )));
    }
    Ok(())
}

impl Simulator {
    /// Starts a trajectory whose noise stream is keyed by `(params.seed, index)`.
    pub fn new(kind: ProcessKind, init: State, params: SimParams, index: u64) -> Result<Self> {
        params.validate()?;
        let n = validate_init(&kind, &init, &params)?;
        Ok(Self {
            kind,
            params,
            state: init,
            ledger: LocalTimeLedger::new(n),
            noise: NoiseSource::new(params.seed, index),
            steps: 0,
            scratch: Vec::new(),
            audit: ReflectionAudit::default(),
        })
    }

    pub(crate) fn from_parts(
        kind: ProcessKind,
        params: SimParams,
        state: State,
        ledger: LocalTimeLedger,
        noise: NoiseSource,
        steps: u64,
    ) -> Self {
        Self {
            kind,
            params,
            state,
            ledger,
            noise,
            steps,
            scratch: Vec::new(),
            audit: ReflectionAudit::default(),
        }
    }

    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn ledger(&self) -> &LocalTimeLedger {
        &self.ledger
    }

    pub fn noise(&self) -> &NoiseSource {
        &self.noise
    }

    pub fn audit(&self) -> &ReflectionAudit {
        &self.audit
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.params.dt
    }

    pub fn energy(&self) -> Option<f64> {
        state_energy(&self.kind, &self.state)
    }

    /// Changes the attraction strength, re-validating the step size.
    pub fn set_attraction(&mut self, a: f64) -> Result<()> {
        let p = self.params.with_a(a);
        p.validate()?;
        self.params = p;
        Ok(())
    }

    pub fn step(&mut self) -> Result<()> {
        let t = self.time() + self.params.dt;
        self.advance().map_err(|e| e.at_time(t))?;
        self.steps += 1;
        self.check_contract();
        Ok(())
    }

    /// Steps until `stop` holds or the horizon is reached; returns whether `stop` fired.
    pub fn run_until<F: FnMut(&Simulator) -> bool>(&mut self, mut stop: F) -> Result<bool> {
        let n_steps = self.params.n_steps();
        if stop(self) {
            return Ok(true);
        }
        while self.steps < n_steps {
            self.step()?;
            if stop(self) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn advance(&mut self) -> Result<()> {
        let p = self.params;
        match (&self.kind, &mut self.state) {
            (ProcessKind::Full, State::Full(c)) => {
                let (n, d) = (c.count(), c.dimension());
                step_balls(c.positions_mut(), n, d, false, &mut self.ledger, &p, &mut self.noise, &mut self.scratch)
            }
            (ProcessKind::Reduced, State::Reduced(c)) => {
                let (n, d) = (c.count(), c.dimension());
                step_balls(c.rel_positions_mut(), n, d, true, &mut self.ledger, &p, &mut self.noise, &mut self.scratch)
            }
            (ProcessKind::Radial, State::Scalar(y)) => {
                let (ny, dl) = step_radial(*y, 0.0, &p, &mut self.noise)?;
                *y = ny;
                self.ledger.begin_step();
                if dl > 0.0 {
                    self.ledger.add(0, 1, dl);
                }
                Ok(())
            }
            (ProcessKind::Affine, State::Scalar(z)) => {
                *z = step_affine(*z, &p, &mut self.noise)?;
                Ok(())
            }
            (ProcessKind::ReflectedDriftBm { c }, State::Scalar(u)) => {
                *u = step_reflected_drift_bm(*u, *c, &p, &mut self.noise)?;
                Ok(())
            }
            (ProcessKind::USquared, State::Scalar(u)) => {
                *u = step_u_squared(*u, &p, &mut self.noise)?;
                Ok(())
            }
            (ProcessKind::MedianPair, State::MedianPair { u1, u23 }) => {
                let d = u1.len();
                self.scratch.resize(3 * d, 0.0);
                self.noise.fill_gaussian(&mut self.scratch);
                let (db1, db23) = median_increments(&self.scratch, d, p.dt);
                let dl = median_pair_update(u1, u23, &db1, &db23, p.a, p.dt, p.feasibility_tol);
                self.ledger.begin_step();
                if dl > 0.0 {
                    self.ledger.add(0, 1, dl);
                }
                Ok(())
            }
            _ => Err(Error::Structural("state does not match process kind".into())),
        }
    }

    fn check_contract(&mut self) {
        let p = &self.params;
        let audit = &mut self.audit;
        audit.steps += 1;
        let record_violation = |amount: f64, audit: &mut ReflectionAudit| {
            audit.inadmissible += 1;
            audit.worst_violation = audit.worst_violation.max(amount);
        };
        match &self.state {
            State::Full(_) | State::Reduced(_) => {
                let (sys, n): (&dyn BallSystem, usize) = match &self.state {
                    State::Full(c) => (c, c.count()),
                    State::Reduced(c) => (c, c.count()),
                    _ => unreachable!(),
                };
                if !is_admissible(sys, p.feasibility_tol) {
                    record_violation(p.r - sys.min_pair_distance(), audit);
                }
                for i in 0..n {
                    for j in i + 1..n {
                        let dl = self.ledger.last_increment(i, j);
                        if dl < 0.0 {
                            audit.negative_increments += 1;
                        }
                        if dl > 0.0 && sys.distance_sq(i, j).sqrt() > p.r + p.contact_band {
                            audit.unsupported_increments += 1;
                        }
                    }
                }
                if let State::Reduced(c) = &self.state {
                    if c.centering_error() > c.centering_tol().max(f64::MIN_POSITIVE) {
                        audit.uncentered += 1;
                    }
                }
            }
            State::Scalar(v) => {
                let floor = match self.kind {
                    ProcessKind::Radial => p.r / 2.0,
                    ProcessKind::Affine => 0.0,
                    _ => 0.5,
                };
                if *v < floor - p.feasibility_tol {
                    record_violation(floor - v, audit);
                }
                let dl = self.ledger.last_increment(0, 1);
                if dl < 0.0 {
                    audit.negative_increments += 1;
                }
                if dl > 0.0 && *v > floor + p.contact_band {
                    audit.unsupported_increments += 1;
                }
            }
            State::MedianPair { u23, .. } => {
                let side = (2.0 * norm_sq(u23)).sqrt();
                if side < 1.0 - p.feasibility_tol {
                    record_violation(1.0 - side, audit);
                }
                let dl = self.ledger.last_increment(0, 1);
                if dl < 0.0 {
                    audit.negative_increments += 1;
                }
                if dl > 0.0 && side > 1.0 + p.contact_band {
                    audit.unsupported_increments += 1;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOptions {
    /// Steps between recorded samples.
    pub stride: u64,
    /// Noise-stream index of this trajectory.
    pub index: u64,
    /// Records the R-cluster flag for three-ball reduced states when set.
    pub cluster_radius: Option<f64>,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            stride: 1,
            index: 0,
            cluster_radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: ProcessKind,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub energies: Vec<Option<f64>>,
    pub local_times: Vec<Vec<f64>>,
    pub cluster: Vec<Option<bool>>,
    pub audit: ReflectionAudit,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Squared distance between balls `i` and `j` at every sample (reduced or full states).
    pub fn pair_distance_sq(&self, i: usize, j: usize) -> Option<Vec<f64>> {
        self.states
            .iter()
            .map(|s| match s {
                State::Full(c) => Some(c.distance_sq(i, j)),
                State::Reduced(c) => Some(c.distance_sq(i, j)),
                _ => None,
            })
            .collect()
    }

    fn record(&mut self, sim: &Simulator, cluster_radius: Option<f64>) {
        self.times.push(sim.time());
        self.states.push(sim.state.clone());
        self.energies.push(sim.energy());
        self.local_times.push(sim.ledger.values().to_vec());
        let flag = match (cluster_radius, &sim.state) {
            (Some(radius), State::Reduced(c)) if c.count() == 3 => forms_cluster(c, radius).ok(),
            _ => None,
        };
        self.cluster.push(flag);
    }
}

/// Runs one trajectory to `p.t_max`, sampling every `stride` steps and at the horizon.
pub fn simulate_trajectory(kind: ProcessKind, init: State, p: &SimParams, opts: &TrajectoryOptions) -> Result<Trajectory> {
    if opts.stride == 0 {
        return Err(Error::Domain("stride must be at least 1".into()));
    }
    let mut sim = Simulator::new(kind, init, *p, opts.index)?;
    let mut traj = Trajectory {
        kind,
        times: Vec::new(),
        states: Vec::new(),
        energies: Vec::new(),
        local_times: Vec::new(),
        cluster: Vec::new(),
        audit: ReflectionAudit::default(),
    };
    traj.record(&sim, opts.cluster_radius);
    let n_steps = p.n_steps();
    while sim.steps < n_steps {
        sim.step()?;
        if sim.steps % opts.stride == 0 || sim.steps == n_steps {
            traj.record(&sim, opts.cluster_radius);
        }
    }
    traj.audit = sim.audit;
    Ok(traj)
}

/// Evaluates `f` on replicate indices `0..n` in parallel; results are in index order.
pub fn run_ensemble<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..n as u64).into_par_iter().map(f).collect()
}
