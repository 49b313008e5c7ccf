//! Time stepping for the hard-ball systems and their one-dimensional reductions.

mod export;
mod ledger;
mod noise;
mod params;
mod projection;
mod simulate;
mod steps;

pub use export::write_trajectory_csv;
pub use ledger::LocalTimeLedger;
pub use noise::NoiseSource;
pub use params::{dt_stability, SimParams, DEFAULT_MAX_SWEEPS};
pub use projection::{project_positions, Projection};
pub use simulate::{
    run_ensemble, simulate_trajectory, state_energy, ProcessKind, ReflectionAudit, Simulator, State, Trajectory,
    TrajectoryOptions,
};
pub use steps::{
    median_pair_update, reflected_drift_bm_update, step_affine, step_full, step_median_pair, step_radial,
    step_reduced, step_reflected_drift_bm, step_u_squared,
};

use crate::error::Result;
use crate::geometry::{BallSystem, Configuration, ReducedConfiguration};

/// `project_to_domain` for absolute configurations: returns the projected
/// state and per-pair local-time increments `delta_ij / r`.
pub fn project_to_domain(state: &Configuration, p: &SimParams) -> Result<(Configuration, Vec<f64>)> {
    let mut out = state.clone();
    let (n, d) = (out.count(), out.dimension());
    let proj = project_positions(out.positions_mut(), n, d, p.r, p.feasibility_tol, p.max_projection_sweeps)?;
    Ok((out, proj.corrections.iter().map(|c| c / p.r).collect()))
}

/// `project_to_domain` for reduced configurations; the result is re-centered.
pub fn project_reduced_to_domain(state: &ReducedConfiguration, p: &SimParams) -> Result<(ReducedConfiguration, Vec<f64>)> {
    let mut out = state.clone();
    let (n, d) = (out.count(), out.dimension());
    let proj = project_positions(out.rel_positions_mut(), n, d, p.r, p.feasibility_tol, p.max_projection_sweeps)?;
    out.recenter();
    Ok((out, proj.corrections.iter().map(|c| c / p.r).collect()))
}
