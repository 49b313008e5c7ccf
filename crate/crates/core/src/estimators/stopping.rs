use crate::dynamics::{Trajectory, State};
use crate::error::{Error, Result};
use crate::geometry::BallSystem;

use super::hitting::HittingSample;

/// Alternating passage times of a sampled series between two levels.
///
/// Entry 0 is the first sample time. Odd entries are the first later sample at
/// or below `lo`, even entries the first later sample at or above `hi`.
pub fn sigma_sequence_from_series(times: &[f64], values: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    if times.len() != values.len() {
        return Err(Error::Structural("times and values differ in length".into()));
    }
    if times.is_empty() {
        return Err(Error::EmptyInput("series"));
    }
    if !(lo < hi) {
        return Err(Error::Domain(format!("need lo < hi, got {lo} and {hi}")));
    }
    let mut seq = vec![times[0]];
    let mut downhill = true;
    for k in 1..times.len() {
        let reached = if downhill { values[k] <= lo } else { values[k] >= hi };
        if reached {
            seq.push(times[k]);
            downhill = !downhill;
        }
    }
    Ok(seq)
}

/// Passage times of `|Y_i - Y_j|^2` between `r^2 (1 + 2 eps_minus)` and `r^2 (1 + 2 eps_plus)`.
pub fn sigma_sequence(traj: &Trajectory, pair: (usize, usize), eps_minus: f64, eps_plus: f64) -> Result<Vec<f64>> {
    if !(0.0 < eps_minus && eps_minus < eps_plus) {
        return Err(Error::Domain(format!("need 0 < eps_minus < eps_plus, got {eps_minus} and {eps_plus}")));
    }
    let r2 = trajectory_radius(traj)?.powi(2);
    let values = traj
        .pair_distance_sq(pair.0, pair.1)
        .ok_or_else(|| Error::Unsupported("pair distances need ball states".into()))?;
    sigma_sequence_from_series(&traj.times, &values, r2 * (1.0 + 2.0 * eps_minus), r2 * (1.0 + 2.0 * eps_plus))
}

fn trajectory_radius(traj: &Trajectory) -> Result<f64> {
    match traj.states.first() {
        Some(State::Full(c)) => Ok(c.radius()),
        Some(State::Reduced(c)) => Ok(c.radius()),
        Some(_) => Err(Error::Unsupported("expected ball states".into())),
        None => Err(Error::EmptyInput("trajectory")),
    }
}

/// Border level at time `t`: `r_far` on downhill stretches `[sigma_{2k}, sigma_{2k+1})`,
/// `r_near` on uphill stretches.
pub fn border_level(t: f64, seq: &[f64], r_far: f64, r_near: f64) -> Result<f64> {
    if !(0.0 < r_near && r_near < r_far) {
        return Err(Error::Domain(format!("need 0 < R' < R, got R = {r_far}, R' = {r_near}")));
    }
    let Some(&start) = seq.first() else {
        return Err(Error::EmptyInput("sigma sequence"));
    };
    if t < start {
        return Err(Error::Domain(format!("t = {t} precedes the sequence start {start}")));
    }
    let passed = seq.iter().take_while(|&&s| s <= t).count();
    Ok(if passed % 2 == 1 { r_far } else { r_near })
}

/// First sample at which `distant` comes within the moving border of the other two balls.
pub fn tau1(traj: &Trajectory, r_far: f64, r_near: f64, eps_minus: f64, eps_plus: f64, distant: usize) -> Result<HittingSample> {
    if distant > 2 {
        return Err(Error::Domain(format!("distant ball index {distant} out of range")));
    }
    let (j, k) = ((distant + 1) % 3, (distant + 2) % 3);
    let pair = (j.min(k), j.max(k));
    let seq = sigma_sequence(traj, pair, eps_minus, eps_plus)?;
    let r2 = trajectory_radius(traj)?.powi(2);
    let dj = traj.pair_distance_sq(distant, pair.0).unwrap();
    let dk = traj.pair_distance_sq(distant, pair.1).unwrap();
    for m in 0..traj.len() {
        let t = traj.times[m];
        let border = border_level(t, &seq, r_far, r_near)?;
        if dj[m].min(dk[m]) <= r2 * (1.0 + border) {
            return Ok(HittingSample {
                time: t,
                state: traj.states[m].clone(),
                censored: false,
            });
        }
    }
    Ok(HittingSample {
        time: *traj.times.last().unwrap(),
        state: traj.states.last().unwrap().clone(),
        censored: true,
    })
}

/// `e^(lambda (t - min(anchor, t))) V(Y(t))` at every sample.
pub fn weighted_energy(traj: &Trajectory, lambda: f64, anchor: f64) -> Result<Vec<(f64, f64)>> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("lambda must be nonnegative, got {lambda}")));
    }
    traj.times
        .iter()
        .zip(&traj.energies)
        .map(|(&t, v)| {
            let v = v.ok_or_else(|| Error::Unsupported("trajectory carries no energies".into()))?;
            Ok((t, (lambda * (t - anchor.min(t))).exp() * v))
        })
        .collect()
}
