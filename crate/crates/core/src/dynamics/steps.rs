//! One Euler–Maruyama step for each process, with reflection.

use std::f64::consts::FRAC_1_SQRT_2;

use super::ledger::LocalTimeLedger;
use super::noise::NoiseSource;
use super::params::SimParams;
use super::projection::project_positions;
use crate::error::{Error, Result};
use crate::geometry::{BallSystem, Configuration, ReducedConfiguration};

fn check_shape<S: BallSystem>(state: &S, ledger: &LocalTimeLedger, p: &SimParams) -> Result<()> {
    if state.count() != ledger.count() {
        return Err(Error::Structural(format!(
            "ledger tracks {} balls, state has {}",
            ledger.count(),
            state.count()
        )));
    }
    if (state.radius() - p.r).abs() > 1e-15 * p.r {
        return Err(Error::Structural(format!(
            "state radius {} differs from parameter r = {}",
            state.radius(),
            p.r
        )));
    }
    Ok(())
}

/// Shared body of the full and reduced steps; `scratch` holds the Gaussian draws.
#[allow(clippy::too_many_arguments)]
pub(crate) fn step_balls(
    x: &mut [f64],
    n: usize,
    d: usize,
    centered: bool,
    ledger: &mut LocalTimeLedger,
    p: &SimParams,
    noise: &mut NoiseSource,
    scratch: &mut Vec<f64>,
) -> Result<()> {
    scratch.resize(n * d, 0.0);
    noise.fill_gaussian(scratch);
    let mut center = vec![0.0; d];
    let mut noise_mean = vec![0.0; d];
    for i in 0..n {
        for k in 0..d {
            center[k] += x[i * d + k];
            noise_mean[k] += scratch[i * d + k];
        }
    }
    let inv_n = 1.0 / n as f64;
    center.iter_mut().for_each(|c| *c *= inv_n);
    noise_mean.iter_mut().for_each(|m| *m *= inv_n);
    let sq = p.dt.sqrt();
    let pull = p.a * n as f64 * p.dt;
    for i in 0..n {
        for k in 0..d {
            let g = if centered {
                scratch[i * d + k] - noise_mean[k]
            } else {
                scratch[i * d + k]
            };
            let idx = i * d + k;
            x[idx] += sq * g - pull * (x[idx] - center[k]);
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("positions diverged to non-finite values; dt is too large".into()));
    }
    let proj = project_positions(x, n, d, p.r, p.feasibility_tol, p.max_projection_sweeps)?;
    ledger.begin_step();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if proj.corrections[k] > 0.0 {
                ledger.add(i, j, proj.corrections[k] / p.r);
            }
            k += 1;
        }
    }
    if centered {
        let mut c = vec![0.0; d];
        for i in 0..n {
            for k in 0..d {
                c[k] += x[i * d + k];
            }
        }
        for i in 0..n {
            for k in 0..d {
                x[i * d + k] -= c[k] * inv_n;
            }
        }
    }
    Ok(())
}

/// System (A): `dX_i = dW_i - a sum_j (X_i - X_j) dt + reflection`.
pub fn step_full(
    state: &mut Configuration,
    ledger: &mut LocalTimeLedger,
    p: &SimParams,
    noise: &mut NoiseSource,
) -> Result<()> {
    check_shape(state, ledger, p)?;
    let (n, d) = (state.count(), state.dimension());
    step_balls(state.positions_mut(), n, d, false, ledger, p, noise, &mut Vec::new())
}

/// System (B): the full step seen from the center of mass. The driving
/// increments are `dW_i - mean_j dW_j`.
pub fn step_reduced(
    state: &mut ReducedConfiguration,
    ledger: &mut LocalTimeLedger,
    p: &SimParams,
    noise: &mut NoiseSource,
) -> Result<()> {
    check_shape(state, ledger, p)?;
    let (n, d) = (state.count(), state.dimension());
    step_balls(state.rel_positions_mut(), n, d, true, ledger, p, noise, &mut Vec::new())
}

/// Half-distance of the two-ball system: `dy = dW/sqrt(2) - 2a y dt + (d-1)/(4y) dt`,
/// reflected at `r/2`. Returns the new value and the updated local time.
pub fn step_radial(y: f64, ell: f64, p: &SimParams, noise: &mut NoiseSource) -> Result<(f64, f64)> {
    let floor = p.r / 2.0;
    if y < floor - p.feasibility_tol {
        return Err(Error::Domain(format!("radial state {y} below the contact level {floor}")));
    }
    let drift = -2.0 * p.a * y + (p.d as f64 - 1.0) / (4.0 * y);
    let next = y + drift * p.dt + (0.5 * p.dt).sqrt() * noise.gaussian();
    if next < floor {
        // The reflection term is 2 y dL with y = r/2 at contact.
        Ok((floor, ell + (floor - next) / (2.0 * floor)))
    } else {
        Ok((next, ell))
    }
}

/// `dz = sqrt(2 (z + r^2/4)) dB + (d/2 - a r^2 - 4 a z) dt`, reflected at 0.
pub fn step_affine(z: f64, p: &SimParams, noise: &mut NoiseSource) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("affine state must be >= 0, got {z}")));
    }
    let r2 = p.r * p.r;
    let drift = p.d as f64 / 2.0 - p.a * r2 - 4.0 * p.a * z;
    let vol = (2.0 * (z + r2 / 4.0)).sqrt();
    Ok((z + drift * p.dt + vol * p.dt.sqrt() * noise.gaussian()).max(0.0))
}

/// Exact one-step transition of Brownian motion with drift `c` reflected at
/// `1/2`, given a standard normal `g` and a uniform `unif` in `(0, 1)`.
///
/// The running minimum of the free increment is drawn from its conditional
/// law given the endpoint; the Skorokhod map then adds exactly the push needed.
pub fn reflected_drift_bm_update(u: f64, c: f64, dt: f64, g: f64, unif: f64) -> f64 {
    let x = u - 0.5;
    let z = c * dt + dt.sqrt() * g;
    let m = 0.5 * (z - (z * z - 2.0 * dt * unif.ln()).sqrt());
    0.5 + x + z + (-(x + m)).max(0.0)
}

/// `dU = C dt + dB`, reflected at `1/2`.
pub fn step_reflected_drift_bm(u: f64, c: f64, p: &SimParams, noise: &mut NoiseSource) -> Result<f64> {
    if !(u >= 0.5) {
        return Err(Error::Domain(format!("state must be >= 1/2, got {u}")));
    }
    let g = noise.gaussian();
    let unif = noise.uniform_open();
    Ok(reflected_drift_bm_update(u, c, p.dt, g, unif))
}

/// `dU = (d - 6 a U) dt + 2 sqrt(U) dB`, reflected at `1/2`.
pub fn step_u_squared(u: f64, p: &SimParams, noise: &mut NoiseSource) -> Result<f64> {
    if !(u >= 0.5) {
        return Err(Error::Domain(format!("state must be >= 1/2, got {u}")));
    }
    let next = u + (p.d as f64 - 6.0 * p.a * u) * p.dt + 2.0 * u.sqrt() * p.dt.sqrt() * noise.gaussian();
    Ok(next.max(0.5))
}

/// Median-pair step from explicit driving increments (already scaled by `sqrt(dt)`).
/// `U23` is reflected radially at `|U23| = 1/sqrt(2)`; returns the local-time increment.
pub fn median_pair_update(
    u1: &mut [f64],
    u23: &mut [f64],
    db1: &[f64],
    db23: &[f64],
    a: f64,
    dt: f64,
    tol: f64,
) -> f64 {
    let damp = 3.0 * a * dt;
    for k in 0..u1.len() {
        u1[k] += db1[k] - damp * u1[k];
        u23[k] += db23[k] - damp * u23[k];
    }
    let norm = u23.iter().map(|v| v * v).sum::<f64>().sqrt();
    // Same trigger as the pairwise projection, |y2 - y3| < 1 - tol/2.
    if norm * std::f64::consts::SQRT_2 >= 1.0 - 0.5 * tol {
        return 0.0;
    }
    let scale = FRAC_1_SQRT_2 / norm;
    u23.iter_mut().for_each(|v| *v *= scale);
    // The reflection term 2 U23 dL has magnitude sqrt(2) dL at contact.
    (FRAC_1_SQRT_2 - norm) / std::f64::consts::SQRT_2
}

/// Scaled median `U1` and opposite side `U23` of a three-ball system, driven by
/// the same three Gaussian vectors a reduced three-ball step would draw.
pub fn step_median_pair(
    u1: &mut [f64],
    u23: &mut [f64],
    ell23: &mut f64,
    p: &SimParams,
    noise: &mut NoiseSource,
) -> Result<()> {
    let d = u1.len();
    if u23.len() != d {
        return Err(Error::Structural("median coordinates differ in dimension".into()));
    }
    if u23.iter().map(|v| v * v).sum::<f64>() * 2.0 < (1.0 - p.feasibility_tol).powi(2) {
        return Err(Error::Domain("|U23| below the contact level 1/sqrt(2)".into()));
    }
    let mut w = vec![0.0; 3 * d];
    noise.fill_gaussian(&mut w);
    let (db1, db23) = median_increments(&w, d, p.dt);
    *ell23 += median_pair_update(u1, u23, &db1, &db23, p.a, p.dt, p.feasibility_tol);
    Ok(())
}

/// `B1 = sqrt(2/3)((W2 + W3)/2 - W1)`, `B23 = (W2 - W3)/sqrt(2)`, scaled by `sqrt(dt)`.
pub(crate) fn median_increments(w: &[f64], d: usize, dt: f64) -> (Vec<f64>, Vec<f64>) {
    let sq = dt.sqrt();
    let s23 = (2.0f64 / 3.0).sqrt();
    let db1 = (0..d)
        .map(|k| sq * s23 * (0.5 * (w[d + k] + w[2 * d + k]) - w[k]))
        .collect();
    let db23 = (0..d).map(|k| sq * (w[d + k] - w[2 * d + k]) * FRAC_1_SQRT_2).collect();
    (db1, db23)
}
