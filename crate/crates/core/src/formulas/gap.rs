//! Spectral gap of the reflected affine diffusion `z = y^2 - r^2/4`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::tricomi::tricomi_u;
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: (f64, f64) = (-50.0, 0.0);
const FIRST_STEP: f64 = 1e-3;
const MAX_STEP: f64 = 0.05;
const GROWTH: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub a: f64,
    pub x_a: f64,
    pub gap: f64,
    /// `|U(x_a + 1, 1 + d/2, a r^2)|` at the returned root.
    pub residual: f64,
}

/// First zero below 0 of `x -> U(x + 1, 1 + d/2, a r^2)`, searched on `[lo, hi)`
/// with steps that grow geometrically away from `hi`.
pub fn first_negative_zero(a: f64, d: usize, r: f64, window: (f64, f64)) -> Result<(f64, f64)> {
    if !(a > 0.0) || !(r > 0.0) {
        return Err(Error::Domain(format!("need a > 0 and r > 0, got a = {a}, r = {r}")));
    }
    let (lo, hi) = window;
    if !(lo < hi) || hi > 0.0 {
        return Err(Error::Domain(format!("search window [{lo}, {hi}) must lie in x <= 0")));
    }
    let b = 1.0 + d as f64 / 2.0;
    let z = a * r * r;
    let f = |x: f64| tricomi_u(x + 1.0, b, z);
    let mut x_hi = hi;
    let mut f_hi = f(x_hi)?;
    let mut step = FIRST_STEP;
    while x_hi > lo {
        let x_lo = (x_hi - step).max(lo);
        let f_lo = f(x_lo)?;
        if f_lo == 0.0 {
            return Ok((x_lo, 0.0));
        }
        if f_lo.signum() != f_hi.signum() && f_hi != 0.0 {
            return bisect(&f, x_lo, x_hi, f_lo);
        }
        x_hi = x_lo;
        f_hi = f_lo;
        step = (step * GROWTH).min(MAX_STEP);
    }
    Err(Error::RootNotFound { b, z, lo, hi })
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<(f64, f64)> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, 0.0));
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)?.abs()))
}

/// `-4 a x_a`, the spectral gap of the affine diffusion.
pub fn spectral_gap_affine(a: f64, d: usize, r: f64, window: (f64, f64)) -> Result<f64> {
    let (x, _) = first_negative_zero(a, d, r, window)?;
    Ok(-4.0 * a * x)
}

pub fn gap_table(a_grid: &[f64], d: usize, r: f64, window: (f64, f64)) -> Result<Vec<GapRow>> {
    a_grid
        .iter()
        .map(|&a| {
            let (x_a, residual) = first_negative_zero(a, d, r, window)?;
            Ok(GapRow {
                a,
                x_a,
                gap: -4.0 * a * x_a,
                residual,
            })
        })
        .collect()
}

pub fn write_gap_csv<W: Write>(mut w: W, rows: &[GapRow]) -> std::io::Result<()> {
    writeln!(w, "a,x_a,gap")?;
    for row in rows {
        writeln!(w, "{},{},{}", row.a, row.x_a, row.gap)?;
    }
    Ok(())
}
