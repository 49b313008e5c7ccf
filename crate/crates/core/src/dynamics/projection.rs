//! Gauss–Seidel projection onto the hard-core constraint set.

use super::ledger::pair_index;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// Net outward displacement of each ball per pair (upper-triangular order), never negative.
    pub corrections: Vec<f64>,
    /// Sweeps that changed at least one pair.
    pub sweeps: usize,
}

/// Projected Gauss–Seidel: visits pairs in lexicographic order, pushing
/// overlapping pairs apart to separation exactly `r` with the correction split
/// equally. A pair already pushed in this call may be pulled back toward
/// contact when later corrections over-separate it, as long as its net push
/// stays nonnegative. Stops once no pair is closer than `r - tol/2` and every
/// pushed pair sits within `tol/2` of contact. Only the flat buffer is modified.
pub fn project_positions(
    x: &mut [f64],
    n: usize,
    d: usize,
    r: f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<Projection> {
    let threshold = r - 0.5 * tol;
    let threshold_sq = threshold * threshold;
    let slack = r + 0.5 * tol;
    let mut corrections = vec![0.0; n * (n - 1) / 2];
    let mut sweeps = 0;
    loop {
        let mut violated = false;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let pair = pair_index(n, i, j);
                let pushed = corrections[pair];
                let mut dist_sq = 0.0;
                for k in 0..d {
                    let diff = x[i * d + k] - x[j * d + k];
                    dist_sq += diff * diff;
                }
                if dist_sq >= threshold_sq && (pushed == 0.0 || dist_sq <= slack * slack) {
                    continue;
                }
                if dist_sq == 0.0 {
                    return Err(Error::CoincidentCenters { i, j });
                }
                let dist = dist_sq.sqrt();
                if sweeps == max_sweeps {
                    worst = worst.max((r - dist).abs());
                    violated = true;
                    continue;
                }
                violated = true;
                let target = (pushed + 0.5 * (r - dist)).max(0.0);
                let change = target - pushed;
                let scale = change / dist;
                for k in 0..d {
                    let push = scale * (x[i * d + k] - x[j * d + k]);
                    x[i * d + k] += push;
                    x[j * d + k] -= push;
                }
                corrections[pair] = target;
            }
        }
        if !violated {
            return Ok(Projection { corrections, sweeps });
        }
        if sweeps == max_sweeps {
            return Err(Error::ProjectionFailed { sweeps, overlap: worst });
        }
        sweeps += 1;
    }
}
