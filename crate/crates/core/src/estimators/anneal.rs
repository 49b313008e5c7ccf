use serde::{Deserialize, Serialize};

use crate::dynamics::{dt_stability, ProcessKind, ReflectionAudit, SimParams, Simulator, State};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealSegment {
    /// End of the segment; the attraction `a` applies from the previous end.
    pub until: f64,
    pub a: f64,
}

/// Checks that segment ends increase, `a` never decreases and `p.dt` is stable
/// for every segment.
pub fn validate_anneal_schedule(segments: &[AnnealSegment], p: &SimParams) -> Result<()> {
    if segments.is_empty() {
        return Err(Error::EmptyInput("anneal schedule"));
    }
    let mut prev = AnnealSegment { until: 0.0, a: 0.0 };
    for (k, s) in segments.iter().enumerate() {
        if !(s.until > prev.until) {
            return Err(Error::Domain(format!("segment {k} ends at {} which is not after {}", s.until, prev.until)));
        }
        if !(s.a >= prev.a) {
            return Err(Error::Domain(format!("segment {k} lowers a from {} to {}", prev.a, s.a)));
        }
        if p.strict_dt && p.dt > dt_stability(s.a, p.r, p.n) * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "dt = {} exceeds the stability limit {} in segment {k} (a = {})",
                p.dt,
                dt_stability(s.a, p.r, p.n),
                s.a
            )));
        }
        prev = *s;
    }
    Ok(())
}

/// Runs one replica through the schedule and returns its final state.
pub fn anneal(kind: ProcessKind, init: State, p: &SimParams, segments: &[AnnealSegment], index: u64) -> Result<(State, ReflectionAudit)> {
    validate_anneal_schedule(segments, p)?;
    let horizon = segments.last().unwrap().until;
    let p = p.with_a(segments[0].a).with_t_max(horizon);
    let mut sim = Simulator::new(kind, init, p, index)?;
    for s in segments {
        sim.set_attraction(s.a)?;
        let end = (s.until / p.dt).round() as u64;
        while sim.steps() < end {
            sim.step()?;
        }
    }
    Ok((sim.state().clone(), *sim.audit()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_decreasing_schedule() {
        let p = SimParams::new(1.0, 1.0, 2, 2).with_dt(1e-4);
        let segs = [AnnealSegment { until: 1.0, a: 2.0 }, AnnealSegment { until: 2.0, a: 1.0 }];
        assert!(validate_anneal_schedule(&segs, &p).is_err());
        let back = [AnnealSegment { until: 1.0, a: 1.0 }, AnnealSegment { until: 1.0, a: 2.0 }];
        assert!(validate_anneal_schedule(&back, &p).is_err());
    }

    #[test]
    fn rejects_unstable_segment() {
        let p = SimParams::new(1.0, 1.0, 2, 2).with_dt(1e-3);
        let segs = [AnnealSegment { until: 1.0, a: 1.0 }, AnnealSegment { until: 2.0, a: 100.0 }];
        assert!(validate_anneal_schedule(&segs, &p).is_err());
    }

    #[test]
    fn runs_to_horizon() {
        let p = SimParams::new(1.0, 1.0, 2, 2).with_dt(1e-3);
        let segs = [AnnealSegment { until: 0.5, a: 1.0 }, AnnealSegment { until: 1.0, a: 4.0 }];
        let (s, audit) = anneal(ProcessKind::Radial, State::Scalar(1.0), &p, &segs, 0).unwrap();
        assert!(s.as_scalar().unwrap() >= 0.5);
        assert!(audit.is_clean());
        let again = anneal(ProcessKind::Radial, State::Scalar(1.0), &p, &segs, 0).unwrap();
        assert_eq!(s, again.0);
    }
}
