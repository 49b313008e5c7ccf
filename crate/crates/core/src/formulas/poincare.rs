use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided bounds on the Poincaré constant of the reduced invariant law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareBounds {
    pub lower: f64,
    pub upper: f64,
    /// `1 / upper`: guaranteed L² decay rate.
    pub implied_variance_rate: f64,
    /// Half the variance rate: guaranteed total-variation decay rate.
    pub implied_tv_rate: f64,
}

pub fn poincare_bounds(a: f64, d: usize, r: f64) -> Result<PoincareBounds> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("Poincaré bounds need a > 0, got {a}")));
    }
    let geometric = r * r / (4.0 * d as f64);
    let lower = (1.0 / (8.0 * a)).max(geometric);
    let upper = 1.0 / (4.0 * a) + geometric;
    let theta = 1.0 / upper;
    Ok(PoincareBounds {
        lower,
        upper,
        implied_variance_rate: theta,
        implied_tv_rate: theta / 2.0,
    })
}

/// Bakry–Émery bound for the radial law: `C_P(nu_a) <= 1/(8a)`.
pub fn radial_poincare_upper(a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("need a > 0, got {a}")));
    }
    Ok(1.0 / (8.0 * a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_case() {
        let b = poincare_bounds(1.0, 2, 1.0).unwrap();
        assert_eq!((b.lower, b.upper), (0.125, 0.375));
        assert_eq!(b.implied_tv_rate, 0.5 / 0.375);
        assert_eq!(radial_poincare_upper(1.0).unwrap(), 0.125);
    }

    #[test]
    fn strong_attraction_limit() {
        let b = poincare_bounds(1e12, 2, 1.0).unwrap();
        assert!((b.lower - 0.125).abs() < 1e-12 && (b.upper - 0.125).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_a() {
        assert!(poincare_bounds(0.0, 2, 1.0).is_err());
        assert!(poincare_bounds(-1.0, 2, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn ordered(a in 0.01f64..100.0, d in 1usize..8, r in 0.1f64..3.0) {
            let b = poincare_bounds(a, d, r).unwrap();
            prop_assert!(b.lower <= b.upper);
            prop_assert!(0.5 * (1.0 / (8.0 * a) + r * r / (4.0 * d as f64)) <= b.lower);
        }
    }
}
