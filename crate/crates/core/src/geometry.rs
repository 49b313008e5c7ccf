//! Configuration spaces of hard balls, admissibility, quadratic energy and
//! the triangle (median) coordinates used for three-ball systems.
//!
//! Points are stored flat, ball-major: coordinate `k` of ball `i` lives at
//! `i * d + k`. Contact distance between centers is `r` (ball radius `r/2`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for admissibility, as a multiple of `r`.
pub const FEASIBILITY_TOL_FACTOR: f64 = 1e-9;

/// Relative tolerance for the centering invariant, scaled by `n * max|y_i|`.
pub const CENTERING_TOL_FACTOR: f64 = 1e-12;

/// Read access shared by absolute and reduced configurations.
pub trait BallSystem {
    fn flat(&self) -> &[f64];
    fn count(&self) -> usize;
    fn dimension(&self) -> usize;
    fn radius(&self) -> f64;

    fn point(&self, i: usize) -> &[f64] {
        let d = self.dimension();
        &self.flat()[i * d..(i + 1) * d]
    }

    fn distance_sq(&self, i: usize, j: usize) -> f64 {
        dist_sq(self.point(i), self.point(j))
    }

    fn min_pair_distance(&self) -> f64 {
        let n = self.count();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                best = best.min(self.distance_sq(i, j));
            }
        }
        best.sqrt()
    }

    /// Default admissibility tolerance, `1e-9 * r`.
    fn feasibility_tol(&self) -> f64 {
        FEASIBILITY_TOL_FACTOR * self.radius()
    }
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

fn check_shape(flat: &[f64], n: usize, d: usize, r: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::Structural(format!("dimension must be at least 2, got {d}")));
    }
    if n < 2 {
        return Err(Error::Structural(format!("need at least 2 balls, got {n}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Structural(format!("contact distance r must be positive, got {r}")));
    }
    if flat.len() != n * d {
        return Err(Error::Structural(format!(
            "expected {} coordinates for n = {n}, d = {d}, got {}",
            n * d,
            flat.len()
        )));
    }
    if flat.iter().any(|x| !x.is_finite()) {
        return Err(Error::Structural("non-finite coordinate".into()));
    }
    Ok(())
}

fn flatten(points: &[Vec<f64>]) -> Result<(Vec<f64>, usize)> {
    let d = points.first().map(Vec::len).unwrap_or(0);
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Structural("points have mixed dimensions".into()));
    }
    Ok((points.iter().flatten().copied().collect(), d))
}

/// Absolute positions of `n` ball centers in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    positions: Vec<f64>,
    count: usize,
    dimension: usize,
    radius: f64,
}

impl Configuration {
    pub fn new(points: &[Vec<f64>], r: f64) -> Result<Self> {
        let (flat, d) = flatten(points)?;
        Self::from_flat(points.len(), d, flat, r)
    }

    pub fn from_flat(n: usize, d: usize, positions: Vec<f64>, r: f64) -> Result<Self> {
        check_shape(&positions, n, d, r)?;
        Ok(Self {
            positions,
            count: n,
            dimension: d,
            radius: r,
        })
    }

    pub fn positions_mut(&mut self) -> &mut [f64] {
        &mut self.positions
    }

    /// Rigid translation of every center by `u`.
    pub fn shifted(&self, u: &[f64]) -> Result<Self> {
        if u.len() != self.dimension {
            return Err(Error::Structural("shift vector has wrong dimension".into()));
        }
        let mut out = self.clone();
        for p in out.positions.chunks_mut(self.dimension) {
            for (x, s) in p.iter_mut().zip(u) {
                *x += s;
            }
        }
        Ok(out)
    }

    pub fn center_of_mass(&self) -> Vec<f64> {
        center(&self.positions, self.count, self.dimension)
    }

    /// Sum of squared pairwise distances over unordered pairs.
    pub fn quadratic_energy(&self) -> EnergyValue {
        EnergyValue(pair_energy(self))
    }
}

impl BallSystem for Configuration {
    fn flat(&self) -> &[f64] {
        &self.positions
    }
    fn count(&self) -> usize {
        self.count
    }
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn radius(&self) -> f64 {
        self.radius
    }
}

/// Positions relative to the center of mass; the coordinates sum to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedConfiguration {
    rel_positions: Vec<f64>,
    count: usize,
    dimension: usize,
    radius: f64,
}

impl ReducedConfiguration {
    /// Builds a reduced state, rejecting input that is not centered.
    pub fn new(points: &[Vec<f64>], r: f64) -> Result<Self> {
        let (flat, d) = flatten(points)?;
        Self::from_flat(points.len(), d, flat, r)
    }

    pub fn from_flat(n: usize, d: usize, rel_positions: Vec<f64>, r: f64) -> Result<Self> {
        check_shape(&rel_positions, n, d, r)?;
        let state = Self {
            rel_positions,
            count: n,
            dimension: d,
            radius: r,
        };
        let drift = state.centering_error();
        if drift > state.centering_tol() {
            return Err(Error::Structural(format!(
                "relative positions are not centered (|sum| = {drift:e})"
            )));
        }
        Ok(state)
    }

    /// Builds a reduced state from arbitrary points by subtracting their mean.
    pub fn centered(points: &[Vec<f64>], r: f64) -> Result<Self> {
        let (flat, d) = flatten(points)?;
        let n = points.len();
        check_shape(&flat, n, d, r)?;
        let mut state = Self {
            rel_positions: flat,
            count: n,
            dimension: d,
            radius: r,
        };
        state.recenter();
        Ok(state)
    }

    /// Equilateral contact triangle (all pairwise distances `r`) in the
    /// first two coordinate axes of `R^d`.
    pub fn equilateral(d: usize, r: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Structural("a triangle needs d >= 2".into()));
        }
        let h = r * 3f64.sqrt() / 2.0;
        let mut pts = vec![vec![0.0; d]; 3];
        pts[0][1] = h;
        pts[1][0] = -r / 2.0;
        pts[2][0] = r / 2.0;
        Self::centered(&pts, r)
    }

    /// Isosceles triangle with balls 2 and 3 in contact and ball 1 on their
    /// perpendicular bisector, placed so that the energy equals `energy`.
    pub fn stretched_triangle(d: usize, r: f64, energy: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Structural("a triangle needs d >= 2".into()));
        }
        // V = 2 (h^2 + r^2/4) + r^2 with h the apex height.
        let h_sq = (energy - r * r) / 2.0 - r * r / 4.0;
        if !(h_sq >= 0.75 * r * r) {
            return Err(Error::Domain(format!(
                "energy {energy} too small for an admissible stretched triangle"
            )));
        }
        let mut pts = vec![vec![0.0; d]; 3];
        pts[0][1] = h_sq.sqrt();
        pts[1][0] = -r / 2.0;
        pts[2][0] = r / 2.0;
        Self::centered(&pts, r)
    }

    /// The configuration viewed from its own center of mass.
    pub fn embed(&self) -> Configuration {
        Configuration {
            positions: self.rel_positions.clone(),
            count: self.count,
            dimension: self.dimension,
            radius: self.radius,
        }
    }

    pub fn rel_positions_mut(&mut self) -> &mut [f64] {
        &mut self.rel_positions
    }

    pub fn centering_error(&self) -> f64 {
        norm_sq(&sum_points(&self.rel_positions, self.count, self.dimension)).sqrt()
    }

    pub fn centering_tol(&self) -> f64 {
        let max_norm = self
            .rel_positions
            .chunks(self.dimension)
            .map(|p| norm_sq(p).sqrt())
            .fold(0.0, f64::max);
        CENTERING_TOL_FACTOR * self.count as f64 * max_norm
    }

    pub fn recenter(&mut self) {
        let c = center(&self.rel_positions, self.count, self.dimension);
        for p in self.rel_positions.chunks_mut(self.dimension) {
            for (x, m) in p.iter_mut().zip(&c) {
                *x -= m;
            }
        }
    }
}

impl BallSystem for ReducedConfiguration {
    fn flat(&self) -> &[f64] {
        &self.rel_positions
    }
    fn count(&self) -> usize {
        self.count
    }
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn radius(&self) -> f64 {
        self.radius
    }
}

fn sum_points(flat: &[f64], n: usize, d: usize) -> Vec<f64> {
    let mut s = vec![0.0; d];
    for p in flat.chunks(d).take(n) {
        for (acc, x) in s.iter_mut().zip(p) {
            *acc += x;
        }
    }
    s
}

fn center(flat: &[f64], n: usize, d: usize) -> Vec<f64> {
    let mut s = sum_points(flat, n, d);
    s.iter_mut().for_each(|x| *x /= n as f64);
    s
}

fn pair_energy<S: BallSystem + ?Sized>(s: &S) -> f64 {
    let n = s.count();
    let mut v = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            v += s.distance_sq(i, j);
        }
    }
    v
}

/// Quadratic energy in length² units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EnergyValue(pub f64);

impl EnergyValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Sum of squared distances over unordered pairs.
pub fn quadratic_energy(state: &ReducedConfiguration) -> EnergyValue {
    EnergyValue(pair_energy(state))
}

/// Subtracts the center of mass.
pub fn reduce(conf: &Configuration) -> ReducedConfiguration {
    let mut out = ReducedConfiguration {
        rel_positions: conf.positions.clone(),
        count: conf.count,
        dimension: conf.dimension,
        radius: conf.radius,
    };
    out.recenter();
    out
}

/// True iff every pairwise center distance is at least `r - tol`.
pub fn is_admissible<S: BallSystem + ?Sized>(state: &S, tol: f64) -> bool {
    let n = state.count();
    let bound = state.radius() - tol;
    let bound_sq = if bound > 0.0 { bound * bound } else { 0.0 };
    for i in 0..n {
        for j in i + 1..n {
            if !(state.distance_sq(i, j) >= bound_sq) {
                return false;
            }
        }
    }
    true
}

fn require_three(state: &ReducedConfiguration) -> Result<()> {
    if state.count() != 3 {
        return Err(Error::Unsupported(format!(
            "operation is defined for three balls, got {}",
            state.count()
        )));
    }
    Ok(())
}

/// R-cluster test: every ball has a partner at squared distance `<= 1 + R`
/// (in units where `r = 1`; in general `r^2 (1 + R)`).
pub fn forms_cluster(state: &ReducedConfiguration, cluster_radius: f64) -> Result<bool> {
    require_three(state)?;
    let thr = cluster_threshold(state.radius(), cluster_radius);
    Ok((0..3).all(|i| (0..3).any(|j| j != i && state.distance_sq(i, j) <= thr)))
}

pub(crate) fn cluster_threshold(r: f64, cluster_radius: f64) -> f64 {
    r * r * (1.0 + cluster_radius)
}

/// The ball with no partner within `sqrt(1 + R)`, if the state is not an
/// R-cluster. With three balls at most one such ball can exist unless all
/// three are mutually far, in which case the lowest index is returned.
pub fn distant_ball(state: &ReducedConfiguration, cluster_radius: f64) -> Result<Option<usize>> {
    require_three(state)?;
    let thr = cluster_threshold(state.radius(), cluster_radius);
    Ok((0..3).find(|&i| (0..3).all(|j| j == i || state.distance_sq(i, j) > thr)))
}

/// Scaled median from `apex` and its scaled opposite side:
/// `U_apex = sqrt(2/3) ((y_b + y_c)/2 - y_apex)`, `U_bc = (y_b - y_c)/sqrt(2)`
/// with `(b, c)` the next two indices in cyclic order.
pub fn median_coordinates(
    state: &ReducedConfiguration,
    apex: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    require_three(state)?;
    if apex > 2 {
        return Err(Error::Structural(format!("apex index {apex} out of range")));
    }
    let (b, c) = ((apex + 1) % 3, (apex + 2) % 3);
    let (ya, yb, yc) = (state.point(apex), state.point(b), state.point(c));
    let s = (2.0f64 / 3.0).sqrt();
    let u_apex = (0..state.dimension())
        .map(|k| s * ((yb[k] + yc[k]) / 2.0 - ya[k]))
        .collect();
    let u_opp = (0..state.dimension())
        .map(|k| (yb[k] - yc[k]) / 2f64.sqrt())
        .collect();
    Ok((u_apex, u_opp))
}

/// Inverse of [`median_coordinates`] for apex 0.
pub fn from_median_coordinates(u1: &[f64], u23: &[f64], r: f64) -> Result<ReducedConfiguration> {
    if u1.len() != u23.len() {
        return Err(Error::Structural("median coordinates differ in dimension".into()));
    }
    let d = u1.len();
    let mut flat = vec![0.0; 3 * d];
    let (s23, s6) = ((2.0f64 / 3.0).sqrt(), 6f64.sqrt());
    let h = 2f64.sqrt();
    for k in 0..d {
        flat[k] = -s23 * u1[k];
        flat[d + k] = u1[k] / s6 + u23[k] / h;
        flat[2 * d + k] = u1[k] / s6 - u23[k] / h;
    }
    check_shape(&flat, 3, d, r)?;
    let mut out = ReducedConfiguration {
        rel_positions: flat,
        count: 3,
        dimension: d,
        radius: r,
    };
    out.recenter();
    Ok(out)
}

/// `V(state) - 3 r^2`: the distance in energy from a contact triangle.
pub fn energy_excess(state: &ReducedConfiguration) -> Result<f64> {
    require_three(state)?;
    let r = state.radius();
    Ok(quadratic_energy(state).value() - 3.0 * r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tri_with_sq_distances(d12: f64, d13: f64, d23: f64) -> ReducedConfiguration {
        // Place 2 and 3 on the x-axis, solve for ball 1.
        let l23 = d23.sqrt();
        let x = (d12 - d13) / (2.0 * l23);
        let y = (d12 - (x + l23 / 2.0).powi(2)).sqrt();
        let pts = vec![vec![x, y], vec![-l23 / 2.0, 0.0], vec![l23 / 2.0, 0.0]];
        ReducedConfiguration::centered(&pts, 1.0).unwrap()
    }

    #[test]
    fn energy_of_unit_equilateral_is_three() {
        let s = ReducedConfiguration::equilateral(2, 1.0).unwrap();
        assert_relative_eq!(quadratic_energy(&s).value(), 3.0, epsilon = 1e-14);
        assert_relative_eq!(energy_excess(&s).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn energy_of_two_balls_at_contact() {
        let s = ReducedConfiguration::new(&[vec![-0.5, 0.0], vec![0.5, 0.0]], 1.0).unwrap();
        assert_relative_eq!(quadratic_energy(&s).value(), 1.0);
    }

    #[test]
    fn excess_from_squared_distances() {
        let s = tri_with_sq_distances(1.0, 1.0, 1.2);
        assert_relative_eq!(energy_excess(&s).unwrap(), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn reduce_two_balls() {
        let c = Configuration::new(&[vec![0.0, 0.0], vec![1.0, 0.0]], 1.0).unwrap();
        let y = reduce(&c);
        assert_eq!(y.point(0), &[-0.5, 0.0]);
        assert_eq!(y.point(1), &[0.5, 0.0]);
    }

    #[test]
    fn reduce_coincident_points_is_zero_and_inadmissible() {
        let c = Configuration::new(&vec![vec![2.0, 3.0]; 3], 1.0).unwrap();
        let y = reduce(&c);
        assert!(y.flat().iter().all(|&v| v == 0.0));
        assert!(!is_admissible(&y, 0.0));
    }

    #[test]
    fn admissibility_at_and_below_contact() {
        let close = Configuration::new(&[vec![0.0, 0.0], vec![0.99, 0.0]], 1.0).unwrap();
        assert!(!is_admissible(&close, 0.0));
        let touching = Configuration::new(&[vec![0.0, 0.0], vec![1.0, 0.0]], 1.0).unwrap();
        assert!(is_admissible(&touching, 0.0));
        let eq = ReducedConfiguration::equilateral(3, 1.0).unwrap();
        assert!(is_admissible(&eq, eq.feasibility_tol()));
    }

    #[test]
    fn reduced_constructor_rejects_uncentered_input() {
        let err = ReducedConfiguration::new(&[vec![0.0, 0.0], vec![1.0, 0.0]], 1.0);
        assert!(matches!(err, Err(Error::Structural(_))));
        let err = Configuration::new(&[vec![0.0, 0.0], vec![1.0]], 1.0);
        assert!(matches!(err, Err(Error::Structural(_))));
    }

    #[test]
    fn cluster_examples() {
        assert!(forms_cluster(&tri_with_sq_distances(1.2, 4.0, 1.2), 0.5).unwrap());
        assert!(!forms_cluster(&tri_with_sq_distances(1.2, 4.0, 4.0), 0.5).unwrap());
        let eq = ReducedConfiguration::equilateral(2, 1.0).unwrap();
        assert!(forms_cluster(&eq, 1e-6).unwrap());
        let two = ReducedConfiguration::new(&[vec![-0.5, 0.0], vec![0.5, 0.0]], 1.0).unwrap();
        assert!(matches!(forms_cluster(&two, 1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn distant_ball_identification() {
        let s = tri_with_sq_distances(20.0, 20.0, 1.0);
        assert_eq!(distant_ball(&s, 2.0).unwrap(), Some(0));
        let eq = ReducedConfiguration::equilateral(2, 1.0).unwrap();
        assert_eq!(distant_ball(&eq, 2.0).unwrap(), None);
    }

    #[test]
    fn medians_of_equilateral() {
        let s = ReducedConfiguration::equilateral(2, 1.0).unwrap();
        for apex in 0..3 {
            let (u, w) = median_coordinates(&s, apex).unwrap();
            assert_relative_eq!(norm_sq(&u), 0.5, epsilon = 1e-14);
            assert_relative_eq!(norm_sq(&w), 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn medians_of_collinear_state() {
        let s = ReducedConfiguration::new(&[vec![-1.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]], 1.0)
            .unwrap();
        let (u1, u23) = median_coordinates(&s, 0).unwrap();
        assert_relative_eq!(u1[0], (2.0f64 / 3.0).sqrt() * 1.5, epsilon = 1e-15);
        // (y2 - y3) / sqrt(2) with y2 = 0, y3 = e1; consistent with V = 6.
        assert_relative_eq!(u23[0], -0.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(u1[1], 0.0);
    }

    #[test]
    fn stretched_triangle_has_requested_energy() {
        let s = ReducedConfiguration::stretched_triangle(2, 1.0, 30.0).unwrap();
        assert_relative_eq!(quadratic_energy(&s).value(), 30.0, epsilon = 1e-12);
        assert!(is_admissible(&s, s.feasibility_tol()));
        assert!(ReducedConfiguration::stretched_triangle(2, 1.0, 2.0).is_err());
    }

    fn reduced_state(d: usize) -> impl Strategy<Value = ReducedConfiguration> {
        proptest::collection::vec(-5.0f64..5.0, 3 * d).prop_map(move |flat| {
            let pts: Vec<Vec<f64>> = flat.chunks(d).map(|c| c.to_vec()).collect();
            ReducedConfiguration::centered(&pts, 1.0).unwrap()
        })
    }

    proptest! {
        #[test]
        fn reduce_is_translation_invariant(
            flat in proptest::collection::vec(-5.0f64..5.0, 6),
            u in proptest::collection::vec(-10.0f64..10.0, 2),
        ) {
            let c = Configuration::from_flat(3, 2, flat, 1.0).unwrap();
            let a = reduce(&c);
            let b = reduce(&c.shifted(&u).unwrap());
            for (x, y) in a.flat().iter().zip(b.flat()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            let again = reduce(&a.embed());
            for (x, y) in a.flat().iter().zip(again.flat()) {
                prop_assert!((x - y).abs() < 1e-14);
            }
            prop_assert!(a.centering_error() <= a.centering_tol().max(1e-300));
        }

        #[test]
        fn energy_median_identity(s in reduced_state(3), apex in 0usize..3) {
            let v = quadratic_energy(&s).value();
            let (u, w) = median_coordinates(&s, apex).unwrap();
            let via_medians = 3.0 * (norm_sq(&u) + norm_sq(&w));
            prop_assert!((v - via_medians).abs() <= 1e-12 * v.max(1e-300));
            // Centered states: V = n * sum |y_i|^2.
            let centered_form = 3.0 * norm_sq(s.flat());
            prop_assert!((v - centered_form).abs() <= 1e-12 * v.max(1e-300));
        }

        #[test]
        fn median_bound_chain(s in reduced_state(2)) {
            let (u1, u23) = median_coordinates(&s, 0).unwrap();
            let (n1, n23) = (norm_sq(&u1), norm_sq(&u23));
            let (d12, d13) = (s.distance_sq(0, 1), s.distance_sq(0, 2));
            let lhs = d12 / 3.0 + d13 / 3.0 - n23 / 3.0;
            let scale = d12 + d13 + n23 + 1e-300;
            prop_assert!((lhs - n1).abs() <= 1e-12 * scale);
            for dj in [d12, d13] {
                prop_assert!(n1 <= 4.0 / 3.0 * dj + 2.0 / 3.0 * n23 + 1e-12 * scale);
            }
        }

        #[test]
        fn admissible_triangles_have_energy_at_least_three(s in reduced_state(2)) {
            if is_admissible(&s, 0.0) {
                prop_assert!(quadratic_energy(&s).value() >= 3.0 - 1e-12);
            }
        }

        #[test]
        fn cluster_is_monotone_in_radius(s in reduced_state(2), r1 in 0.0f64..50.0, extra in 0.0f64..50.0) {
            if forms_cluster(&s, r1).unwrap() {
                prop_assert!(forms_cluster(&s, r1 + extra).unwrap());
            }
        }

        #[test]
        fn median_round_trip(s in reduced_state(2)) {
            let (u1, u23) = median_coordinates(&s, 0).unwrap();
            let back = from_median_coordinates(&u1, &u23, 1.0).unwrap();
            for (x, y) in s.flat().iter().zip(back.flat()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
