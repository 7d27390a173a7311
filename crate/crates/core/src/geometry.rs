//! Halfspaces and the projections the solvers are built from.
//!
//! Both projection-based methods work with two halfspaces per iteration: a
//! *separating* halfspace cut from the line-search output, which contains
//! every solution but not the current iterate, and a *best-approximation*
//! halfspace anchored at the iterate, which keeps the run inside the region
//! where the nearest solution to the start point is still reachable.
//!
//! The two-halfspace projection is solved by enumerating the KKT cases
//! (no constraint active, one active, both active) rather than trusting a
//! single closed-form branch; the unique candidate that is feasible with
//! nonnegative multipliers is the projection.

use thiserror::Error;

use crate::linalg::Vector;
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("separating normal vanished: iterate solves the inclusion to working precision")]
    SolutionDetected,
    #[error("the two halfspaces do not intersect")]
    EmptyIntersection,
}

/// Closed halfspace `{ x : ⟨normal, x − anchor⟩ ≤ offset }`.
///
/// A degenerate halfspace (zero normal) represents the whole space.
#[derive(Clone, Debug)]
pub struct Halfspace {
    normal: Vector,
    anchor: Vector,
    offset: f64,
    degenerate: bool,
}

impl Halfspace {
    pub fn new(normal: Vector, anchor: Vector, offset: f64) -> Self {
        assert_eq!(normal.dim(), anchor.dim(), "halfspace: dimension mismatch");
        Halfspace { normal, anchor, offset, degenerate: false }
    }

    pub fn whole_space(anchor: Vector) -> Self {
        let dim = anchor.dim();
        Halfspace { normal: Vector::zeros(dim), anchor, offset: 0.0, degenerate: true }
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// `offset − ⟨normal, x − anchor⟩`: nonnegative inside, negative outside.
    pub fn margin(&self, x: &Vector) -> f64 {
        if self.degenerate {
            return f64::INFINITY;
        }
        self.offset - self.normal.dot(&(x - &self.anchor))
    }

    pub fn contains(&self, x: &Vector, slack: f64) -> bool {
        self.margin(x) >= -slack
    }

    /// Metric projection onto the halfspace. Points inside (or on the
    /// boundary) are returned unchanged.
    pub fn project(&self, w: &Vector) -> Vector {
        if self.degenerate {
            return w.clone();
        }
        let violation = -self.margin(w);
        if violation <= 0.0 {
            return w.clone();
        }
        w.axpy(-violation / self.normal.norm_sq(), &self.normal)
    }
}

/// Build the separating halfspace from a line-search point.
///
/// The normal is `(x − x̄)/α − (A₂x − A₂x̄)` and the offset grants the slack
/// fraction `margin_coeff/α · ‖x − x̄‖²`, so every zero of the inclusion lies
/// inside while the iterate `x` stays strictly outside until it is itself a
/// solution. A vanishing normal is reported as `SolutionDetected`.
pub fn separating_halfspace(
    x: &Vector,
    x_bar: &Vector,
    alpha: f64,
    a2_x: &Vector,
    a2_x_bar: &Vector,
    margin_coeff: f64,
) -> Result<Halfspace, GeometryError> {
    assert!(alpha > 0.0, "separating_halfspace: alpha must be positive");
    let diff = x - x_bar;
    let normal = &diff.scale(1.0 / alpha) - &(a2_x - a2_x_bar);
    let scale = (x.norm() / alpha).max(1.0);
    if normal.norm() <= tol::NORMAL_DEGENERATE_REL * scale {
        return Err(GeometryError::SolutionDetected);
    }
    let offset = margin_coeff / alpha * diff.norm_sq();
    Ok(Halfspace::new(normal, x_bar.clone(), offset))
}

/// Build the best-approximation halfspace `{ x : ⟨x0 − xk, x − xk⟩ ≤ 0 }`.
///
/// At the start point (`xk == x0`) the normal vanishes and the halfspace is
/// the whole space, flagged degenerate.
pub fn best_approx_halfspace(x0: &Vector, xk: &Vector) -> Halfspace {
    let normal = x0 - xk;
    if normal.norm() <= tol::NORMAL_DEGENERATE_REL * x0.norm().max(1.0) {
        return Halfspace::whole_space(xk.clone());
    }
    Halfspace::new(normal, xk.clone(), 0.0)
}

/// Which constraints are active at the two-halfspace projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActiveSet {
    Neither,
    First,
    Second,
    Both,
}

/// Result of projecting onto the intersection of two halfspaces.
///
/// The multipliers are stated against the stored (unnormalized) normals:
/// `point = x0 − lambda1 * n1 − lambda2 * n2`, both nonnegative, each zero
/// unless its constraint is active.
#[derive(Clone, Debug)]
pub struct TwoHalfspaceProjection {
    pub point: Vector,
    pub lambda1: f64,
    pub lambda2: f64,
    pub active: ActiveSet,
}

struct UnitHalfspace {
    // Unit normal and right-hand side of `⟨v, u⟩ ≤ c`; `scale` restores
    // multipliers for the original normal.
    v: Vector,
    c: f64,
    scale: f64,
}

impl UnitHalfspace {
    fn from(h: &Halfspace) -> Self {
        let norm = h.normal.norm();
        let v = h.normal.scale(1.0 / norm);
        let c = (h.offset + h.normal.dot(&h.anchor)) / norm;
        UnitHalfspace { v, c, scale: norm }
    }

    fn violation(&self, u: &Vector) -> f64 {
        self.v.dot(u) - self.c
    }
}

/// Projection of `x0` onto the intersection of two halfspaces.
///
/// Enumerates the KKT cases in the order neither / first / second / both and
/// returns the unique candidate that is feasible with nonnegative
/// multipliers. Nearly parallel normals (Gram condition beyond
/// `tol::GRAM_CONDITION_MAX`, or Cauchy-Schwarz defect below
/// `tol::LINEAR_DEPENDENCE_REL`) are handled by the single-constraint cases;
/// in particular, when the second normal is a positive multiple of the first
/// the result equals `first.project(x0)` exactly.
pub fn project_intersection(
    first: &Halfspace,
    second: &Halfspace,
    x0: &Vector,
) -> Result<TwoHalfspaceProjection, GeometryError> {
    match (first.degenerate, second.degenerate) {
        (true, true) => {
            return Ok(TwoHalfspaceProjection {
                point: x0.clone(),
                lambda1: 0.0,
                lambda2: 0.0,
                active: ActiveSet::Neither,
            })
        }
        (false, true) => return Ok(single_projection(first, x0, ActiveSet::First)),
        (true, false) => return Ok(single_projection(second, x0, ActiveSet::Second)),
        (false, false) => {}
    }

    let h1 = UnitHalfspace::from(first);
    let h2 = UnitHalfspace::from(second);
    let feas = tol::FEASIBILITY * scale_of(x0, first, second);
    let s1 = h1.violation(x0);
    let s2 = h2.violation(x0);

    if s1 <= feas && s2 <= feas {
        return Ok(TwoHalfspaceProjection {
            point: x0.clone(),
            lambda1: 0.0,
            lambda2: 0.0,
            active: ActiveSet::Neither,
        });
    }

    let cos = h1.v.dot(&h2.v);
    if cos >= 1.0 - tol::LINEAR_DEPENDENCE_REL {
        // Same-direction parallel normals: the constraints are nested, so
        // projecting onto the tighter one projects onto the intersection.
        return Ok(if h1.c <= h2.c {
            single_projection(first, x0, ActiveSet::First)
        } else {
            single_projection(second, x0, ActiveSet::Second)
        });
    }
    if cos <= -(1.0 - tol::LINEAR_DEPENDENCE_REL) {
        // Opposite-direction parallel normals bound a slab, possibly empty.
        if -h2.c > h1.c + feas {
            return Err(GeometryError::EmptyIntersection);
        }
        return Ok(if s1 > feas {
            single_projection(first, x0, ActiveSet::First)
        } else {
            single_projection(second, x0, ActiveSet::Second)
        });
    }

    // Single-constraint cases: projection onto one boundary that happens to
    // satisfy the other constraint.
    if s1 > 0.0 {
        let u = x0.axpy(-s1, &h1.v);
        if h2.violation(&u) <= feas {
            return Ok(TwoHalfspaceProjection {
                point: u,
                lambda1: s1 / h1.scale,
                lambda2: 0.0,
                active: ActiveSet::First,
            });
        }
    }
    if s2 > 0.0 {
        let u = x0.axpy(-s2, &h2.v);
        if h1.violation(&u) <= feas {
            return Ok(TwoHalfspaceProjection {
                point: u,
                lambda1: 0.0,
                lambda2: s2 / h2.scale,
                active: ActiveSet::Second,
            });
        }
    }

    // Both constraints active: unit-normal Gram system
    //   [1   cos] [λ1]   [s1]
    //   [cos   1] [λ2] = [s2].
    let cond = (1.0 + cos.abs()) / (1.0 - cos.abs());
    if cond <= tol::GRAM_CONDITION_MAX {
        let det = 1.0 - cos * cos;
        let l1 = (s1 - cos * s2) / det;
        let l2 = (s2 - cos * s1) / det;
        if l1 >= -feas && l2 >= -feas {
            let l1 = l1.max(0.0);
            let l2 = l2.max(0.0);
            let u = x0.axpy(-l1, &h1.v).axpy(-l2, &h2.v);
            return Ok(TwoHalfspaceProjection {
                point: u,
                lambda1: l1 / h1.scale,
                lambda2: l2 / h2.scale,
                active: ActiveSet::Both,
            });
        }
    }

    // Non-parallel halfspaces always intersect, so reaching this point means
    // the case selection was defeated by conditioning.
    Err(GeometryError::EmptyIntersection)
}

fn single_projection(h: &Halfspace, x0: &Vector, which: ActiveSet) -> TwoHalfspaceProjection {
    let point = h.project(x0);
    let lambda = if h.degenerate {
        0.0
    } else {
        (-h.margin(x0)).max(0.0) / h.normal.norm_sq()
    };
    let active = if lambda > 0.0 { which } else { ActiveSet::Neither };
    let (lambda1, lambda2) = match which {
        ActiveSet::First => (lambda, 0.0),
        ActiveSet::Second => (0.0, lambda),
        _ => (0.0, 0.0),
    };
    TwoHalfspaceProjection { point, lambda1, lambda2, active }
}

fn scale_of(x0: &Vector, a: &Halfspace, b: &Halfspace) -> f64 {
    x0.norm().max(a.anchor.norm()).max(b.anchor.norm()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(data: &[f64]) -> Vector {
        Vector::new(data.to_vec())
    }

    #[test]
    fn separating_halfspace_pure_forward_backward() {
        // No skew part: normal is (x − x̄)/α.
        let x = v(&[1.0, 0.0]);
        let x_bar = v(&[0.5, 0.0]);
        let zero = Vector::zeros(2);
        let h = separating_halfspace(&x, &x_bar, 0.5, &zero, &zero, 0.25).unwrap();
        assert_eq!(h.normal().as_slice(), &[1.0, 0.0]);
        assert_eq!(h.offset(), 0.125);
        assert!(h.contains(&v(&[0.0, 0.0]), 0.0));
        assert!(!h.contains(&x, 0.0));
    }

    #[test]
    fn separating_halfspace_quarter_turn_contains_origin() {
        // Quarter-turn field at x = (1,0), α = 1: x̄ = (1,1), normal (1,−1),
        // offset 0.25; the unique zero at the origin sits exactly on margin
        // 0.25 here.
        let x = v(&[1.0, 0.0]);
        let x_bar = v(&[1.0, 1.0]);
        let a2_x = v(&[0.0, -1.0]);
        let a2_x_bar = v(&[1.0, -1.0]);
        let h = separating_halfspace(&x, &x_bar, 1.0, &a2_x, &a2_x_bar, 0.25).unwrap();
        assert_eq!(h.normal().as_slice(), &[1.0, -1.0]);
        assert_eq!(h.offset(), 0.25);
        assert!(h.contains(&Vector::zeros(2), 0.0));
        assert!(!h.contains(&x, 0.0));
    }

    #[test]
    fn separating_halfspace_degenerate_normal_is_solution() {
        let x = v(&[1.0, 2.0]);
        let err = separating_halfspace(&x, &x, 0.5, &Vector::zeros(2), &Vector::zeros(2), 0.25)
            .unwrap_err();
        assert_eq!(err, GeometryError::SolutionDetected);
    }

    #[test]
    fn best_approx_halfspace_start_is_whole_space() {
        let x0 = v(&[1.0, 2.0]);
        let h = best_approx_halfspace(&x0, &x0);
        assert!(h.is_degenerate());
        assert!(h.contains(&v(&[100.0, -3.0]), 0.0));
        assert_eq!(h.project(&v(&[7.0, 7.0])).as_slice(), &[7.0, 7.0]);
    }

    #[test]
    fn best_approx_halfspace_separates_start_from_far_side() {
        let h = best_approx_halfspace(&v(&[1.0, 0.0]), &v(&[0.0, 0.0]));
        assert!(h.contains(&v(&[-1.0, 5.0]), 0.0));
        assert!(!h.contains(&v(&[1.0, 0.0]), 0.0));
        // The anchor itself is on the boundary.
        assert_eq!(h.margin(&v(&[0.0, 0.0])), 0.0);
    }

    #[test]
    fn project_drops_violating_component() {
        let h = Halfspace::new(v(&[1.0, 0.0]), Vector::zeros(2), 0.0);
        assert_eq!(h.project(&v(&[2.0, 3.0])).as_slice(), &[0.0, 3.0]);
        assert_eq!(h.project(&v(&[-1.0, 5.0])).as_slice(), &[-1.0, 5.0]);
        assert_eq!(h.project(&v(&[0.0, -4.0])).as_slice(), &[0.0, -4.0]);
    }

    #[test]
    fn project_handles_unnormalized_normal_and_offset() {
        // {u : ⟨(2,0), u⟩ ≤ 4} = {u1 ≤ 2}.
        let h = Halfspace::new(v(&[2.0, 0.0]), Vector::zeros(2), 4.0);
        assert_eq!(h.project(&v(&[5.0, 1.0])).as_slice(), &[2.0, 1.0]);
    }

    #[test]
    fn intersection_feasible_start_returns_start() {
        let t = Halfspace::new(v(&[1.0, 0.0]), Vector::zeros(2), 0.0);
        let g = Halfspace::new(v(&[0.0, 1.0]), Vector::zeros(2), 0.0);
        let p = project_intersection(&t, &g, &v(&[-1.0, -2.0])).unwrap();
        assert_eq!(p.point.as_slice(), &[-1.0, -2.0]);
        assert_eq!(p.active, ActiveSet::Neither);
        assert_eq!((p.lambda1, p.lambda2), (0.0, 0.0));
    }

    #[test]
    fn intersection_corner_case_has_unit_multipliers() {
        let t = Halfspace::new(v(&[1.0, 0.0]), Vector::zeros(2), 0.0);
        let g = Halfspace::new(v(&[0.0, 1.0]), Vector::zeros(2), 0.0);
        let p = project_intersection(&t, &g, &v(&[1.0, 1.0])).unwrap();
        assert_eq!(p.point.as_slice(), &[0.0, 0.0]);
        assert_eq!(p.active, ActiveSet::Both);
        assert_eq!((p.lambda1, p.lambda2), (1.0, 1.0));
    }

    #[test]
    fn intersection_single_active_constraint() {
        let t = Halfspace::new(v(&[1.0, 0.0]), Vector::zeros(2), 0.0);
        let g = Halfspace::new(v(&[0.0, 1.0]), Vector::zeros(2), 0.0);
        let p = project_intersection(&t, &g, &v(&[3.0, -1.0])).unwrap();
        assert_eq!(p.point.as_slice(), &[0.0, -1.0]);
        assert_eq!(p.active, ActiveSet::First);
        assert_eq!((p.lambda1, p.lambda2), (3.0, 0.0));
    }

    #[test]
    fn intersection_with_degenerate_second_projects_onto_first() {
        let t = Halfspace::new(v(&[1.0, 0.0]), Vector::zeros(2), 0.0);
        let g = Halfspace::whole_space(Vector::zeros(2));
        let x0 = v(&[2.0, 3.0]);
        let p = project_intersection(&t, &g, &x0).unwrap();
        assert_eq!(p.point.as_slice(), t.project(&x0).as_slice());
        assert_eq!(p.active, ActiveSet::First);
        assert_eq!((p.lambda1, p.lambda2), (2.0, 0.0));
    }

    #[test]
    fn intersection_parallel_same_direction_equals_single_projection() {
        // Second normal is a positive multiple of the first, with a looser
        // bound, exactly the geometry of a best-approximation cut whose
        // direction matches the separating normal.
        let t = Halfspace::new(v(&[1.0, 0.0]), Vector::zeros(2), 0.0);
        let g = Halfspace::new(v(&[2.0, 0.0]), v(&[3.0, 0.0]), 0.0);
        let x0 = v(&[2.0, 1.0]);
        let p = project_intersection(&t, &g, &x0).unwrap();
        let direct = t.project(&x0);
        assert_eq!(p.point.as_slice(), direct.as_slice());
        assert_eq!(p.active, ActiveSet::First);
        assert_eq!(p.lambda2, 0.0);
    }

    #[test]
    fn intersection_antiparallel_empty_slab_is_rejected() {
        let t = Halfspace::new(v(&[1.0, 0.0]), Vector::zeros(2), 0.0); // u1 ≤ 0
        let g = Halfspace::new(v(&[-1.0, 0.0]), v(&[1.0, 0.0]), 0.0); // u1 ≥ 1
        let err = project_intersection(&t, &g, &v(&[0.5, 0.0])).unwrap_err();
        assert_eq!(err, GeometryError::EmptyIntersection);
    }

    #[test]
    fn intersection_antiparallel_slab_clamps() {
        let t = Halfspace::new(v(&[1.0, 0.0]), Vector::zeros(2), 0.0); // u1 ≤ 0
        let g = Halfspace::new(v(&[-1.0, 0.0]), v(&[-1.0, 0.0]), 0.0); // u1 ≥ −1
        let p = project_intersection(&t, &g, &v(&[-5.0, 2.0])).unwrap();
        assert_eq!(p.point.as_slice(), &[-1.0, 2.0]);
        assert_eq!(p.active, ActiveSet::Second);
    }

    #[test]
    fn intersection_point_satisfies_kkt() {
        let t = Halfspace::new(v(&[1.0, 1.0]), v(&[0.5, 0.0]), 0.2);
        let g = Halfspace::new(v(&[-1.0, 2.0]), v(&[0.0, -1.0]), 0.1);
        let x0 = v(&[4.0, 3.0]);
        let p = project_intersection(&t, &g, &x0).unwrap();
        // Stationarity: x0 − point = λ1 n1 + λ2 n2.
        let rebuilt = p.point.axpy(p.lambda1, t.normal()).axpy(p.lambda2, g.normal());
        assert!(rebuilt.dist(&x0) <= 1e-12);
        assert!(p.lambda1 >= 0.0 && p.lambda2 >= 0.0);
        // Feasibility and complementary slackness.
        assert!(t.contains(&p.point, tol::FEASIBILITY * 10.0));
        assert!(g.contains(&p.point, tol::FEASIBILITY * 10.0));
        assert!((p.lambda1 * t.margin(&p.point)).abs() <= 1e-10);
        assert!((p.lambda2 * g.margin(&p.point)).abs() <= 1e-10);
    }

    #[test]
    fn projection_is_firmly_nonexpansive_on_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let h = Halfspace::new(v(&[1.0, -2.0, 0.5]), v(&[0.2, 0.0, -1.0]), 0.3);
        for _ in 0..200 {
            let x = Vector::new((0..3).map(|_| rng.gen_range(-5.0..5.0)).collect());
            let y = Vector::new((0..3).map(|_| rng.gen_range(-5.0..5.0)).collect());
            let px = h.project(&x);
            let py = h.project(&y);
            let lhs = px.dist(&py).powi(2) + (&(&x - &px) - &(&y - &py)).norm_sq();
            assert!(lhs <= x.dist(&y).powi(2) + tol::FIRM_NONEXPANSIVE_SLACK);
        }
    }
}
