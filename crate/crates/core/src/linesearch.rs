//! Backtracking stepsize search for the projection methods.
//!
//! Starting from the previous stepsize, trials shrink geometrically until
//! the resolvent point `x̄ = J_{αB}(x − α(A₁+A₂)x)` satisfies
//!
//! `α ⟨A₂x − A₂x̄, x − x̄⟩ ≤ δ ‖x − x̄‖²`.
//!
//! The accepted stepsize is the trial value itself, so the sequence of
//! accepted stepsizes is nonincreasing across iterations and, when `A₂` is
//! `L`-Lipschitz, never falls below `min(α_init, δ/L)` on the trial grid:
//! a trial can only fail while it is still larger than `δ/L`.

use thiserror::Error;

use crate::linalg::Vector;
use crate::operators::OperatorError;
use crate::problems::ProblemInstance;
use crate::tol;

#[derive(Debug, Error)]
pub enum LineSearchError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("no stepsize accepted after {trials} trials (last alpha {last_alpha:.3e})")]
    TrialsExhausted { trials: u32, last_alpha: f64 },
}

#[derive(Clone, Debug)]
pub struct LineSearchResult {
    /// Accepted stepsize `α_prev · θ^j`.
    pub alpha: f64,
    /// Index of the accepted trial; minimal by construction.
    pub j: u32,
    /// Resolvent point at the accepted stepsize.
    pub x_bar: Vector,
    /// Resolvent evaluations spent (`j + 1`).
    pub trials: u32,
}

/// Run the backtracking search at the current iterate.
///
/// `A₁x`, `A₂x` are evaluated once; each trial costs one resolvent and one
/// `A₂` evaluation. A step `‖x − x̄‖` at roundoff scale is accepted
/// immediately: the iterate is a fixed point and the acceptance inequality
/// is vacuous there.
pub fn backtrack(
    problem: &ProblemInstance,
    x: &Vector,
    alpha_prev: f64,
    theta: f64,
    delta: f64,
    max_trials: u32,
) -> Result<LineSearchResult, LineSearchError> {
    debug_assert!(alpha_prev.is_finite() && alpha_prev > 0.0);
    debug_assert!(theta > 0.0 && theta < 1.0);
    debug_assert!(delta > 0.0 && delta < 1.0);
    debug_assert!(max_trials >= 1);

    let forward = problem.forward(x)?;
    let a2_x = problem.a2().eval(x)?;
    let degenerate = tol::DEGENERATE_REL * x.norm().max(1.0);

    let mut alpha = alpha_prev;
    for j in 0..max_trials {
        let x_bar = problem.b().resolvent(alpha, &x.axpy(-alpha, &forward))?;
        let diff = x - &x_bar;
        let step = diff.norm();
        if step <= degenerate {
            return Ok(LineSearchResult { alpha, j, x_bar, trials: j + 1 });
        }
        let a2_x_bar = problem.a2().eval(&x_bar)?;
        let lhs = alpha * (&a2_x - &a2_x_bar).dot(&diff);
        if lhs <= delta * diff.norm_sq() {
            return Ok(LineSearchResult { alpha, j, x_bar, trials: j + 1 });
        }
        alpha *= theta;
    }
    Err(LineSearchError::TrialsExhausted { trials: max_trials, last_alpha: alpha / theta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{SetValuedSpec, SingleValuedSpec};
    use crate::problems::SolutionSet;

    fn v(data: &[f64]) -> Vector {
        Vector::new(data.to_vec())
    }

    fn unconstrained(a2: SingleValuedSpec, dim: usize) -> ProblemInstance {
        ProblemInstance::new(
            "test",
            SingleValuedSpec::zero(),
            a2,
            SetValuedSpec::zero(),
            dim,
            SolutionSet::Unknown,
        )
        .unwrap()
    }

    #[test]
    fn skew_field_accepts_the_first_trial() {
        // For the quarter-turn field the acceptance left-hand side is an
        // exactly zero inner product, so no backtracking ever happens.
        let problem = crate::problems::by_name("rotation2d").unwrap();
        let res = backtrack(&problem, &v(&[1.0, 0.0]), 1.0, 0.5, 0.5, 60).unwrap();
        assert_eq!((res.j, res.trials), (0, 1));
        assert_eq!(res.alpha, 1.0);
        assert_eq!(res.x_bar.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn identity_field_backtracks_to_delta() {
        // A₂ = identity makes the acceptance inequality exactly α ≤ δ, so
        // trials 1 and 0.5 fail and 0.25 is accepted with equality.
        let problem = unconstrained(SingleValuedSpec::scaled_identity(1.0).unwrap(), 2);
        let res = backtrack(&problem, &v(&[1.0, 0.0]), 1.0, 0.5, 0.25, 60).unwrap();
        assert_eq!((res.j, res.trials), (2, 3));
        assert_eq!(res.alpha, 0.25);
        assert_eq!(res.x_bar.as_slice(), &[0.75, 0.0]);
    }

    #[test]
    fn accepted_stepsize_never_exceeds_the_previous_one() {
        let problem = crate::problems::by_name("box_vip").unwrap();
        let mut alpha = 1.0;
        let mut x = v(&[0.9, 0.1]);
        for _ in 0..20 {
            let res = backtrack(&problem, &x, alpha, 0.5, 0.5, 60).unwrap();
            assert!(res.alpha <= alpha);
            alpha = res.alpha;
            x = res.x_bar;
        }
    }

    #[test]
    fn fixed_point_is_accepted_immediately() {
        let problem = crate::problems::by_name("rotation2d").unwrap();
        let res = backtrack(&problem, &Vector::zeros(2), 0.7, 0.5, 0.5, 60).unwrap();
        assert_eq!((res.j, res.trials), (0, 1));
        assert_eq!(res.alpha, 0.7);
        assert_eq!(res.x_bar.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn pathological_scaling_exhausts_the_trial_budget() {
        // Acceptance needs α ≤ δ/1e6; ten halvings cannot get there.
        let problem = unconstrained(SingleValuedSpec::scaled_identity(1e6).unwrap(), 2);
        let err = backtrack(&problem, &v(&[1.0, 0.0]), 1.0, 0.5, 0.5, 10).unwrap_err();
        match err {
            LineSearchError::TrialsExhausted { trials: 10, .. } => {}
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn backtracking_is_deterministic() {
        let problem = crate::problems::by_name("box_vip").unwrap();
        let x = v(&[0.37, -0.22]);
        let a = backtrack(&problem, &x, 1.0, 0.5, 0.5, 60).unwrap();
        let b = backtrack(&problem, &x, 1.0, 0.5, 0.5, 60).unwrap();
        assert_eq!(a.alpha, b.alpha);
        assert_eq!(a.j, b.j);
        assert_eq!(a.x_bar.as_slice(), b.x_bar.as_slice());
    }

    #[test]
    fn acceptance_implies_the_separation_lower_bound() {
        // Accepted trials satisfy ⟨(x−x̄)/α − (A₂x−A₂x̄), x−x̄⟩ ≥ (1−δ)/α ‖x−x̄‖².
        let problem = crate::problems::by_name("box_vip").unwrap();
        let delta = 0.5;
        for seed in 0..20 {
            let x = v(&[(seed as f64 * 0.37).sin() * 2.0, (seed as f64 * 0.71).cos() * 2.0]);
            let res = backtrack(&problem, &x, 1.0, 0.5, delta, 60).unwrap();
            let diff = &x - &res.x_bar;
            if diff.norm() == 0.0 {
                continue;
            }
            let a2_x = problem.a2().eval(&x).unwrap();
            let a2_bar = problem.a2().eval(&res.x_bar).unwrap();
            let normal = &diff.scale(1.0 / res.alpha) - &(&a2_x - &a2_bar);
            let lower = (1.0 - delta) / res.alpha * diff.norm_sq();
            assert!(normal.dot(&diff) >= lower - 1e-12);
        }
    }
}
