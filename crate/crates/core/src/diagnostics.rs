//! Trace validators: the convergence guarantees of the projection methods
//! restated as executable pass/fail checks over solve traces.
//!
//! Every check is a pure function of its inputs; re-running produces an
//! identical report. Checks that do not apply to a trace (wrong method,
//! unknown solution set, no halfspace data) report `Skip` or, where a value
//! is still worth seeing, `Info`.

use std::fmt;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::linalg::Vector;
use crate::linesearch::LineSearchResult;
use crate::operators::OperatorError;
use crate::problems::{ProblemError, ProblemInstance};
use crate::solvers::{
    fbhf_step, prepare_iteration, step_along_normal, Method, SolveError, SolveResult, StepPrep,
};
pub use crate::solvers::{Trace, TraceRecord};
use crate::tol;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("equivalence run hit a geometry failure: {0}")]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Check does not apply to this trace or problem.
    Skip,
    /// Value reported for inspection without a pass/fail judgment.
    Info,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
            CheckStatus::Info => "INFO",
        })
    }
}

/// One measured property of a trace. `measured` and `threshold` carry the
/// worst observed slack and the bound it was held to, so drift stays
/// visible even while a check passes.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub status: CheckStatus,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.measured.is_nan() {
            write!(f, "{} {}: {}", self.status, self.name, self.detail)
        } else if self.threshold.is_nan() {
            write!(f, "{} {}: measured {:.3e} {}", self.status, self.name, self.measured, self.detail)
        } else {
            write!(
                f,
                "{} {}: measured {:.3e} (threshold {:.3e}) {}",
                self.status, self.name, self.measured, self.threshold, self.detail
            )
        }
    }
}

impl CheckReport {
    fn skip(name: &'static str, detail: impl Into<String>) -> Self {
        CheckReport {
            name,
            status: CheckStatus::Skip,
            measured: f64::NAN,
            threshold: f64::NAN,
            detail: detail.into(),
        }
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

/// The iterate sequence of a run: recorded start-of-iteration points plus
/// the final iterate (which equals the last record's point only when the
/// run stopped before stepping).
fn iterate_sequence(result: &SolveResult) -> Vec<&Vector> {
    let mut seq: Vec<&Vector> = result.trace.records.iter().map(|r| &r.x).collect();
    match seq.last() {
        Some(last) if last.as_slice() == result.final_x.as_slice() => {}
        _ => seq.push(&result.final_x),
    }
    seq
}

/// Distances to a solution point never increase along a run (Fejér
/// monotonicity). Holds for the relaxed projection method; forward-backward
/// on a rotation field honestly fails it.
pub fn fejer_check(result: &SolveResult, x_star: &Vector) -> CheckReport {
    let name = "fejer_monotonicity";
    let seq = iterate_sequence(result);
    let threshold = tol::MONOTONE_SEQUENCE_SLACK;
    if seq.len() < 2 {
        return CheckReport {
            name,
            status: CheckStatus::Pass,
            measured: 0.0,
            threshold,
            detail: "vacuous: fewer than two iterates".to_string(),
        };
    }
    let mut worst = f64::NEG_INFINITY;
    for pair in seq.windows(2) {
        worst = worst.max(pair[1].dist(x_star) - pair[0].dist(x_star));
    }
    CheckReport {
        name,
        status: if worst <= threshold { CheckStatus::Pass } else { CheckStatus::Fail },
        measured: worst,
        threshold,
        detail: format!("max distance increase over {} steps", seq.len() - 1),
    }
}

/// Best-approximation iterates stay in the ball centered at the midpoint of
/// the start and its solution projection, with radius half their distance.
/// The start itself sits exactly on the sphere. Asserted only for
/// best-approximation traces; informational otherwise.
pub fn ball_check(result: &SolveResult, x_bar_star: &Vector) -> CheckReport {
    let name = "ball_containment";
    let x0 = &result.trace.x0;
    let center = (x0 + x_bar_star).scale(0.5);
    let radius = 0.5 * x0.dist(x_bar_star);
    let mut worst = f64::NEG_INFINITY;
    for x in iterate_sequence(result) {
        worst = worst.max(x.dist(&center) - radius);
    }
    let threshold = tol::BALL_SLACK;
    let status = if result.trace.method != Method::BestApproximation {
        CheckStatus::Info
    } else if worst <= threshold {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    CheckReport {
        name,
        status,
        measured: worst,
        threshold,
        detail: format!("max overshoot of the radius-{radius:.3e} ball"),
    }
}

/// Separation properties of the recorded halfspaces:
///
/// * every known solution lies inside each separating halfspace;
/// * every known solution lies inside each best-approximation halfspace
///   (asserted for best-approximation traces, informational otherwise: the
///   containment lemma is specific to that iteration);
/// * the iterate strictly violates its own separating halfspace whenever
///   its residual is above the stopping tolerance.
pub fn separation_check(result: &SolveResult, solutions: &[Vector], tol_used: f64) -> Vec<CheckReport> {
    let has_halfspaces = result.trace.records.iter().any(|r| r.separating.is_some());
    if !has_halfspaces {
        return vec![
            CheckReport::skip("solutions_in_separating", "trace has no halfspace data"),
            CheckReport::skip("solutions_in_best_approx", "trace has no halfspace data"),
            CheckReport::skip("iterate_outside_separating", "trace has no halfspace data"),
        ];
    }
    if solutions.is_empty() {
        return vec![
            CheckReport::skip("solutions_in_separating", "no known solutions"),
            CheckReport::skip("solutions_in_best_approx", "no known solutions"),
            CheckReport::skip("iterate_outside_separating", "no known solutions"),
        ];
    }

    let mut sep_margin = f64::INFINITY;
    let mut best_margin = f64::INFINITY;
    let mut iterate_margin = f64::NEG_INFINITY;
    let mut above_tol = 0usize;
    for record in &result.trace.records {
        if let Some(h) = &record.separating {
            for x_star in solutions {
                sep_margin = sep_margin.min(h.margin(x_star));
            }
            if record.residual > tol_used * record.x.norm().max(1.0) {
                above_tol += 1;
                iterate_margin = iterate_margin.max(h.margin(&record.x));
            }
        }
        if let Some(h) = &record.best_approx {
            for x_star in solutions {
                best_margin = best_margin.min(h.margin(x_star));
            }
        }
    }

    let feasibility = tol::FEASIBILITY;
    let contains = |margin: f64| {
        if margin >= -feasibility {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    };
    let best_status = if result.trace.method == Method::BestApproximation {
        contains(best_margin)
    } else {
        CheckStatus::Info
    };
    let (outside_status, outside_detail) = if above_tol == 0 {
        (CheckStatus::Pass, "vacuous: no iterates above tolerance".to_string())
    } else if iterate_margin < 0.0 {
        (CheckStatus::Pass, format!("strict violation on all {above_tol} rows above tolerance"))
    } else {
        (CheckStatus::Fail, format!("an iterate satisfied its own halfspace ({above_tol} rows checked)"))
    };
    vec![
        CheckReport {
            name: "solutions_in_separating",
            status: contains(sep_margin),
            measured: sep_margin,
            threshold: feasibility,
            detail: format!("min margin over {} solutions", solutions.len()),
        },
        CheckReport {
            name: "solutions_in_best_approx",
            status: best_status,
            measured: best_margin,
            threshold: feasibility,
            detail: format!("min margin over {} solutions", solutions.len()),
        },
        CheckReport {
            name: "iterate_outside_separating",
            status: outside_status,
            measured: iterate_margin,
            threshold: 0.0,
            detail: outside_detail,
        },
    ]
}

/// Accepted stepsizes never fall below `min(alpha_init, delta / L)` when
/// `A₂` declares a Lipschitz constant: a geometric-grid trial at or above
/// that floor always satisfies the acceptance inequality.
pub fn stepsize_floor_check(
    result: &SolveResult,
    l2: Option<f64>,
    alpha_init: f64,
    delta: f64,
) -> CheckReport {
    let name = "stepsize_floor";
    if !result.trace.method.uses_line_search() {
        return CheckReport::skip(name, "fixed-stepsize trace");
    }
    let Some(l2) = l2 else {
        return CheckReport::skip(name, "no declared Lipschitz constant");
    };
    if result.trace.records.is_empty() {
        return CheckReport::skip(name, "empty trace");
    }
    let floor = alpha_init.min(delta / l2);
    let min_alpha = result.trace.records.iter().map(|r| r.alpha).fold(f64::INFINITY, f64::min);
    let measured = min_alpha - floor;
    let threshold = tol::STEPSIZE_FLOOR_SLACK;
    CheckReport {
        name,
        status: if measured >= -threshold { CheckStatus::Pass } else { CheckStatus::Fail },
        measured,
        threshold,
        detail: format!("min accepted stepsize {min_alpha:.3e} vs floor {floor:.3e}"),
    }
}

/// Replay the relaxed-projection update with the multiplier overridden to
/// the stepsize, alongside an independently driven
/// forward-backward-half-forward trajectory on the same stepsizes. The two
/// updates are algebraically identical, so the per-step discrepancy must
/// stay at roundoff scale.
pub fn fbhf_equivalence_check(
    problem: &ProblemInstance,
    x0: &Vector,
    alphas: &[f64],
) -> Result<CheckReport, DiagnosticsError> {
    let name = "fbhf_equivalence";
    if alphas.is_empty() {
        return Ok(CheckReport::skip(name, "no stepsizes supplied"));
    }
    let mut via_projection = x0.clone();
    let mut via_fbhf = x0.clone();
    let mut worst = 0.0f64;
    let mut steps = 0usize;
    for (k, &alpha) in alphas.iter().enumerate() {
        let forward = problem.forward(&via_projection)?;
        let x_bar = problem.b().resolvent(alpha, &via_projection.axpy(-alpha, &forward))?;
        let search = LineSearchResult { alpha, j: 0, x_bar, trials: 1 };
        let next_a = match prepare_iteration(problem, k, &via_projection, &search, 0.25)? {
            StepPrep::Ready(state) => step_along_normal(&state, alpha, 1.0),
            // Both updates stall at a solution; nothing left to compare.
            StepPrep::AtSolution { .. } => break,
        };
        let next_b = fbhf_step(problem, &via_fbhf, alpha)?;
        worst = worst.max(next_a.dist(&next_b));
        via_projection = next_a;
        via_fbhf = next_b;
        steps += 1;
    }
    let threshold = tol::EQUIVALENCE_TOL;
    Ok(CheckReport {
        name,
        status: if worst <= threshold { CheckStatus::Pass } else { CheckStatus::Fail },
        measured: worst,
        threshold,
        detail: format!("max per-step discrepancy over {steps} steps"),
    })
}

/// Re-verify every accepted line-search pair in a trace: the acceptance
/// inequality must re-hold at the recorded `(α, x̄)` (first report), and the
/// trial one grid level up must fail wherever backtracking happened, which
/// certifies minimality of the accepted trial index (second report).
pub fn line_search_audit(
    problem: &ProblemInstance,
    result: &SolveResult,
    theta: f64,
    delta: f64,
) -> Result<Vec<CheckReport>, DiagnosticsError> {
    if !result.trace.method.uses_line_search() {
        return Ok(vec![
            CheckReport::skip("acceptance_inequality", "fixed-stepsize trace"),
            CheckReport::skip("trial_minimality", "fixed-stepsize trace"),
        ]);
    }
    let mut accept_slack = f64::INFINITY;
    let mut prev_trial_slack = f64::NEG_INFINITY;
    let mut backtracked = 0usize;
    for record in &result.trace.records {
        let a2_x = problem.a2().eval(&record.x)?;
        let a2_bar = problem.a2().eval(&record.x_bar)?;
        let diff = &record.x - &record.x_bar;
        let slack = delta * diff.norm_sq() - record.alpha * (&a2_x - &a2_bar).dot(&diff);
        accept_slack = accept_slack.min(slack);

        if record.j > 0 {
            backtracked += 1;
            let alpha_prev = record.alpha / theta;
            let forward = problem.forward(&record.x)?;
            let x_bar_prev = problem
                .b()
                .resolvent(alpha_prev, &record.x.axpy(-alpha_prev, &forward))?;
            let diff_prev = &record.x - &x_bar_prev;
            if diff_prev.norm() <= tol::DEGENERATE_REL * record.x.norm().max(1.0) {
                // That trial would have been accepted as degenerate, so the
                // recorded index was not minimal.
                prev_trial_slack = f64::INFINITY;
                continue;
            }
            let a2_prev = problem.a2().eval(&x_bar_prev)?;
            let slack_prev = delta * diff_prev.norm_sq()
                - alpha_prev * (&a2_x - &a2_prev).dot(&diff_prev);
            prev_trial_slack = prev_trial_slack.max(slack_prev);
        }
    }
    if result.trace.records.is_empty() {
        accept_slack = 0.0;
    }
    let minimality = if backtracked == 0 {
        CheckReport {
            name: "trial_minimality",
            status: CheckStatus::Pass,
            measured: f64::NEG_INFINITY,
            threshold: 0.0,
            detail: "vacuous: no backtracked iterations".to_string(),
        }
    } else {
        CheckReport {
            name: "trial_minimality",
            status: if prev_trial_slack < 0.0 { CheckStatus::Pass } else { CheckStatus::Fail },
            measured: prev_trial_slack,
            threshold: 0.0,
            detail: format!("max slack of the rejected previous trial over {backtracked} rows"),
        }
    };
    Ok(vec![
        CheckReport {
            name: "acceptance_inequality",
            status: if accept_slack >= -tol::AUDIT_SLACK { CheckStatus::Pass } else { CheckStatus::Fail },
            measured: accept_slack,
            threshold: tol::AUDIT_SLACK,
            detail: format!("min acceptance slack over {} rows", result.trace.records.len()),
        },
        minimality,
    ])
}

/// The projection gap `⟨w, x − x̄⟩ − offset` drives the relaxed-projection
/// multiplier and is proven to vanish along convergent runs, with no rate.
/// Reported for inspection only.
pub fn gap_report(result: &SolveResult) -> CheckReport {
    let name = "projection_gap";
    let gaps: Vec<f64> = result
        .trace
        .records
        .iter()
        .filter_map(|r| {
            let h = r.separating.as_ref()?;
            Some(h.normal().dot(&(&r.x - &r.x_bar)) - h.offset())
        })
        .collect();
    match (gaps.first(), gaps.last()) {
        (Some(first), Some(last)) => CheckReport {
            name,
            status: CheckStatus::Info,
            measured: *last,
            threshold: f64::NAN,
            detail: format!("first {first:.3e}, last {last:.3e} over {} rows", gaps.len()),
        },
        _ => CheckReport::skip(name, "trace has no halfspace data"),
    }
}

/// Every check that applies to a finished run, in a fixed order. Sampled
/// solutions (when the solution set is known) feed the Fejér and separation
/// checks; the recorded stepsizes feed the equivalence replay.
pub fn standard_checks(
    problem: &ProblemInstance,
    result: &SolveResult,
    theta: f64,
    delta: f64,
    alpha_init: f64,
    stop_tol: f64,
) -> Result<Vec<CheckReport>, DiagnosticsError> {
    let mut reports = Vec::new();
    let solutions = match problem.sample_solutions(8, 0x5eed) {
        Ok(points) => points,
        Err(ProblemError::UnknownSolution) => Vec::new(),
        Err(other) => return Err(other.into()),
    };

    if solutions.is_empty() {
        reports.push(CheckReport::skip("fejer_monotonicity", "no known solutions"));
        reports.push(CheckReport::skip("ball_containment", "no known solutions"));
    } else {
        let mut worst = fejer_check(result, &solutions[0]);
        for x_star in &solutions[1..] {
            let report = fejer_check(result, x_star);
            if report.measured > worst.measured {
                worst = report;
            }
        }
        // Fejér monotonicity is a relaxed-projection guarantee; report it
        // for other methods without judging them by it.
        if !matches!(result.trace.method, Method::RelaxedProjection) {
            worst.status = CheckStatus::Info;
        }
        reports.push(worst);
        match problem.solution_project(&result.trace.x0) {
            Ok(x_bar_star) => reports.push(ball_check(result, &x_bar_star)),
            Err(ProblemError::UnknownSolution) => {
                reports.push(CheckReport::skip("ball_containment", "no known solutions"));
            }
            Err(other) => return Err(other.into()),
        }
    }

    reports.extend(separation_check(result, &solutions, stop_tol));
    reports.push(stepsize_floor_check(result, problem.lipschitz_a2(), alpha_init, delta));
    reports.extend(line_search_audit(problem, result, theta, delta)?);

    if result.trace.method.uses_line_search() && !result.trace.records.is_empty() {
        let alphas: Vec<f64> =
            result.trace.records.iter().take(50).map(|r| r.alpha).collect();
        reports.push(fbhf_equivalence_check(problem, &result.trace.x0, &alphas)?);
    } else {
        reports.push(CheckReport::skip("fbhf_equivalence", "no accepted stepsizes to replay"));
    }
    reports.push(gap_report(result));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::by_name;
    use crate::solvers::{solve, SolverConfig};

    fn v(data: &[f64]) -> Vector {
        Vector::new(data.to_vec())
    }

    fn run(problem: &ProblemInstance, method: Method, config: &SolverConfig, x0: &[f64]) -> SolveResult {
        solve(problem, method, config, &v(x0)).unwrap()
    }

    #[test]
    fn fejer_passes_for_the_relaxed_projection_on_the_affine_problem() {
        let problem = by_name("affine_grad").unwrap();
        let config = SolverConfig::for_problem(&problem);
        let res = run(&problem, Method::RelaxedProjection, &config, &[1.0, 2.0]);
        let report = fejer_check(&res, &v(&[0.0, 2.0]));
        assert_eq!(report.status, CheckStatus::Pass, "{report}");
        assert!(report.measured <= tol::MONOTONE_SEQUENCE_SLACK);
    }

    #[test]
    fn fejer_fails_honestly_for_forward_backward_on_the_rotation_field() {
        let problem = by_name("rotation2d").unwrap();
        let config = SolverConfig {
            fixed_alpha: Some(0.5),
            max_iter: 30,
            ..SolverConfig::default()
        };
        let res = run(&problem, Method::Fb, &config, &[1.0, 0.0]);
        let report = fejer_check(&res, &v(&[0.0, 0.0]));
        assert_eq!(report.status, CheckStatus::Fail);
        assert!(report.measured > 0.1);
    }

    #[test]
    fn fejer_is_vacuous_on_a_solution_started_run() {
        let problem = by_name("box_vip").unwrap();
        let config = SolverConfig::for_problem(&problem);
        let res = run(&problem, Method::RelaxedProjection, &config, &[1.0 / 3.0, 1.0 / 3.0]);
        let report = fejer_check(&res, &v(&[1.0 / 3.0, 1.0 / 3.0]));
        assert_eq!(report.status, CheckStatus::Pass);
        assert!(report.measured <= 0.0);
    }

    #[test]
    fn ball_containment_holds_for_the_best_approximation_run() {
        let problem = by_name("affine_grad").unwrap();
        let config = SolverConfig { tol: 1e-9, ..SolverConfig::for_problem(&problem) };
        let res = run(&problem, Method::BestApproximation, &config, &[1.7, 2.3]);
        let report = ball_check(&res, &v(&[0.0, 2.3]));
        assert_eq!(report.status, CheckStatus::Pass, "{report}");
        // The start point sits exactly on the sphere, so the worst overshoot
        // is essentially zero but not negative by much.
        assert!(report.measured.abs() <= tol::BALL_SLACK);
    }

    #[test]
    fn ball_containment_is_informational_for_other_methods() {
        let problem = by_name("affine_grad").unwrap();
        let config = SolverConfig::for_problem(&problem);
        let res = run(&problem, Method::RelaxedProjection, &config, &[1.0, 2.0]);
        let report = ball_check(&res, &v(&[0.0, 2.0]));
        assert_eq!(report.status, CheckStatus::Info);
    }

    #[test]
    fn separation_reports_pass_on_a_relaxed_projection_run() {
        let problem = by_name("box_vip").unwrap();
        let config = SolverConfig::for_problem(&problem);
        let res = run(&problem, Method::RelaxedProjection, &config, &[0.9, -0.3]);
        let solutions = problem.sample_solutions(4, 7).unwrap();
        let reports = separation_check(&res, &solutions, config.tol);
        assert_eq!(reports[0].status, CheckStatus::Pass, "{}", reports[0]);
        // Best-approximation containment is not a relaxed-projection
        // guarantee, so it is reported without judgment.
        assert_eq!(reports[1].status, CheckStatus::Info);
        assert_eq!(reports[2].status, CheckStatus::Pass, "{}", reports[2]);
        assert!(reports[2].measured < 0.0);
    }

    #[test]
    fn separation_reports_pass_on_a_best_approximation_run() {
        let problem = by_name("skew_mix").unwrap();
        let config = SolverConfig::for_problem(&problem);
        let res = run(&problem, Method::BestApproximation, &config, &[0.9, -0.7, 0.3, 0.5]);
        let solutions = problem.sample_solutions(4, 7).unwrap();
        let reports = separation_check(&res, &solutions, config.tol);
        for report in &reports {
            assert_eq!(report.status, CheckStatus::Pass, "{report}");
        }
    }

    #[test]
    fn separation_skips_baseline_traces() {
        let problem = by_name("rotation2d").unwrap();
        let config = SolverConfig {
            fixed_alpha: Some(0.5),
            max_iter: 5,
            ..SolverConfig::default()
        };
        let res = run(&problem, Method::Fb, &config, &[1.0, 0.0]);
        let reports = separation_check(&res, &problem.sample_solutions(2, 1).unwrap(), config.tol);
        assert!(reports.iter().all(|r| r.status == CheckStatus::Skip));
    }

    #[test]
    fn stepsize_floor_is_tight_on_the_identity_field() {
        // Acceptance needs α ≤ δ exactly, so the accepted stepsize equals
        // the floor min(1, δ/1) and the measured slack is exactly zero.
        use crate::operators::{SetValuedSpec, SingleValuedSpec};
        use crate::problems::SolutionSet;
        let problem = ProblemInstance::new(
            "identity",
            SingleValuedSpec::zero(),
            SingleValuedSpec::scaled_identity(1.0).unwrap(),
            SetValuedSpec::zero(),
            2,
            SolutionSet::SinglePoint(Vector::zeros(2)),
        )
        .unwrap();
        let config = SolverConfig { delta: 0.25, tol: 1e-8, ..SolverConfig::default() };
        let res = run(&problem, Method::RelaxedProjection, &config, &[1.0, 0.0]);
        let report =
            stepsize_floor_check(&res, problem.lipschitz_a2(), config.alpha_init, config.delta);
        assert_eq!(report.status, CheckStatus::Pass, "{report}");
        assert_eq!(report.measured, 0.0);
    }

    #[test]
    fn stepsize_floor_holds_with_a_loose_lipschitz_declaration() {
        let problem = by_name("box_vip").unwrap();
        let config = SolverConfig::for_problem(&problem);
        let res = run(&problem, Method::RelaxedProjection, &config, &[0.9, 0.85]);
        let report =
            stepsize_floor_check(&res, problem.lipschitz_a2(), config.alpha_init, config.delta);
        assert_eq!(report.status, CheckStatus::Pass, "{report}");
        assert!(report.measured >= 0.0);
    }

    #[test]
    fn fbhf_equivalence_is_exact_when_a2_vanishes() {
        // With A₂ = 0 both updates reduce to the same forward-backward step;
        // a power-of-two stepsize keeps even the roundoff identical.
        let problem = by_name("affine_grad").unwrap();
        let report =
            fbhf_equivalence_check(&problem, &v(&[1.0, 2.0]), &[0.25; 20]).unwrap();
        assert_eq!(report.status, CheckStatus::Pass);
        assert_eq!(report.measured, 0.0);
    }

    #[test]
    fn fbhf_equivalence_holds_on_the_rotation_field() {
        let problem = by_name("rotation2d").unwrap();
        let report = fbhf_equivalence_check(&problem, &v(&[1.0, 0.0]), &[0.2; 50]).unwrap();
        assert_eq!(report.status, CheckStatus::Pass, "{report}");
        assert!(report.measured <= tol::EQUIVALENCE_TOL);
    }

    #[test]
    fn audit_passes_and_sees_backtracking_on_the_box_problem() {
        let problem = by_name("box_vip").unwrap();
        let config = SolverConfig::for_problem(&problem);
        let res = run(&problem, Method::RelaxedProjection, &config, &[0.9, 0.85]);
        assert!(res.trace.records.iter().any(|r| r.j > 0), "expected backtracking");
        let reports = line_search_audit(&problem, &res, config.theta, config.delta).unwrap();
        assert_eq!(reports[0].status, CheckStatus::Pass, "{}", reports[0]);
        assert!(reports[0].measured >= -tol::AUDIT_SLACK);
        assert_eq!(reports[1].status, CheckStatus::Pass, "{}", reports[1]);
        assert!(reports[1].measured < 0.0);
    }

    #[test]
    fn standard_checks_are_reproducible() {
        let problem = by_name("box_vip").unwrap();
        let config = SolverConfig::for_problem(&problem);
        let res = run(&problem, Method::RelaxedProjection, &config, &[0.9, -0.3]);
        let first = standard_checks(&problem, &res, config.theta, config.delta, config.alpha_init, config.tol)
            .unwrap();
        let second = standard_checks(&problem, &res, config.theta, config.delta, config.alpha_init, config.tol)
            .unwrap();
        let render = |reports: &[CheckReport]| {
            reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n")
        };
        assert_eq!(render(&first), render(&second));
        assert!(first.iter().all(|r| !r.failed()), "{}", render(&first));
    }

    #[test]
    fn gap_report_is_informational_and_shrinks() {
        let problem = by_name("rotation2d").unwrap();
        let config = SolverConfig { tol: 1e-8, ..SolverConfig::default() };
        let res = run(&problem, Method::RelaxedProjection, &config, &[1.0, 0.0]);
        let report = gap_report(&res);
        assert_eq!(report.status, CheckStatus::Info);
        let first_gap = {
            let r = &res.trace.records[0];
            let h = r.separating.as_ref().unwrap();
            h.normal().dot(&(&r.x - &r.x_bar)) - h.offset()
        };
        assert!(report.measured < first_gap);
    }
}
