//! Iterative solvers for `0 ∈ (A₁ + A₂ + B)x`.
//!
//! Two families share one driver:
//!
//! * fixed-stepsize baselines (forward-backward, forward-backward-forward,
//!   forward-backward-half-forward), and
//! * projection methods that run the backtracking search, build a separating
//!   halfspace from the accepted trial, and step by projection: a relaxed
//!   projection of the current iterate onto the halfspace, or the projection
//!   of the starting point onto the intersection of the halfspace with the
//!   best-approximation halfspace through the current iterate.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::{
    best_approx_halfspace, project_intersection, separating_halfspace, GeometryError, Halfspace,
    TwoHalfspaceProjection,
};
use crate::linalg::Vector;
use crate::linesearch::{backtrack, LineSearchError, LineSearchResult};
use crate::operators::OperatorError;
use crate::problems::ProblemInstance;

/// Solver selection. `RelaxedProjection` and `BestApproximation` use the
/// backtracking search; the other three need a user-supplied fixed stepsize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Fb,
    Fbf,
    Fbhf,
    RelaxedProjection,
    BestApproximation,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Fb,
        Method::Fbf,
        Method::Fbhf,
        Method::RelaxedProjection,
        Method::BestApproximation,
    ];

    /// True for the two line-search projection methods.
    pub fn uses_line_search(self) -> bool {
        matches!(self, Method::RelaxedProjection | Method::BestApproximation)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::Fb => "fb",
            Method::Fbf => "fbf",
            Method::Fbhf => "fbhf",
            Method::RelaxedProjection => "method1",
            Method::BestApproximation => "method2",
        };
        f.write_str(name)
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fb" => Ok(Method::Fb),
            "fbf" => Ok(Method::Fbf),
            "fbhf" => Ok(Method::Fbhf),
            "method1" | "relaxed" => Ok(Method::RelaxedProjection),
            "method2" | "best-approx" => Ok(Method::BestApproximation),
            other => Err(format!(
                "unknown method '{other}' (expected fb, fbf, fbhf, method1, method2)"
            )),
        }
    }
}

/// Knobs for [`solve`]. Defaults match the reference parameterization of the
/// projection methods; baselines additionally need `fixed_alpha`.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Backtracking shrink factor, in (0, 1).
    pub theta: f64,
    /// Line-search acceptance coefficient, in (0, 1).
    pub delta: f64,
    /// Halfspace margin coefficient; needs `delta + delta_bar < 1`.
    pub delta_bar: f64,
    /// First trial stepsize of iteration 0.
    pub alpha_init: f64,
    /// Relaxation for the halfspace projection step, in (0, 2).
    pub gamma: f64,
    /// Relative stopping tolerance on the residual `‖x − x̄‖`.
    pub tol: f64,
    pub max_iter: usize,
    /// Trial budget per line search.
    pub max_trials: u32,
    /// Stepsize for fb/fbf/fbhf; ignored by the projection methods.
    pub fixed_alpha: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            theta: 0.5,
            delta: 0.5,
            delta_bar: 0.25,
            alpha_init: 1.0,
            gamma: 1.0,
            tol: 1e-10,
            max_iter: 10_000,
            max_trials: 60,
            fixed_alpha: None,
        }
    }
}

impl SolverConfig {
    /// Defaults with `alpha_init = min(1, 4 β δ̄)`, the largest first trial
    /// that keeps the separating-halfspace margin valid for a cocoercive
    /// `A₁`. With `A₁ = 0` (infinite β) this is 1.
    pub fn for_problem(problem: &ProblemInstance) -> Self {
        let mut cfg = SolverConfig::default();
        let bound = 4.0 * problem.beta() * cfg.delta_bar;
        if bound.is_finite() {
            cfg.alpha_init = cfg.alpha_init.min(bound);
        }
        cfg
    }

    /// Check every constraint and report all violations at once.
    pub fn validate(&self, problem: &ProblemInstance, method: Method) -> Result<(), ConfigError> {
        let mut violations = Vec::new();
        if !(self.theta > 0.0 && self.theta < 1.0) {
            violations.push(format!("theta must lie in (0, 1), got {}", self.theta));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            violations.push(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.delta_bar > 0.0 && self.delta_bar.is_finite()) {
            violations.push(format!("delta_bar must be positive, got {}", self.delta_bar));
        }
        if self.delta > 0.0 && self.delta_bar > 0.0 && self.delta + self.delta_bar >= 1.0 {
            violations.push(format!(
                "delta + delta_bar must be < 1, got {}",
                self.delta + self.delta_bar
            ));
        }
        if !(self.gamma > 0.0 && self.gamma < 2.0) {
            violations.push(format!("gamma must lie in (0, 2), got {}", self.gamma));
        }
        if !(self.alpha_init.is_finite() && self.alpha_init > 0.0) {
            violations.push(format!("alpha_init must be positive, got {}", self.alpha_init));
        }
        if method.uses_line_search() {
            let bound = 4.0 * problem.beta() * self.delta_bar;
            if bound.is_finite() && self.alpha_init > bound {
                violations.push(format!(
                    "alpha_init {} exceeds the cocoercivity bound 4*beta*delta_bar = {bound}",
                    self.alpha_init
                ));
            }
        } else {
            match self.fixed_alpha {
                Some(a) if a.is_finite() && a > 0.0 => {}
                Some(a) => {
                    violations.push(format!("fixed_alpha must be positive, got {a}"));
                }
                None => {
                    violations.push(format!("fixed_alpha is required for {method}"));
                }
            }
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            violations.push(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            violations.push("max_iter must be at least 1".to_string());
        }
        if self.max_trials == 0 {
            violations.push("max_trials must be at least 1".to_string());
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations })
        }
    }
}

#[derive(Debug, Error)]
#[error("invalid configuration: {}", violations.join("; "))]
pub struct ConfigError {
    pub violations: Vec<String>,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid start point: {0}")]
    BadStart(String),
    #[error("operator failure at iteration {k}: {source}")]
    Operator { k: usize, source: OperatorError },
    #[error("geometry invariant violated at iteration {k}: {source}")]
    Geometry { k: usize, source: GeometryError },
}

/// Everything the projection steps need about one accepted line search:
/// the iterate, the resolvent point, and the separating halfspace data.
#[derive(Clone, Debug)]
pub struct IterationState {
    pub k: usize,
    pub x: Vector,
    pub x_bar: Vector,
    pub alpha: f64,
    pub j: u32,
    pub trials: u32,
    /// Halfspace normal `(x − x̄)/α − (A₂x − A₂x̄)`.
    pub normal: Vector,
    /// Halfspace offset `(δ̄/α) ‖x − x̄‖²`; solutions sit at margin ≥ offset.
    pub offset: f64,
    /// `‖x − x̄‖`, the natural residual at the accepted stepsize.
    pub residual: f64,
}

impl IterationState {
    /// The separating halfspace `{z : ⟨normal, z − x̄⟩ ≤ offset}` as a value.
    pub fn halfspace(&self) -> Halfspace {
        Halfspace::new(self.normal.clone(), self.x_bar.clone(), self.offset)
    }
}

/// Outcome of assembling the halfspace after a line search: either a usable
/// state or the discovery that the normal vanished, which certifies that the
/// resolvent point solves the inclusion.
#[derive(Debug)]
pub enum StepPrep {
    Ready(IterationState),
    AtSolution { x_bar: Vector, residual: f64 },
}

/// Build the per-iteration state from an accepted line search.
pub fn prepare_iteration(
    problem: &ProblemInstance,
    k: usize,
    x: &Vector,
    search: &LineSearchResult,
    delta_bar: f64,
) -> Result<StepPrep, SolveError> {
    let a2_x = problem
        .a2()
        .eval(x)
        .map_err(|source| SolveError::Operator { k, source })?;
    let a2_x_bar = problem
        .a2()
        .eval(&search.x_bar)
        .map_err(|source| SolveError::Operator { k, source })?;
    let residual = x.dist(&search.x_bar);
    match separating_halfspace(x, &search.x_bar, search.alpha, &a2_x, &a2_x_bar, delta_bar) {
        Ok(halfspace) => Ok(StepPrep::Ready(IterationState {
            k,
            x: x.clone(),
            x_bar: search.x_bar.clone(),
            alpha: search.alpha,
            j: search.j,
            trials: search.trials,
            offset: halfspace.offset(),
            normal: halfspace.normal().clone(),
            residual,
        })),
        Err(GeometryError::SolutionDetected) => Ok(StepPrep::AtSolution {
            x_bar: search.x_bar.clone(),
            residual,
        }),
        Err(source) => Err(SolveError::Geometry { k, source }),
    }
}

/// One relaxed-projection update, or the discovery that the projection
/// multiplier is not positive, which only happens at a solution.
#[derive(Clone, Debug)]
pub enum ProjectionStep {
    Advance { next: Vector, lambda: f64 },
    SolutionDetected,
}

/// Relaxed projection of the iterate onto the separating halfspace:
/// `x⁺ = x − γ λ w` with `λ = (⟨w, x − x̄⟩ − offset) / ‖w‖²`.
pub fn method1_step(state: &IterationState, gamma: f64) -> ProjectionStep {
    let denom = state.normal.norm_sq();
    if denom == 0.0 {
        return ProjectionStep::SolutionDetected;
    }
    let slack = state.normal.dot(&(&state.x - &state.x_bar)) - state.offset;
    let lambda = slack / denom;
    if !lambda.is_finite() || lambda <= 0.0 {
        return ProjectionStep::SolutionDetected;
    }
    ProjectionStep::Advance { next: step_along_normal(state, lambda, gamma), lambda }
}

/// The relaxed-projection update with an externally chosen multiplier.
/// With `λ = α_k` and `γ = 1` the update is exactly one fbhf step, which is
/// what the equivalence diagnostic replays.
pub fn step_along_normal(state: &IterationState, lambda: f64, gamma: f64) -> Vector {
    state.x.axpy(-(gamma * lambda), &state.normal)
}

/// Projection of the starting point onto the intersection of the separating
/// halfspace with the best-approximation halfspace at the current iterate.
pub fn method2_step(
    state: &IterationState,
    x0: &Vector,
) -> Result<TwoHalfspaceProjection, GeometryError> {
    let separating = state.halfspace();
    let best = best_approx_halfspace(x0, &state.x);
    project_intersection(&separating, &best, x0)
}

fn fixed_step_with_intermediate(
    problem: &ProblemInstance,
    method: Method,
    x: &Vector,
    alpha: f64,
) -> Result<(Vector, Vector), OperatorError> {
    let forward = problem.forward(x)?;
    let x_bar = problem.b().resolvent(alpha, &x.axpy(-alpha, &forward))?;
    let next = match method {
        Method::Fb => x_bar.clone(),
        Method::Fbf => {
            let forward_bar = problem.forward(&x_bar)?;
            x_bar.axpy(-alpha, &(&forward_bar - &forward))
        }
        Method::Fbhf => {
            let a2_x = problem.a2().eval(x)?;
            let a2_bar = problem.a2().eval(&x_bar)?;
            x_bar.axpy(-alpha, &(&a2_bar - &a2_x))
        }
        _ => unreachable!("projection methods never take fixed steps"),
    };
    Ok((next, x_bar))
}

/// Forward-backward: `x⁺ = J_{αB}(x − α(A₁+A₂)x)`.
pub fn fb_step(problem: &ProblemInstance, x: &Vector, alpha: f64) -> Result<Vector, OperatorError> {
    Ok(fixed_step_with_intermediate(problem, Method::Fb, x, alpha)?.0)
}

/// Forward-backward-forward: the forward-backward point corrected by the
/// full forward difference, `x̄ − α((A₁+A₂)x̄ − (A₁+A₂)x)`.
pub fn fbf_step(
    problem: &ProblemInstance,
    x: &Vector,
    alpha: f64,
) -> Result<Vector, OperatorError> {
    Ok(fixed_step_with_intermediate(problem, Method::Fbf, x, alpha)?.0)
}

/// Forward-backward-half-forward: correction by the `A₂` difference only,
/// `x̄ − α(A₂x̄ − A₂x)`.
pub fn fbhf_step(
    problem: &ProblemInstance,
    x: &Vector,
    alpha: f64,
) -> Result<Vector, OperatorError> {
    Ok(fixed_step_with_intermediate(problem, Method::Fbhf, x, alpha)?.0)
}

/// Why [`solve`] stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Residual `‖x − x̄‖ ≤ tol · max(1, ‖x‖)`.
    Converged,
    MaxIterations,
    /// The backtracking search ran out of trials.
    LineSearchFailed,
    /// A degenerate quantity (vanishing normal, nonpositive multiplier, or a
    /// zero-length step) certified the current point as a solution.
    SolutionDetected,
    /// The iterate left representable range. Without this stop, an
    /// overflowed norm would make the relative residual test vacuously
    /// true and report a diverging run as converged.
    Diverged,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max_iter",
            SolveStatus::LineSearchFailed => "line_search_failed",
            SolveStatus::SolutionDetected => "detected_solution",
            SolveStatus::Diverged => "diverged",
        };
        f.write_str(name)
    }
}

/// Per-iteration record kept by every solver run. Projection-only fields
/// are `None` on baseline rows.
#[derive(Clone, Debug)]
pub struct TraceRecord {
    pub k: usize,
    /// Iterate at the start of iteration `k`.
    pub x: Vector,
    /// Resolvent point of iteration `k`.
    pub x_bar: Vector,
    pub alpha: f64,
    pub j: u32,
    pub trials: u32,
    pub residual: f64,
    /// Relaxed-projection multiplier.
    pub lambda: Option<f64>,
    /// Multipliers of the two-halfspace projection.
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    /// Distance from `x` to the known solution set, when one is known.
    pub dist_to_solution: Option<f64>,
    /// Whether `x` lies in the separating halfspace (it must not, away from
    /// a solution) and in the best-approximation halfspace.
    pub in_separating: Option<bool>,
    pub in_best_approx: Option<bool>,
    pub separating: Option<Halfspace>,
    pub best_approx: Option<Halfspace>,
}

/// Full history of a run: the method, the start point, and one record per
/// iteration including the final partial one when a stop fires mid-step.
#[derive(Clone, Debug)]
pub struct Trace {
    pub method: Method,
    pub x0: Vector,
    pub records: Vec<TraceRecord>,
}

#[derive(Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub final_x: Vector,
    /// Number of updates applied to the iterate (not counting the stopped
    /// iteration's bookkeeping).
    pub iterations: usize,
    pub trace: Trace,
}

/// Run `method` from `x0` until the stopping tolerance, the iteration cap,
/// or a degeneracy fires. See [`SolveStatus`] for the outcomes; operator
/// failures and infeasible halfspace intersections surface as errors.
pub fn solve(
    problem: &ProblemInstance,
    method: Method,
    config: &SolverConfig,
    x0: &Vector,
) -> Result<SolveResult, SolveError> {
    config.validate(problem, method)?;
    if x0.dim() != problem.dim() {
        return Err(SolveError::BadStart(format!(
            "start point has dimension {}, problem needs {}",
            x0.dim(),
            problem.dim()
        )));
    }
    if !x0.all_finite() {
        return Err(SolveError::BadStart("start point has non-finite entries".to_string()));
    }
    if method.uses_line_search() {
        run_projection(problem, method, config, x0)
    } else {
        run_fixed_step(problem, method, config, x0)
    }
}

fn run_fixed_step(
    problem: &ProblemInstance,
    method: Method,
    config: &SolverConfig,
    x0: &Vector,
) -> Result<SolveResult, SolveError> {
    let alpha = config.fixed_alpha.expect("validated");
    let mut trace = Trace { method, x0: x0.clone(), records: Vec::new() };
    let mut x = x0.clone();
    let mut iterations = 0usize;
    for k in 0..config.max_iter {
        let (next, x_bar) = fixed_step_with_intermediate(problem, method, &x, alpha)
            .map_err(|source| SolveError::Operator { k, source })?;
        let residual = x.dist(&x_bar);
        let scale = x.norm().max(1.0);
        trace.records.push(TraceRecord {
            k,
            x: x.clone(),
            x_bar,
            alpha,
            j: 0,
            trials: 1,
            residual,
            lambda: None,
            lambda1: None,
            lambda2: None,
            dist_to_solution: problem.solution_distance(&x),
            in_separating: None,
            in_best_approx: None,
            separating: None,
            best_approx: None,
        });
        // An overflowed norm would make both relative stop tests vacuously
        // true; report the divergence instead of a false convergence.
        if !residual.is_finite() || !scale.is_finite() {
            return Ok(SolveResult { status: SolveStatus::Diverged, final_x: x, iterations, trace });
        }
        if residual <= config.tol * scale {
            return Ok(SolveResult { status: SolveStatus::Converged, final_x: x, iterations, trace });
        }
        let step = next.dist(&x);
        iterations += 1;
        x = next;
        if step <= config.tol * scale {
            return Ok(SolveResult {
                status: SolveStatus::SolutionDetected,
                final_x: x,
                iterations,
                trace,
            });
        }
    }
    Ok(SolveResult { status: SolveStatus::MaxIterations, final_x: x, iterations, trace })
}

fn run_projection(
    problem: &ProblemInstance,
    method: Method,
    config: &SolverConfig,
    x0: &Vector,
) -> Result<SolveResult, SolveError> {
    let mut trace = Trace { method, x0: x0.clone(), records: Vec::new() };
    let mut x = x0.clone();
    let mut alpha_prev = config.alpha_init;
    let mut iterations = 0usize;
    for k in 0..config.max_iter {
        // Projection iterates are bounded on well-posed problems, but a
        // misdeclared operator can still blow up; stop honestly if so.
        if !x.all_finite() || !x.norm().is_finite() {
            return Ok(SolveResult { status: SolveStatus::Diverged, final_x: x, iterations, trace });
        }
        let search = match backtrack(problem, &x, alpha_prev, config.theta, config.delta, config.max_trials) {
            Ok(res) => res,
            Err(LineSearchError::TrialsExhausted { .. }) => {
                return Ok(SolveResult {
                    status: SolveStatus::LineSearchFailed,
                    final_x: x,
                    iterations,
                    trace,
                });
            }
            Err(LineSearchError::Operator(source)) => {
                return Err(SolveError::Operator { k, source });
            }
        };
        alpha_prev = search.alpha;
        let state = match prepare_iteration(problem, k, &x, &search, config.delta_bar)? {
            StepPrep::Ready(state) => state,
            StepPrep::AtSolution { x_bar, residual } => {
                trace.records.push(TraceRecord {
                    k,
                    x: x.clone(),
                    x_bar,
                    alpha: search.alpha,
                    j: search.j,
                    trials: search.trials,
                    residual,
                    lambda: None,
                    lambda1: None,
                    lambda2: None,
                    dist_to_solution: problem.solution_distance(&x),
                    in_separating: None,
                    in_best_approx: None,
                    separating: None,
                    best_approx: None,
                });
                return Ok(SolveResult {
                    status: SolveStatus::SolutionDetected,
                    final_x: x,
                    iterations,
                    trace,
                });
            }
        };
        let separating = state.halfspace();
        let best = best_approx_halfspace(x0, &x);
        let scale = x.norm().max(1.0);
        let mut record = TraceRecord {
            k,
            x: x.clone(),
            x_bar: state.x_bar.clone(),
            alpha: state.alpha,
            j: state.j,
            trials: state.trials,
            residual: state.residual,
            lambda: None,
            lambda1: None,
            lambda2: None,
            dist_to_solution: problem.solution_distance(&x),
            in_separating: Some(separating.contains(&x, 0.0)),
            in_best_approx: Some(best.contains(&x, 0.0)),
            separating: Some(separating.clone()),
            best_approx: Some(best.clone()),
        };
        let next = match method {
            Method::RelaxedProjection => match method1_step(&state, config.gamma) {
                ProjectionStep::Advance { next, lambda } => {
                    record.lambda = Some(lambda);
                    next
                }
                ProjectionStep::SolutionDetected => {
                    trace.records.push(record);
                    return Ok(SolveResult {
                        status: SolveStatus::SolutionDetected,
                        final_x: x,
                        iterations,
                        trace,
                    });
                }
            },
            Method::BestApproximation => {
                let proj = method2_step(&state, x0)
                    .map_err(|source| SolveError::Geometry { k, source })?;
                record.lambda1 = Some(proj.lambda1);
                record.lambda2 = Some(proj.lambda2);
                proj.point
            }
            _ => unreachable!("baselines never reach the projection loop"),
        };
        trace.records.push(record);
        if state.residual <= config.tol * scale {
            return Ok(SolveResult { status: SolveStatus::Converged, final_x: x, iterations, trace });
        }
        let step = next.dist(&x);
        iterations += 1;
        x = next;
        if step <= config.tol * scale {
            return Ok(SolveResult {
                status: SolveStatus::SolutionDetected,
                final_x: x,
                iterations,
                trace,
            });
        }
    }
    Ok(SolveResult { status: SolveStatus::MaxIterations, final_x: x, iterations, trace })
}
