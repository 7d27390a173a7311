//! Command-line driver: load a problem (catalog name or definition file),
//! run one method or a comparison matrix, emit trace CSV and diagnostics.
//!
//! Problem files are TOML with three sections, all of which the command
//! line can override:
//!
//! ```toml
//! [problem]
//! dim = 2
//! a1 = { kind = "affine_gradient", quad = [[1.0, 0.0], [0.0, 0.0]] }
//! a2 = { kind = "zero" }
//! b = { kind = "zero" }
//! solution = { kind = "affine", e = [[1.0, 0.0]], d = [0.0] }
//!
//! [config]
//! tol = 1e-10
//!
//! [run]
//! method = "method2"
//! x0 = [1.0, 2.0]
//! ```
//!
//! Exit codes: 0 on success (converged or detected solution, and for
//! `check`: no failed report), 1 on solver or check failure, 2 on input
//! errors (unparseable files, invalid configurations, bad start points).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::diagnostics::{standard_checks, CheckReport, DiagnosticsError};
use crate::linalg::{Matrix, Vector};
use crate::operators::{OperatorError, SetValuedSpec, SingleValuedSpec};
use crate::problems::{by_name, ProblemError, ProblemInstance, SolutionSet, CATALOG_NAMES};
use crate::solvers::{solve, Method, SolveError, SolveResult, SolveStatus, SolverConfig, Trace};

const TRACE_HEADER: &str =
    "k,residual,alpha,j,trials,dist_to_solution,lambda_k,lambda1,lambda2,in_Tk,in_Gammak";

#[derive(Parser)]
#[command(
    name = "opsplit",
    version,
    about = "Splitting solvers for monotone inclusions with separating-halfspace projection steps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method on a problem and write its trace.
    Run(RunArgs),
    /// Run several methods on one problem and print a comparison table.
    Compare(CompareArgs),
    /// Run both projection methods and the full diagnostics suite.
    Check(CheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Catalog problem name or path to a problem file.
    #[arg(long)]
    problem: String,
    /// Stopping tolerance on the residual.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Backtracking shrink factor.
    #[arg(long)]
    theta: Option<f64>,
    /// Line-search acceptance coefficient.
    #[arg(long)]
    delta: Option<f64>,
    /// Halfspace margin coefficient.
    #[arg(long = "delta-bar")]
    delta_bar: Option<f64>,
    /// First trial stepsize.
    #[arg(long = "alpha-init")]
    alpha_init: Option<f64>,
    /// Relaxation for the halfspace projection step.
    #[arg(long)]
    gamma: Option<f64>,
    /// Stepsize for the fixed-step baselines.
    #[arg(long = "fixed-alpha")]
    fixed_alpha: Option<f64>,
    #[arg(long = "max-trials")]
    max_trials: Option<u32>,
    /// Seed for the start point when no --x0 is given.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// One of fb, fbf, fbhf, method1, method2.
    #[arg(long)]
    method: Option<String>,
    /// Start point, comma separated: --x0 1.0,-2.0
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,
    /// Trace CSV path.
    #[arg(long = "trace-out")]
    trace_out: Option<PathBuf>,
    /// Diagnostics report path.
    #[arg(long = "report-out")]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated method list: --method fbhf,method1,method2
    #[arg(long, value_delimiter = ',')]
    method: Vec<String>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,
    /// Directory for per-method trace CSVs.
    #[arg(long = "trace-out")]
    trace_out: Option<PathBuf>,
    /// File to receive the comparison table.
    #[arg(long = "report-out")]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// File to receive the check reports.
    #[arg(long = "report-out")]
    report_out: Option<PathBuf>,
}

/// Input problems exit 2, solver/check failures exit 1.
#[derive(Debug)]
enum CliError {
    Input(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(err: SolveError) -> Self {
        match err {
            SolveError::Config(_) | SolveError::BadStart(_) => CliError::Input(err.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<ProblemError> for CliError {
    fn from(err: ProblemError) -> Self {
        CliError::Input(format!("invalid problem definition: {err}"))
    }
}

impl From<OperatorError> for CliError {
    fn from(err: OperatorError) -> Self {
        CliError::Input(format!("invalid operator definition: {err}"))
    }
}

impl From<DiagnosticsError> for CliError {
    fn from(err: DiagnosticsError) -> Self {
        CliError::Failure(format!("diagnostics failed: {err}"))
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Check(args) => cmd_check(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

// ---------------------------------------------------------------------------
// Problem files

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    problem: Option<ProblemSection>,
    config: Option<ConfigSection>,
    run: Option<RunSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemSection {
    name: Option<String>,
    dim: usize,
    a1: Option<OperatorSection>,
    a2: Option<OperatorSection>,
    b: Option<SetOperatorSection>,
    solution: Option<SolutionSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorSection {
    kind: String,
    scale: Option<f64>,
    matrix: Option<Vec<Vec<f64>>>,
    quad: Option<Vec<Vec<f64>>>,
    offset: Option<Vec<f64>>,
    beta: Option<f64>,
    lipschitz: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetOperatorSection {
    kind: String,
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
    center: Option<Vec<f64>>,
    radius: Option<f64>,
    normal: Option<Vec<f64>>,
    anchor: Option<Vec<f64>>,
    offset: Option<f64>,
    e: Option<Vec<Vec<f64>>>,
    d: Option<Vec<f64>>,
    weight: Option<f64>,
    matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionSection {
    kind: String,
    point: Option<Vec<f64>>,
    e: Option<Vec<Vec<f64>>>,
    d: Option<Vec<f64>>,
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
}

#[derive(Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigSection {
    theta: Option<f64>,
    delta: Option<f64>,
    delta_bar: Option<f64>,
    alpha_init: Option<f64>,
    gamma: Option<f64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    max_trials: Option<u32>,
    fixed_alpha: Option<f64>,
}

#[derive(Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    method: Option<String>,
    x0: Option<Vec<f64>>,
    trace_out: Option<String>,
    report_out: Option<String>,
    seed: Option<u64>,
}

fn required<T>(value: Option<T>, kind: &str, field: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Input(format!("operator kind '{kind}' needs field '{field}'")))
}

fn matrix_of(rows: Vec<Vec<f64>>) -> Result<Matrix, CliError> {
    Matrix::from_rows(rows).map_err(|e| CliError::Input(format!("bad matrix: {e}")))
}

fn build_single(section: Option<OperatorSection>) -> Result<SingleValuedSpec, CliError> {
    let Some(section) = section else {
        return Ok(SingleValuedSpec::zero());
    };
    let kind = section.kind.as_str();
    let mut spec = match kind {
        "zero" => SingleValuedSpec::zero(),
        "rotation2d" => SingleValuedSpec::rotation2d(),
        "scaled_identity" => {
            SingleValuedSpec::scaled_identity(required(section.scale, kind, "scale")?)?
        }
        "linear_monotone" => SingleValuedSpec::linear_monotone(matrix_of(required(
            section.matrix,
            kind,
            "matrix",
        )?)?)?,
        "affine_gradient" => {
            let quad = matrix_of(required(section.quad, kind, "quad")?)?;
            let offset = match section.offset {
                Some(values) => Vector::new(values),
                None => Vector::zeros(quad.rows()),
            };
            SingleValuedSpec::affine_gradient(quad, offset)?
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown single-valued operator kind '{other}'"
            )))
        }
    };
    if let Some(beta) = section.beta {
        spec = spec.with_beta(beta);
    }
    if let Some(lipschitz) = section.lipschitz {
        spec = spec.with_lipschitz(lipschitz);
    }
    Ok(spec)
}

fn build_set(section: Option<SetOperatorSection>) -> Result<SetValuedSpec, CliError> {
    let Some(section) = section else {
        return Ok(SetValuedSpec::zero());
    };
    let kind = section.kind.as_str();
    let spec = match kind {
        "zero" => SetValuedSpec::zero(),
        "normal_cone_box" => SetValuedSpec::normal_cone_box(
            Vector::new(required(section.lower, kind, "lower")?),
            Vector::new(required(section.upper, kind, "upper")?),
        )?,
        "normal_cone_ball" => SetValuedSpec::normal_cone_ball(
            Vector::new(required(section.center, kind, "center")?),
            required(section.radius, kind, "radius")?,
        )?,
        "normal_cone_halfspace" => SetValuedSpec::normal_cone_halfspace(
            Vector::new(required(section.normal, kind, "normal")?),
            Vector::new(required(section.anchor, kind, "anchor")?),
            required(section.offset, kind, "offset")?,
        )?,
        "normal_cone_affine" => SetValuedSpec::normal_cone_affine(
            matrix_of(required(section.e, kind, "e")?)?,
            Vector::new(required(section.d, kind, "d")?),
        )?,
        "l1" => SetValuedSpec::l1_subdifferential(required(section.weight, kind, "weight")?)?,
        "linear_monotone" => {
            SetValuedSpec::linear_monotone(matrix_of(required(section.matrix, kind, "matrix")?)?)?
        }
        other => {
            return Err(CliError::Input(format!("unknown set-valued operator kind '{other}'")))
        }
    };
    Ok(spec)
}

fn build_solution(section: Option<SolutionSection>) -> Result<SolutionSet, CliError> {
    let Some(section) = section else {
        return Ok(SolutionSet::Unknown);
    };
    let kind = section.kind.as_str();
    Ok(match kind {
        "unknown" => SolutionSet::Unknown,
        "point" => SolutionSet::SinglePoint(Vector::new(required(section.point, kind, "point")?)),
        "affine" => SolutionSet::AffineSet {
            e: matrix_of(required(section.e, kind, "e")?)?,
            d: Vector::new(required(section.d, kind, "d")?),
        },
        "box_affine" => SolutionSet::BoxAffine {
            lower: Vector::new(required(section.lower, kind, "lower")?),
            upper: Vector::new(required(section.upper, kind, "upper")?),
            e: matrix_of(required(section.e, kind, "e")?)?,
            d: Vector::new(required(section.d, kind, "d")?),
        },
        other => return Err(CliError::Input(format!("unknown solution kind '{other}'"))),
    })
}

/// A problem plus whatever defaults its file carried.
struct LoadedProblem {
    problem: ProblemInstance,
    file_config: ConfigSection,
    file_run: RunSection,
}

fn load_problem(spec: &str) -> Result<LoadedProblem, CliError> {
    if CATALOG_NAMES.contains(&spec) {
        return Ok(LoadedProblem {
            problem: by_name(spec)?,
            file_config: ConfigSection::default(),
            file_run: RunSection::default(),
        });
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Input(format!(
            "unknown problem '{spec}': not a catalog name ({}) and no such file",
            CATALOG_NAMES.join(", ")
        )));
    }
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let file: ProblemFile = toml::from_str(&text)
        .map_err(|e| CliError::Input(format!("cannot parse {}: {e}", path.display())))?;
    let Some(section) = file.problem else {
        return Err(CliError::Input(format!("{}: missing [problem] section", path.display())));
    };
    let name = section.name.clone().unwrap_or_else(|| {
        path.file_stem().map_or_else(|| "file".to_string(), |s| s.to_string_lossy().to_string())
    });
    let dim = section.dim;
    let problem = ProblemInstance::new(
        name,
        build_single(section.a1)?,
        build_single(section.a2)?,
        build_set(section.b)?,
        dim,
        build_solution(section.solution)?,
    )?;
    Ok(LoadedProblem {
        problem,
        file_config: file.config.unwrap_or_default(),
        file_run: file.run.unwrap_or_default(),
    })
}

// ---------------------------------------------------------------------------
// Run assembly

fn build_config(
    problem: &ProblemInstance,
    file: &ConfigSection,
    args: &CommonArgs,
) -> SolverConfig {
    // Field-by-field precedence: the file overrides the problem-derived
    // defaults, the flags override the file. Kept explicit rather than clever.
    let mut config = SolverConfig::for_problem(problem);
    if let Some(v) = file.theta {
        config.theta = v;
    }
    if let Some(v) = file.delta {
        config.delta = v;
    }
    if let Some(v) = file.delta_bar {
        config.delta_bar = v;
    }
    if let Some(v) = file.alpha_init {
        config.alpha_init = v;
    }
    if let Some(v) = file.gamma {
        config.gamma = v;
    }
    if let Some(v) = file.tol {
        config.tol = v;
    }
    if let Some(v) = file.max_iter {
        config.max_iter = v;
    }
    if let Some(v) = file.max_trials {
        config.max_trials = v;
    }
    if let Some(v) = file.fixed_alpha {
        config.fixed_alpha = Some(v);
    }
    if let Some(v) = args.theta {
        config.theta = v;
    }
    if let Some(v) = args.delta {
        config.delta = v;
    }
    if let Some(v) = args.delta_bar {
        config.delta_bar = v;
    }
    if let Some(v) = args.alpha_init {
        config.alpha_init = v;
    }
    if let Some(v) = args.gamma {
        config.gamma = v;
    }
    if let Some(v) = args.tol {
        config.tol = v;
    }
    if let Some(v) = args.max_iter {
        config.max_iter = v;
    }
    if let Some(v) = args.max_trials {
        config.max_trials = v;
    }
    if let Some(v) = args.fixed_alpha {
        config.fixed_alpha = Some(v);
    }
    config
}

/// Seeded uniform start in [−2, 2]^dim, resampled away from known solutions
/// so that runs beginning at a solution do not make every check vacuous.
fn sample_start(problem: &ProblemInstance, seed: u64) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let candidate =
            Vector::new((0..problem.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect());
        match problem.solution_distance(&candidate) {
            Some(dist) if dist < 0.5 => continue,
            _ => return candidate,
        }
    }
    Vector::ones(problem.dim())
}

fn resolve_x0(
    flag: Option<Vec<f64>>,
    file_run: &RunSection,
    problem: &ProblemInstance,
    seed: u64,
) -> Vector {
    if let Some(values) = flag {
        return Vector::new(values);
    }
    if let Some(values) = &file_run.x0 {
        return Vector::new(values.clone());
    }
    sample_start(problem, seed)
}

fn parse_method(name: &str) -> Result<Method, CliError> {
    name.parse::<Method>().map_err(CliError::Input)
}

// ---------------------------------------------------------------------------
// Output

fn csv_cell_f64(value: f64) -> String {
    // `Display` for f64 prints the shortest representation that parses back
    // to the same bits, which is exactly the round-trip contract.
    format!("{value}")
}

fn csv_cell_opt(value: Option<f64>) -> String {
    value.map(csv_cell_f64).unwrap_or_default()
}

fn csv_cell_bool(value: Option<bool>) -> String {
    value.map(|b| b.to_string()).unwrap_or_default()
}

fn trace_csv(trace: &Trace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.k,
            csv_cell_f64(r.residual),
            csv_cell_f64(r.alpha),
            r.j,
            r.trials,
            csv_cell_opt(r.dist_to_solution),
            csv_cell_opt(r.lambda),
            csv_cell_opt(r.lambda1),
            csv_cell_opt(r.lambda2),
            csv_cell_bool(r.in_separating),
            csv_cell_bool(r.in_best_approx),
        );
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn format_vector(v: &Vector) -> String {
    let cells: Vec<String> = v.iter().map(|c| format!("{c:.6e}")).collect();
    format!("[{}]", cells.join(", "))
}

fn summary(problem: &ProblemInstance, method: Method, result: &SolveResult) -> String {
    let final_residual =
        result.trace.records.last().map_or(f64::NAN, |r| r.residual);
    let mut text = String::new();
    let _ = writeln!(text, "problem: {}", problem.name());
    let _ = writeln!(text, "method: {method}");
    let _ = writeln!(text, "status: {}", result.status);
    let _ = writeln!(text, "iterations: {}", result.iterations);
    let _ = writeln!(text, "final residual: {final_residual:.6e}");
    let _ = writeln!(text, "final x: {}", format_vector(&result.final_x));
    if let Some(dist) = problem.solution_distance(&result.final_x) {
        let _ = writeln!(text, "distance to solution: {dist:.6e}");
    }
    text
}

/// Work counts implied by a trace: resolvent evaluations and `A₂`
/// evaluations per iteration. Projection methods pay one resolvent and one
/// `A₂` evaluation per line-search trial plus one `A₂` evaluation at the
/// iterate; the fixed-step baselines have constant per-iteration cost.
fn work_counts(method: Method, result: &SolveResult) -> (u64, u64) {
    let iterations = result.trace.records.len() as u64;
    if method.uses_line_search() {
        let trials: u64 = result.trace.records.iter().map(|r| u64::from(r.trials)).sum();
        (trials, trials + iterations)
    } else {
        let a2_per_iter = match method {
            Method::Fb => 1,
            Method::Fbf | Method::Fbhf => 2,
            _ => unreachable!(),
        };
        (iterations, a2_per_iter * iterations)
    }
}

fn success(status: SolveStatus) -> bool {
    matches!(status, SolveStatus::Converged | SolveStatus::SolutionDetected)
}

// ---------------------------------------------------------------------------
// Subcommands

fn cmd_run(args: RunArgs) -> Result<u8, CliError> {
    let loaded = load_problem(&args.common.problem)?;
    let config = build_config(&loaded.problem, &loaded.file_config, &args.common);
    let method_name = args
        .method
        .or_else(|| loaded.file_run.method.clone())
        .ok_or_else(|| CliError::Input("no method given (--method or [run] method)".into()))?;
    let method = parse_method(&method_name)?;
    let seed = args.common.seed.or(loaded.file_run.seed).unwrap_or(0);
    let x0 = resolve_x0(args.x0, &loaded.file_run, &loaded.problem, seed);

    let result = solve(&loaded.problem, method, &config, &x0)?;

    let trace_out = args
        .trace_out
        .or_else(|| loaded.file_run.trace_out.as_ref().map(PathBuf::from));
    if let Some(path) = trace_out {
        write_file(&path, &trace_csv(&result.trace))?;
    }
    let report_out = args
        .report_out
        .or_else(|| loaded.file_run.report_out.as_ref().map(PathBuf::from));
    if let Some(path) = report_out {
        let reports = standard_checks(
            &loaded.problem,
            &result,
            config.theta,
            config.delta,
            config.alpha_init,
            config.tol,
        )?;
        let text: String = reports.iter().map(|r| format!("{r}\n")).collect();
        write_file(&path, &text)?;
    }
    print!("{}", summary(&loaded.problem, method, &result));
    Ok(if success(result.status) { 0 } else { 1 })
}

fn cmd_compare(args: CompareArgs) -> Result<u8, CliError> {
    if args.method.is_empty() {
        return Err(CliError::Input("no methods given (--method a,b,...)".into()));
    }
    let methods = args
        .method
        .iter()
        .map(|m| parse_method(m))
        .collect::<Result<Vec<_>, _>>()?;
    let loaded = load_problem(&args.common.problem)?;
    let config = build_config(&loaded.problem, &loaded.file_config, &args.common);
    let seed = args.common.seed.or(loaded.file_run.seed).unwrap_or(0);
    let x0 = resolve_x0(args.x0, &loaded.file_run, &loaded.problem, seed);

    if let Some(dir) = &args.trace_out {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    }

    let mut table = String::new();
    let _ = writeln!(
        table,
        "{:<10} {:<20} {:>10} {:>12} {:>10} {:>14}",
        "method", "status", "iterations", "resolvents", "a2_evals", "final_residual"
    );
    let mut all_succeeded = true;
    for method in methods {
        let result = solve(&loaded.problem, method, &config, &x0)?;
        let (resolvents, a2_evals) = work_counts(method, &result);
        let final_residual = result.trace.records.last().map_or(f64::NAN, |r| r.residual);
        let _ = writeln!(
            table,
            "{:<10} {:<20} {:>10} {:>12} {:>10} {:>14.6e}",
            method.to_string(),
            result.status.to_string(),
            result.iterations,
            resolvents,
            a2_evals,
            final_residual
        );
        all_succeeded &= success(result.status);
        if let Some(dir) = &args.trace_out {
            write_file(&dir.join(format!("{method}.csv")), &trace_csv(&result.trace))?;
        }
    }
    print!("problem: {}\nx0: {}\n{}", loaded.problem.name(), format_vector(&x0), table);
    if let Some(path) = &args.report_out {
        write_file(path, &table)?;
    }
    Ok(if all_succeeded { 0 } else { 1 })
}

fn cmd_check(args: CheckArgs) -> Result<u8, CliError> {
    let loaded = load_problem(&args.common.problem)?;
    let config = build_config(&loaded.problem, &loaded.file_config, &args.common);
    let seed = args.common.seed.or(loaded.file_run.seed).unwrap_or(0);
    let x0 = sample_start(&loaded.problem, seed);

    let mut text = String::new();
    let _ = writeln!(text, "problem: {}", loaded.problem.name());
    let _ = writeln!(text, "x0: {}", format_vector(&x0));
    let mut reports: Vec<CheckReport> = Vec::new();
    for method in [Method::RelaxedProjection, Method::BestApproximation] {
        let result = solve(&loaded.problem, method, &config, &x0)?;
        let _ = writeln!(
            text,
            "-- {method}: {} after {} iterations",
            result.status, result.iterations
        );
        let method_reports = standard_checks(
            &loaded.problem,
            &result,
            config.theta,
            config.delta,
            config.alpha_init,
            config.tol,
        )?;
        for report in &method_reports {
            let _ = writeln!(text, "{report}");
        }
        reports.extend(method_reports);
    }
    let failed: Vec<&CheckReport> = reports.iter().filter(|r| r.failed()).collect();
    let _ = writeln!(text, "checks: {} total, {} failed", reports.len(), failed.len());
    print!("{text}");
    if let Some(path) = &args.report_out {
        write_file(path, &text)?;
    }
    Ok(if failed.is_empty() { 0 } else { 1 })
}
