//! Problem instances `0 ∈ (A₁ + A₂ + B)x` and the built-in catalog.
//!
//! Assembly is strict: the `A₁` slot must carry a cocoercivity modulus, the
//! `A₂` slot must be declared fit for it, dimensions must agree, and every
//! declared constant is re-certified by sampling before the instance is
//! handed out. Catalog fixtures additionally store their solution sets so
//! that diagnostics can measure real distances instead of proxies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{Matrix, Vector};
use crate::operators::{OperatorError, SetValuedSpec, SingleValuedSpec};
use crate::tol;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("problem `{0}` is not in the catalog")]
    UnknownName(String),
    #[error("operator in the cocoercive slot declares no modulus")]
    MissingCocoercivity,
    #[error("operator in the uniformly continuous slot is not declared fit for it")]
    NotA2Capable,
    #[error("dimension mismatch: problem is {expected}-dimensional, {part} works in {got}")]
    DimensionMismatch { expected: usize, part: &'static str, got: usize },
    #[error("certification of {what} failed: worst slack {slack:.3e}")]
    CertificationFailed { what: String, slack: f64 },
    #[error("solution set is unknown for this problem")]
    UnknownSolution,
}

/// What is known about the zeros of `A₁ + A₂ + B`.
#[derive(Clone, Debug)]
pub enum SolutionSet {
    SinglePoint(Vector),
    /// `{x : Ex = d}` with full-row-rank `E`.
    AffineSet { e: Matrix, d: Vector },
    /// Intersection of a box and an affine set; projections run Dykstra's
    /// alternating scheme since no closed form exists.
    BoxAffine { lower: Vector, upper: Vector, e: Matrix, d: Vector },
    Unknown,
}

impl SolutionSet {
    pub fn is_known(&self) -> bool {
        !matches!(self, SolutionSet::Unknown)
    }
}

#[derive(Clone, Debug)]
pub struct ProblemInstance {
    name: String,
    a1: SingleValuedSpec,
    a2: SingleValuedSpec,
    b: SetValuedSpec,
    dim: usize,
    solution: SolutionSet,
}

impl ProblemInstance {
    pub fn new(
        name: impl Into<String>,
        a1: SingleValuedSpec,
        a2: SingleValuedSpec,
        b: SetValuedSpec,
        dim: usize,
        solution: SolutionSet,
    ) -> Result<Self, ProblemError> {
        check_dim(a1.ambient_dim(), dim, "the cocoercive operator")?;
        check_dim(a2.ambient_dim(), dim, "the continuous operator")?;
        check_dim(b.ambient_dim(), dim, "the set-valued operator")?;
        if a1.beta().is_none() {
            return Err(ProblemError::MissingCocoercivity);
        }
        if !a2.a2_capable() {
            return Err(ProblemError::NotA2Capable);
        }
        match &solution {
            SolutionSet::SinglePoint(p) => check_dim(Some(p.dim()), dim, "the solution point")?,
            SolutionSet::AffineSet { e, .. } => {
                check_dim(Some(e.cols()), dim, "the solution set")?
            }
            SolutionSet::BoxAffine { lower, e, .. } => {
                check_dim(Some(lower.dim()), dim, "the solution set")?;
                check_dim(Some(e.cols()), dim, "the solution set")?;
            }
            SolutionSet::Unknown => {}
        }
        let instance = ProblemInstance { name: name.into(), a1, a2, b, dim, solution };
        instance.certify()?;
        Ok(instance)
    }

    /// Re-derive the declared constants on sampled pairs. A declared β must
    /// satisfy `⟨A₁x − A₁y, x − y⟩ ≥ β‖A₁x − A₁y‖²` and a declared Lipschitz
    /// constant must bound the sampled difference ratios.
    fn certify(&self) -> Result<(), ProblemError> {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0C0);
        let pairs: Vec<(Vector, Vector)> = (0..200)
            .map(|_| {
                let a =
                    Vector::new((0..self.dim).map(|_| rng.gen_range(-5.0..5.0)).collect());
                let b =
                    Vector::new((0..self.dim).map(|_| rng.gen_range(-5.0..5.0)).collect());
                (a, b)
            })
            .collect();

        if let Some(beta) = self.a1.beta() {
            if beta.is_finite() {
                let mut worst = f64::INFINITY;
                for (x, y) in &pairs {
                    let diff_im = &self.a1.eval(x)? - &self.a1.eval(y)?;
                    let slack = diff_im.dot(&(x - y)) - beta * diff_im.norm_sq();
                    worst = worst.min(slack);
                }
                if worst < -tol::CERTIFICATION_SLACK {
                    return Err(ProblemError::CertificationFailed {
                        what: format!("cocoercivity modulus {beta}"),
                        slack: worst,
                    });
                }
            }
        }
        if let Some(lip) = self.a2.lipschitz() {
            if lip.is_finite() {
                let mut worst = f64::INFINITY;
                for (x, y) in &pairs {
                    let num = (&self.a2.eval(x)? - &self.a2.eval(y)?).norm();
                    let bound = lip * x.dist(y);
                    let slack = bound - num + tol::CERTIFICATION_SLACK * bound.max(1.0);
                    worst = worst.min(slack);
                }
                if worst < 0.0 {
                    return Err(ProblemError::CertificationFailed {
                        what: format!("Lipschitz constant {lip}"),
                        slack: worst,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a1(&self) -> &SingleValuedSpec {
        &self.a1
    }

    pub fn a2(&self) -> &SingleValuedSpec {
        &self.a2
    }

    pub fn b(&self) -> &SetValuedSpec {
        &self.b
    }

    pub fn solution(&self) -> &SolutionSet {
        &self.solution
    }

    /// `(A₁ + A₂) x`.
    pub fn forward(&self, x: &Vector) -> Result<Vector, OperatorError> {
        Ok(&self.a1.eval(x)? + &self.a2.eval(x)?)
    }

    pub fn beta(&self) -> f64 {
        self.a1.beta().unwrap_or(f64::INFINITY)
    }

    pub fn lipschitz_a2(&self) -> Option<f64> {
        self.a2.lipschitz()
    }

    /// Projection of `x` onto the recorded solution set.
    pub fn solution_project(&self, x: &Vector) -> Result<Vector, ProblemError> {
        match &self.solution {
            SolutionSet::SinglePoint(p) => Ok(p.clone()),
            SolutionSet::AffineSet { e, d } => Ok(project_affine(e, d, x)?),
            SolutionSet::BoxAffine { lower, upper, e, d } => {
                Ok(project_box_affine(lower, upper, e, d, x)?)
            }
            SolutionSet::Unknown => Err(ProblemError::UnknownSolution),
        }
    }

    pub fn solution_distance(&self, x: &Vector) -> Option<f64> {
        self.solution_project(x).ok().map(|p| x.dist(&p))
    }

    /// Deterministic sample of points from the solution set.
    pub fn sample_solutions(&self, count: usize, seed: u64) -> Result<Vec<Vector>, ProblemError> {
        match &self.solution {
            SolutionSet::SinglePoint(p) => Ok(vec![p.clone()]),
            SolutionSet::Unknown => Err(ProblemError::UnknownSolution),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count.max(1))
                    .map(|_| {
                        let x = Vector::new(
                            (0..self.dim).map(|_| rng.gen_range(-3.0..3.0)).collect(),
                        );
                        self.solution_project(&x)
                    })
                    .collect()
            }
        }
    }
}

fn check_dim(found: Option<usize>, expected: usize, part: &'static str) -> Result<(), ProblemError> {
    match found {
        Some(got) if got != expected => {
            Err(ProblemError::DimensionMismatch { expected, part, got })
        }
        _ => Ok(()),
    }
}

fn project_affine(e: &Matrix, d: &Vector, x: &Vector) -> Result<Vector, OperatorError> {
    let residual = &e.matvec(x) - d;
    let gram = e.matmul(&e.transpose());
    let w = gram.solve(&residual)?;
    Ok(x - &e.transpose().matvec(&w))
}

fn project_box(lower: &Vector, upper: &Vector, x: &Vector) -> Vector {
    Vector::new(
        x.iter()
            .zip(lower.iter().zip(upper.iter()))
            .map(|(v, (l, u))| v.clamp(*l, *u))
            .collect(),
    )
}

/// Dykstra's alternating projections onto box ∩ affine.
fn project_box_affine(
    lower: &Vector,
    upper: &Vector,
    e: &Matrix,
    d: &Vector,
    x: &Vector,
) -> Result<Vector, OperatorError> {
    let mut u = x.clone();
    let mut p = Vector::zeros(x.dim());
    let mut q = Vector::zeros(x.dim());
    let stop = 1e-14 * x.norm().max(1.0);
    for _ in 0..200_000 {
        let y = project_box(lower, upper, &(&u + &p));
        p = &(&u + &p) - &y;
        let w = project_affine(e, d, &(&y + &q))?;
        q = &(&y + &q) - &w;
        let moved = w.dist(&u);
        u = w;
        if moved <= stop {
            break;
        }
    }
    Ok(u)
}

/// Names of the built-in fixtures, in catalog order.
pub const CATALOG_NAMES: [&str; 5] =
    ["rotation2d", "affine_grad", "box_vip", "skew_mix", "lasso_like"];

/// Build every catalog fixture. Construction is deterministic and cheap, so
/// callers just rebuild instances instead of sharing them.
pub fn catalog() -> Vec<ProblemInstance> {
    CATALOG_NAMES.iter().map(|n| by_name(n).expect("catalog fixture must build")).collect()
}

pub fn by_name(name: &str) -> Result<ProblemInstance, ProblemError> {
    match name {
        // Quarter-turn field with a unique zero at the origin. The plain
        // forward-backward iteration provably diverges here, which is what
        // makes the fixture useful.
        "rotation2d" => ProblemInstance::new(
            "rotation2d",
            SingleValuedSpec::zero(),
            SingleValuedSpec::rotation2d(),
            SetValuedSpec::zero(),
            2,
            SolutionSet::SinglePoint(Vector::zeros(2)),
        ),
        // Gradient of ½x₁² alone: every point with x₁ = 0 solves it.
        "affine_grad" => ProblemInstance::new(
            "affine_grad",
            SingleValuedSpec::affine_gradient(
                Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap(),
                Vector::zeros(2),
            )?,
            SingleValuedSpec::zero(),
            SetValuedSpec::zero(),
            2,
            SolutionSet::AffineSet {
                e: Matrix::from_rows(vec![vec![1.0, 0.0]]).unwrap(),
                d: Vector::zeros(1),
            },
        ),
        // Affine variational inequality over the unit box. The constant part
        // of the field rides in the cocoercive slot (constants are cocoercive
        // for every modulus), the matrix in the continuous slot. The interior
        // solution M⁻¹(1,1) = (1/3, 1/3) is stored; tests re-derive it with a
        // grid-plus-fixed-point oracle. The declared Lipschitz constant 4 is
        // a valid bound (the sharp one is 3) chosen so that δ/L lands on the
        // halving grid of the backtracking line search.
        "box_vip" => ProblemInstance::new(
            "box_vip",
            SingleValuedSpec::affine_gradient(
                Matrix::from_rows(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap(),
                Vector::new(vec![-1.0, -1.0]),
            )?,
            SingleValuedSpec::linear_monotone(
                Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap(),
            )?
            .with_lipschitz(4.0),
            SetValuedSpec::normal_cone_box(Vector::zeros(2), Vector::ones(2))?,
            2,
            SolutionSet::SinglePoint(Vector::new(vec![1.0 / 3.0, 1.0 / 3.0])),
        ),
        // Identity gradient plus a skew coupling, constrained to a box that
        // contains the unique zero in its interior.
        "skew_mix" => ProblemInstance::new(
            "skew_mix",
            SingleValuedSpec::scaled_identity(1.0)?,
            SingleValuedSpec::linear_monotone(
                Matrix::from_rows(vec![
                    vec![0.0, 2.0, 0.0, 0.0],
                    vec![-2.0, 0.0, 0.0, 0.0],
                    vec![0.0, 0.0, 0.0, 2.0],
                    vec![0.0, 0.0, -2.0, 0.0],
                ])
                .unwrap(),
            )?,
            SetValuedSpec::normal_cone_box(
                Vector::new(vec![-1.0; 4]),
                Vector::new(vec![1.0; 4]),
            )?,
            4,
            SolutionSet::SinglePoint(Vector::zeros(4)),
        ),
        // Quadratic data term plus an ℓ₁ penalty. The data matrix is tall;
        // its Gram matrix and the cocoercivity modulus 1/λmax are computed
        // here, and the minimizer (1.2, 0) is re-derived in tests by sign
        // enumeration.
        "lasso_like" => {
            let m = Matrix::from_rows(vec![
                vec![1.0, 0.4],
                vec![0.0, 1.2],
                vec![0.5, -0.3],
            ])
            .unwrap();
            let gram = m.transpose().matmul(&m);
            ProblemInstance::new(
                "lasso_like",
                SingleValuedSpec::affine_gradient(gram, Vector::new(vec![-2.0, -0.3]))?,
                SingleValuedSpec::zero(),
                SetValuedSpec::l1_subdifferential(0.5)?,
                2,
                SolutionSet::SinglePoint(Vector::new(vec![1.2, 0.0])),
            )
        }
        other => Err(ProblemError::UnknownName(other.to_string())),
    }
}
