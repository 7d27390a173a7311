//! Operator building blocks for the inclusion `0 ∈ (A₁ + A₂ + B)x`.
//!
//! Single-valued specs cover the forward operators: `A₁` must come with a
//! cocoercivity modulus, `A₂` with (at least) a declared ability to sit in
//! the uniformly continuous slot. Set-valued specs cover `B` through
//! closed-form resolvents: normal cones of boxes, balls, halfspaces and
//! affine sets, the scaled ℓ₁ subdifferential, and monotone linear maps.
//!
//! Declared constants are never trusted blindly: matrices are probed for
//! monotonicity at construction, and problem assembly re-certifies β and L
//! by sampling (see `problems`).

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::Halfspace;
use crate::linalg::{LinalgError, Matrix, Vector};
use crate::tol;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("dimension mismatch: operator expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("resolvent stepsize must be positive and finite, got {0}")]
    NonPositiveStep(f64),
    #[error("invalid operator spec: {0}")]
    InvalidSpec(String),
    #[error("linear solve failed: {0}")]
    Linalg(#[from] LinalgError),
}

pub type EvalFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;

#[derive(Clone)]
pub enum SingleKind {
    Zero,
    LinearMonotone(Matrix),
    Rotation2D,
    ScaledIdentity(f64),
    AffineGradient { quad: Matrix, offset: Vector },
    Custom { dim: usize, eval: EvalFn },
}

impl fmt::Debug for SingleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingleKind::Zero => write!(f, "Zero"),
            SingleKind::LinearMonotone(m) => write!(f, "LinearMonotone({}x{})", m.rows(), m.cols()),
            SingleKind::Rotation2D => write!(f, "Rotation2D"),
            SingleKind::ScaledIdentity(c) => write!(f, "ScaledIdentity({c})"),
            SingleKind::AffineGradient { quad, .. } => {
                write!(f, "AffineGradient({}x{})", quad.rows(), quad.cols())
            }
            SingleKind::Custom { dim, .. } => write!(f, "Custom(dim {dim})"),
        }
    }
}

/// Single-valued operator together with the analytic facts the solvers rely
/// on: a cocoercivity modulus `beta` (required in the `A₁` slot) and a
/// Lipschitz constant (used for stepsize floors in the `A₂` slot).
#[derive(Clone, Debug)]
pub struct SingleValuedSpec {
    kind: SingleKind,
    beta: Option<f64>,
    lipschitz: Option<f64>,
    a2_capable: bool,
}

impl SingleValuedSpec {
    pub fn zero() -> Self {
        SingleValuedSpec {
            kind: SingleKind::Zero,
            beta: Some(f64::INFINITY),
            lipschitz: Some(0.0),
            a2_capable: true,
        }
    }

    /// Quarter-turn field in the plane: `(x1, x2) ↦ (x2, −x1)`. Monotone and
    /// 1-Lipschitz but not cocoercive for any modulus.
    pub fn rotation2d() -> Self {
        SingleValuedSpec {
            kind: SingleKind::Rotation2D,
            beta: None,
            lipschitz: Some(1.0),
            a2_capable: true,
        }
    }

    pub fn scaled_identity(c: f64) -> Result<Self, OperatorError> {
        if !c.is_finite() || c < 0.0 {
            return Err(OperatorError::InvalidSpec(format!(
                "scaled identity requires a finite nonnegative factor, got {c}"
            )));
        }
        let beta = if c > 0.0 { 1.0 / c } else { f64::INFINITY };
        SingleValuedSpec {
            kind: SingleKind::ScaledIdentity(c),
            beta: Some(beta),
            lipschitz: Some(c),
            a2_capable: true,
        }
        .into_ok()
    }

    /// `x ↦ Mx` for a monotone matrix. Monotonicity (positive semidefinite
    /// symmetric part) is validated on sampled probes, not assumed.
    pub fn linear_monotone(m: Matrix) -> Result<Self, OperatorError> {
        validate_square_monotone(&m)?;
        let lipschitz = m.operator_norm();
        SingleValuedSpec {
            kind: SingleKind::LinearMonotone(m),
            beta: None,
            lipschitz: Some(lipschitz),
            a2_capable: true,
        }
        .into_ok()
    }

    /// Gradient of the quadratic `½⟨x, Qx⟩ + ⟨b, x⟩`, i.e. `x ↦ Qx + b`,
    /// for symmetric positive semidefinite `Q`. The cocoercivity modulus
    /// `1/λmax(Q)` is computed here by power iteration.
    pub fn affine_gradient(quad: Matrix, offset: Vector) -> Result<Self, OperatorError> {
        if quad.rows() != quad.cols() || quad.rows() != offset.dim() {
            return Err(OperatorError::InvalidSpec(
                "affine gradient requires a square matrix matching the offset".into(),
            ));
        }
        if !quad.is_symmetric(1e-12 * matrix_scale(&quad)) {
            return Err(OperatorError::InvalidSpec(
                "affine gradient requires a symmetric matrix".into(),
            ));
        }
        validate_square_monotone(&quad)?;
        let norm = quad.operator_norm();
        let beta = if norm > 0.0 { 1.0 / norm } else { f64::INFINITY };
        SingleValuedSpec {
            kind: SingleKind::AffineGradient { quad, offset },
            beta: Some(beta),
            lipschitz: Some(norm),
            a2_capable: true,
        }
        .into_ok()
    }

    /// Arbitrary evaluation rule. Carries no analytic constants and is not
    /// accepted in the `A₂` slot until the caller declares it so.
    pub fn custom(dim: usize, eval: EvalFn) -> Self {
        SingleValuedSpec {
            kind: SingleKind::Custom { dim, eval },
            beta: None,
            lipschitz: None,
            a2_capable: false,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = Some(lipschitz);
        self
    }

    /// Declare that the operator is uniformly continuous and may serve as
    /// `A₂`. For custom rules this is the caller's responsibility.
    pub fn serves_as_a2(mut self) -> Self {
        self.a2_capable = true;
        self
    }

    fn into_ok(self) -> Result<Self, OperatorError> {
        Ok(self)
    }

    pub fn kind(&self) -> &SingleKind {
        &self.kind
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn a2_capable(&self) -> bool {
        self.a2_capable
    }

    /// Ambient dimension the operator is pinned to, if any.
    pub fn ambient_dim(&self) -> Option<usize> {
        match &self.kind {
            SingleKind::Zero | SingleKind::ScaledIdentity(_) => None,
            SingleKind::Rotation2D => Some(2),
            SingleKind::LinearMonotone(m) => Some(m.cols()),
            SingleKind::AffineGradient { quad, .. } => Some(quad.cols()),
            SingleKind::Custom { dim, .. } => Some(*dim),
        }
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector, OperatorError> {
        if let Some(expected) = self.ambient_dim() {
            if x.dim() != expected {
                return Err(OperatorError::DimensionMismatch { expected, got: x.dim() });
            }
        }
        let out = match &self.kind {
            SingleKind::Zero => Vector::zeros(x.dim()),
            SingleKind::LinearMonotone(m) => m.matvec(x),
            SingleKind::Rotation2D => Vector::new(vec![x[1], -x[0]]),
            SingleKind::ScaledIdentity(c) => x.scale(*c),
            SingleKind::AffineGradient { quad, offset } => &quad.matvec(x) + offset,
            SingleKind::Custom { eval, .. } => {
                let y = eval(x);
                if y.dim() != x.dim() {
                    return Err(OperatorError::InvalidSpec(format!(
                        "custom rule returned dimension {}, expected {}",
                        y.dim(),
                        x.dim()
                    )));
                }
                y
            }
        };
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub enum SetKind {
    Zero,
    NormalConeBox { lower: Vector, upper: Vector },
    NormalConeBall { center: Vector, radius: f64 },
    NormalConeHalfspace(Halfspace),
    NormalConeAffine { e: Matrix, d: Vector },
    L1Subdifferential { weight: f64 },
    LinearMonotone(Matrix),
}

/// Maximal monotone set-valued operator, represented by its resolvent
/// `(I + αB)⁻¹`, which is what all the solvers actually evaluate.
#[derive(Clone, Debug)]
pub struct SetValuedSpec {
    kind: SetKind,
}

impl SetValuedSpec {
    pub fn zero() -> Self {
        SetValuedSpec { kind: SetKind::Zero }
    }

    pub fn normal_cone_box(lower: Vector, upper: Vector) -> Result<Self, OperatorError> {
        if lower.dim() != upper.dim() {
            return Err(OperatorError::DimensionMismatch {
                expected: lower.dim(),
                got: upper.dim(),
            });
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
            return Err(OperatorError::InvalidSpec("box has an empty side".into()));
        }
        Ok(SetValuedSpec { kind: SetKind::NormalConeBox { lower, upper } })
    }

    pub fn normal_cone_ball(center: Vector, radius: f64) -> Result<Self, OperatorError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(OperatorError::InvalidSpec(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(SetValuedSpec { kind: SetKind::NormalConeBall { center, radius } })
    }

    pub fn normal_cone_halfspace(
        normal: Vector,
        anchor: Vector,
        offset: f64,
    ) -> Result<Self, OperatorError> {
        if normal.norm() == 0.0 {
            return Err(OperatorError::InvalidSpec("halfspace normal must be nonzero".into()));
        }
        if normal.dim() != anchor.dim() {
            return Err(OperatorError::DimensionMismatch {
                expected: normal.dim(),
                got: anchor.dim(),
            });
        }
        Ok(SetValuedSpec {
            kind: SetKind::NormalConeHalfspace(Halfspace::new(normal, anchor, offset)),
        })
    }

    /// Normal cone of the affine set `{x : Ex = d}`; `E` must have full row
    /// rank so that `EEᵀ` is invertible.
    pub fn normal_cone_affine(e: Matrix, d: Vector) -> Result<Self, OperatorError> {
        if e.rows() != d.dim() {
            return Err(OperatorError::DimensionMismatch { expected: e.rows(), got: d.dim() });
        }
        if e.rows() > e.cols() {
            return Err(OperatorError::InvalidSpec(
                "affine constraint matrix has more rows than columns".into(),
            ));
        }
        let gram = e.matmul(&e.transpose());
        if gram.solve(&d).is_err() {
            return Err(OperatorError::InvalidSpec(
                "affine constraint matrix is row-rank deficient".into(),
            ));
        }
        Ok(SetValuedSpec { kind: SetKind::NormalConeAffine { e, d } })
    }

    /// Subdifferential of `weight · ‖x‖₁`.
    pub fn l1_subdifferential(weight: f64) -> Result<Self, OperatorError> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(OperatorError::InvalidSpec(format!(
                "l1 weight must be positive, got {weight}"
            )));
        }
        Ok(SetValuedSpec { kind: SetKind::L1Subdifferential { weight } })
    }

    pub fn linear_monotone(m: Matrix) -> Result<Self, OperatorError> {
        validate_square_monotone(&m)?;
        Ok(SetValuedSpec { kind: SetKind::LinearMonotone(m) })
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn ambient_dim(&self) -> Option<usize> {
        match &self.kind {
            SetKind::Zero | SetKind::L1Subdifferential { .. } => None,
            SetKind::NormalConeBox { lower, .. } => Some(lower.dim()),
            SetKind::NormalConeBall { center, .. } => Some(center.dim()),
            SetKind::NormalConeHalfspace(h) => Some(h.normal().dim()),
            SetKind::NormalConeAffine { e, .. } => Some(e.cols()),
            SetKind::LinearMonotone(m) => Some(m.cols()),
        }
    }

    /// Resolvent `(I + alpha·B)⁻¹ x`.
    pub fn resolvent(&self, alpha: f64, x: &Vector) -> Result<Vector, OperatorError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(OperatorError::NonPositiveStep(alpha));
        }
        if let Some(expected) = self.ambient_dim() {
            if x.dim() != expected {
                return Err(OperatorError::DimensionMismatch { expected, got: x.dim() });
            }
        }
        let out = match &self.kind {
            SetKind::Zero => x.clone(),
            SetKind::NormalConeBox { lower, upper } => Vector::new(
                x.iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(v, (l, u))| v.clamp(*l, *u))
                    .collect(),
            ),
            SetKind::NormalConeBall { center, radius } => {
                let d = x - center;
                let dist = d.norm();
                if dist <= *radius {
                    x.clone()
                } else {
                    center.axpy(radius / dist, &d)
                }
            }
            SetKind::NormalConeHalfspace(h) => h.project(x),
            SetKind::NormalConeAffine { e, d } => {
                let residual = &e.matvec(x) - d;
                let gram = e.matmul(&e.transpose());
                let w = gram.solve(&residual)?;
                x - &e.transpose().matvec(&w)
            }
            SetKind::L1Subdifferential { weight } => {
                let t = alpha * weight;
                Vector::new(x.iter().map(|v| soft_threshold(*v, t)).collect())
            }
            SetKind::LinearMonotone(m) => m.scaled(alpha).plus_scaled_identity(1.0).solve(x)?,
        };
        Ok(out)
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

fn matrix_scale(m: &Matrix) -> f64 {
    let mut s = 0.0f64;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            s = s.max(m.at(i, j).abs());
        }
    }
    s.max(1.0)
}

/// Reject matrices whose quadratic form goes negative on sampled probes.
fn validate_square_monotone(m: &Matrix) -> Result<(), OperatorError> {
    if m.rows() != m.cols() {
        return Err(OperatorError::InvalidSpec("monotone matrix must be square".into()));
    }
    if !m.all_finite() {
        return Err(OperatorError::InvalidSpec("matrix entries must be finite".into()));
    }
    let n = m.cols();
    let scale = matrix_scale(m);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6f6e6f);
    for _ in 0..64 {
        let x = Vector::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let quad = m.matvec(&x).dot(&x);
        if quad < -tol::MONOTONE_SLACK * scale * x.norm_sq() {
            return Err(OperatorError::InvalidSpec(format!(
                "matrix fails sampled monotonicity: ⟨Mx, x⟩ = {quad:.3e} < 0"
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct FirmNonexpansivenessReport {
    pub max_violation: f64,
    pub pairs: usize,
    pub pass: bool,
}

/// Sample the resolvent identity `‖Jx−Jy‖² + ‖(I−J)x−(I−J)y‖² ≤ ‖x−y‖²`.
pub fn check_firm_nonexpansiveness(
    op: &SetValuedSpec,
    alpha: f64,
    pairs: &[(Vector, Vector)],
) -> Result<FirmNonexpansivenessReport, OperatorError> {
    let mut max_violation = f64::NEG_INFINITY;
    for (x, y) in pairs {
        let jx = op.resolvent(alpha, x)?;
        let jy = op.resolvent(alpha, y)?;
        let through = jx.dist(&jy).powi(2) + (&(x - &jx) - &(y - &jy)).norm_sq();
        max_violation = max_violation.max(through - x.dist(y).powi(2));
    }
    if pairs.is_empty() {
        max_violation = 0.0;
    }
    Ok(FirmNonexpansivenessReport {
        max_violation,
        pairs: pairs.len(),
        pass: max_violation <= tol::FIRM_NONEXPANSIVE_SLACK,
    })
}

#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub min_inner: f64,
    pub pairs: usize,
    pub pass: bool,
}

/// Sample `⟨Fx − Fy, x − y⟩ ≥ 0` for a single-valued operator.
pub fn check_monotone_sampled(
    op: &SingleValuedSpec,
    pairs: &[(Vector, Vector)],
) -> Result<MonotonicityReport, OperatorError> {
    let mut min_inner = f64::INFINITY;
    for (x, y) in pairs {
        let inner = (&op.eval(x)? - &op.eval(y)?).dot(&(x - y));
        min_inner = min_inner.min(inner);
    }
    if pairs.is_empty() {
        min_inner = 0.0;
    }
    Ok(MonotonicityReport {
        min_inner,
        pairs: pairs.len(),
        pass: min_inner >= -tol::MONOTONE_SLACK,
    })
}

/// Deterministic sample pairs for the check helpers.
pub fn sample_pairs(dim: usize, count: usize, half_width: f64, seed: u64) -> Vec<(Vector, Vector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = Vector::new((0..dim).map(|_| rng.gen_range(-half_width..half_width)).collect());
            let b = Vector::new((0..dim).map(|_| rng.gen_range(-half_width..half_width)).collect());
            (a, b)
        })
        .collect()
}
