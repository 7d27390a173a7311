//! Numerical tolerances used across the crate.
//!
//! Every threshold that an algorithm or a diagnostic check depends on lives
//! here, with the reasoning recorded next to it. Tests assert against these
//! constants rather than re-deriving magic numbers.

/// A step or residual below `DEGENERATE_REL * max(1, ‖x‖)` is treated as an
/// exact fixed point: at that scale `x` and `x̄` agree to the last couple of
/// floating-point digits and the backtracking inequality is 0 ≤ 0.
pub const DEGENERATE_REL: f64 = 1e-14;

/// The separating halfspace degenerates when its normal is this small
/// relative to `max(1, ‖x‖/α)`, the natural scale of `(x − x̄)/α`. A normal
/// this short means the iterate is a solution to working precision.
pub const NORMAL_DEGENERATE_REL: f64 = 1e-14;

/// Slack granted when testing membership in a halfspace. Membership claims
/// proved exactly in real arithmetic can miss by a few ulps of the inner
/// products involved.
pub const FEASIBILITY: f64 = 1e-10;

/// Firm nonexpansiveness of resolvents is an identity in real arithmetic;
/// sampled violations beyond this reflect a wrong resolvent, not roundoff.
pub const FIRM_NONEXPANSIVE_SLACK: f64 = 1e-10;

/// Sampled monotonicity: `⟨Fx − Fy, x − y⟩` may round slightly below zero
/// for monotone `F`; anything below this slack is a genuine violation.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Sampled certification of declared cocoercivity and Lipschitz constants.
pub const CERTIFICATION_SLACK: f64 = 1e-10;

/// Two normals are treated as linearly dependent when the Cauchy-Schwarz
/// defect `‖a‖‖b‖ − ⟨a, b⟩` is below this fraction of `‖a‖‖b‖`.
pub const LINEAR_DEPENDENCE_REL: f64 = 1e-12;

/// Beyond this condition number the 2x2 Gram system of the two-halfspace
/// projection is numerically rank one and the single-constraint cases are
/// used instead.
pub const GRAM_CONDITION_MAX: f64 = 1e14;

/// Per-step increase allowed when asserting that distances to a solution
/// never grow (Fejér monotonicity) or that distances from the start never
/// shrink. Both are exact inequalities in real arithmetic.
pub const MONOTONE_SEQUENCE_SLACK: f64 = 1e-10;

/// Slack for the containment of iterates in the fixed ball around the
/// midpoint of the start point and the limit.
pub const BALL_SLACK: f64 = 1e-8;

/// The backtracking stepsize floor `min(α_init, δ/L₂)` holds exactly on the
/// geometric trial grid; only the last bit of the comparison may round.
pub const STEPSIZE_FLOOR_SLACK: f64 = 1e-15;

/// Replayed backtracking inequalities must hold with at most this additive
/// slack when recomputed from a recorded trace.
pub const AUDIT_SLACK: f64 = 1e-12;

/// Maximum step-for-step divergence when the relaxed projection step with
/// unit relaxation and stepsize-valued multiplier replays the
/// forward-backward-half-forward update.
pub const EQUIVALENCE_TOL: f64 = 1e-12;
