//! Splitting solvers for monotone inclusions `0 ∈ (A₁ + A₂ + B)x`, where
//! `A₁` is cocoercive, `A₂` is monotone and continuous, and `B` is maximal
//! monotone with a computable resolvent.
//!
//! The centerpiece is a pair of projection methods built on a backtracking
//! line search: each iteration finds a stepsize whose resolvent point
//! defines a halfspace separating the current iterate from every solution,
//! then steps either by a relaxed projection onto that halfspace or by
//! projecting the start point onto its intersection with a
//! best-approximation halfspace. Fixed-stepsize baselines
//! (forward-backward, forward-backward-forward,
//! forward-backward-half-forward) share the same driver for comparison.
//!
//! Module map:
//!
//! * [`linalg`]: dense vectors and matrices sized for desk-scale problems.
//! * [`geometry`]: halfspaces, separating-halfspace construction, and the
//!   closed-form projection onto an intersection of two halfspaces.
//! * [`operators`]: single- and set-valued operator specs with closed-form
//!   resolvents, plus sampled validators (monotonicity, firm
//!   nonexpansiveness).
//! * [`problems`]: a small catalog of fixtures with certified constants and
//!   known solution sets.
//! * [`linesearch`]: the backtracking stepsize rule.
//! * [`solvers`]: the iteration drivers and trace records.
//! * [`diagnostics`]: convergence guarantees restated as executable checks.
//! * [`cli`]: the `opsplit` command-line interface.
//! * [`tol`]: the numeric tolerances used across the crate, with rationale.

pub mod cli;
pub mod diagnostics;
pub mod geometry;
pub mod linalg;
pub mod linesearch;
pub mod operators;
pub mod problems;
pub mod solvers;
pub mod tol;

pub use linalg::{Matrix, Vector};
pub use problems::{by_name, catalog, ProblemInstance, SolutionSet, CATALOG_NAMES};
pub use solvers::{solve, Method, SolveResult, SolveStatus, SolverConfig};
