//! Branch-and-bound and quasi-branch-and-bound minimization of smooth
//! functions over axis-aligned boxes.
//!
//! A [`Problem`] bundles an objective, optional derivative oracles and
//! Lipschitz constants. An [`Algorithm`] supplies per-cube sampling and
//! quasi-lower-bound rules, and [`search::solve`] runs the breadth-first
//! driver until `ub - lb <= eps` or a limit is hit.

pub mod convex;
pub mod expr;
pub mod functions;
pub mod geometry;
pub mod interval;
pub mod linalg;
pub mod newton3;
pub mod problem;
pub mod rules;
pub mod search;

pub use geometry::{Cube, Domain, PathId};
pub use problem::{BoundStatus, LipschitzConstants, Problem, RuleError, RuleOutcome, Work};
pub use rules::{Algorithm, RuleChoice};
pub use search::{SearchConfig, SolveResult, Status};
