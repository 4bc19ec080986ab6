//! Exact lifted cuts, convex-hull checks and branch-and-cut for minimizing
//! `f(a·x)` over binary `x` with `sum(x) <= k` and concave `f`.

#![allow(clippy::needless_range_loop)]

pub mod bench;
pub mod bnc;
pub mod cut;
pub mod error;
pub mod format;
pub mod function;
pub mod hull22;
pub mod instance;
pub mod lift_epi;
pub mod lift_si;
pub mod lp;

pub use cut::{CutFamily, LinearCut, Permutation, Provenance};
pub use error::{Error, Result};
pub use function::ConcaveFunction;
pub use instance::{two_weight_profile, Instance, TwoWeightProfile};

/// Absolute tolerance for property checks on function values.
pub const TOL: f64 = 1e-9;
