//! Maximum-size point sets in the `n × n` integer grid with no `k + 1`
//! points on a common line.
//!
//! The crate builds sets of exactly `k·n` points (the pigeonhole maximum)
//! and certifies every output with an exact, integer-only secant sweep:
//!
//! * [`construct::explicit_construct`] covers `2n/3 ≤ k ≤ n` by complementing
//!   two square blocks plus a circulant filler.
//! * [`construct::biuniform_construct`] samples one random `r`-factor per
//!   block of an `m × m` subgrid decomposition, with block densities taken
//!   from a [`feasibility::FeasibilityMatrix`].
//! * [`construct::adjust_k`] and [`construct::adjust_n`] trade reserve for
//!   arbitrary `k` and `n`, and [`construct::pipeline`] chains everything.
//!
//! Verification lives in [`secants`], bipartite machinery (switch-chain
//! sampling, perfect matchings, 1-factorization) in [`bifactor`], and the
//! closed-form probabilistic constants in [`bounds`].
//!
//! Data-parallel loops (direction sweeps, batch sampling) run on rayon when
//! the `parallel` feature is enabled and fall back to plain iterators
//! otherwise. Every entry point that fans out also takes an [`Execution`]
//! so both paths can be driven from the same build.

pub mod bifactor;
pub mod bounds;
pub mod construct;
mod exec;
pub mod feasibility;
pub mod format;
pub mod grid;
pub mod secants;

pub use exec::Execution;
pub use grid::{Direction, GridSpec, Line, Point, PointSet};
