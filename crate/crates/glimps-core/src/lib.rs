//! Super-robust matched subspace detection.
//!
//! Given a basis `U` of an `r`-dimensional subspace of `R^d` and an
//! observation vector `x` whose coordinates are heavily corrupted, the
//! problem is to find the largest index set on which `x` is consistent
//! with the subspace. This crate implements a two-stage detector
//! (GLIMPS): a greedy erasure pass that discards the coordinates whose
//! removal most improves the projection ratio, followed by an exact
//! mixed-integer consensus search on the survivors, solved by an
//! in-repo branch-and-bound over big-M constraints with LP-relaxation
//! bounds and warm starting. Baselines (`l1` residual minimization,
//! greedy-only, MILP-only, brute-force consensus), a seeded synthetic
//! instance generator, and the two benchmark error metrics live here
//! as well.
//!
//! The crate is `no_std`-compatible (requires `alloc`); file IO, the
//! CLI, and the benchmark harness live in the companion `glimps-cli`
//! crate. Wall-clock time limits are injected through the [`Clock`]
//! trait so the solver core stays free of platform dependencies.

#![cfg_attr(not(feature = "std"), no_std)]
// Dense kernels index by row/column on purpose; NaN-aware guards use
// negated comparisons on purpose.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod baselines;
pub mod clock;
pub mod error;
mod float;
pub mod greedy;
pub mod index_set;
pub mod linalg;
pub mod lp;
pub mod metrics;
pub mod milp;
pub mod mps;
pub mod pipeline;
pub mod rng;
pub mod synth;

pub use clock::{Clock, NoClock};
#[cfg(feature = "std")]
pub use clock::WallClock;
pub use error::Error;
pub use greedy::{best_removal, greedy_erase, GreedyConfig, GreedyTrace};
pub use index_set::IndexSet;
pub use linalg::{least_squares, project_onto_subspace, projection_ratio, Matrix, Vector};
pub use metrics::{coef_error, misclass_ratio};
pub use milp::{choose_big_m, solve_noiseless, solve_noisy, LambdaMode, MilpProblem, MilpSolution, SolveStatus};
pub use pipeline::{classify_all, glimps_detect, DetectionResult, GlimpsConfig, Label};
pub use synth::{generate, Instance, InstanceSpec};

/// Shorthand used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
