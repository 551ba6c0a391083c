//! Coset spaces of the rank-2 free group, percolated covers, and two
//! estimators of Furstenberg entropy.
//!
//! The library materializes a family of rooted Schreier coset graphs as lazy
//! deterministic automata — the free group itself, its one-point quotient,
//! the two integer quotients, the tree-like `K_n` family with its conjugates,
//! and Bernoulli-percolated covering spaces interpolating between a `K_n`
//! space and the free group. On top of these it provides exact sparse
//! distribution evolution with entropy increments, boundary shadow hitting
//! statistics with a likelihood-ratio entropy estimator, return-time
//! diagnostics, and a cross-cutting invariant suite. All stochastic routines
//! are reproducible bit-for-bit from their seeds, independent of thread
//! count.

pub mod boundary;
pub mod cover;
pub mod entropy;
pub mod error;
pub mod group;
pub mod rng;
pub mod segment;
pub mod spaces;
pub mod verify;

pub use boundary::{
    expected_returns, hitting_probability, return_probabilities, return_stats, rho_entropy_estimate,
    tail_return_estimate,
    rn_ratio, rn_ratio_by_letters, shadow_membership, shadows_of_root, McEstimate, ReturnStats,
    RhoEstimate, Shadow,
};
pub use cover::{loop_at, stabilizer_witness, CellSampler, CellStatus, CoverVertex, Crossing, LoopId};
pub use entropy::{
    entropy_increments, evolve, hmax_reference, irs_entropy_estimate, shannon_entropy, spec_increments,
    EntropyEstimate, IrsSpec, SparseDist,
};
pub use error::{Error, Result};
pub use group::{rank2_measure, Axis, Letter, StepMeasure, Word};
pub use segment::{Segment, SegmentVertex};
pub use spaces::{
    balls_isomorphic, conjugate_roots, conjugate_vertex, Ball, CosetSpace, SpaceSpec, State, VertexId,
    DEFAULT_BUDGET,
};
pub use verify::{run_all, CheckResult};
