//! Knapsack problem with conflicts.
//!
//! Items carry integral profits and weights; a conflict graph forbids
//! selecting both endpoints of any edge. The crate provides the data model
//! and its text format, upper bounds, a depth-first branch-and-bound with an
//! exhaustive oracle for cross-checks, construction and local search
//! heuristics, a deterministic benchmark generator, an LP-format exporter and
//! batch-run aggregation.

pub mod bounds;
pub mod campaign;
pub mod error;
pub mod exact;
pub mod format;
pub mod gen;
pub mod heur;
pub mod instance;
pub mod itemset;
pub mod lp;

pub use bounds::{
    clique_partition_ub, fractional_knapsack_ub, greedy_clique_partition, BoundContext,
};
pub use error::{KpcError, Result};
pub use exact::{
    gap_percent, preprocess, solve_bb, solve_bb_with, solve_oracle, BoundKind, Limits, SolveResult,
    SolverOptions, Status,
};
pub use format::{parse_kpc, read_instance, to_kpc_string, write_instance};
pub use heur::{greedy_construct, local_search};
pub use instance::{
    evaluate, validate_instance, validate_instance_with_warnings, Instance, RawInstance, Solution,
    ValidationWarning,
};
pub use itemset::ItemSet;
pub use lp::{to_lp_string, write_lp};
