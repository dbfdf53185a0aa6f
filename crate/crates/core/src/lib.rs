//! MAC constraint solver with pluggable branching schemes: d-way, 2-way,
//! domain splitting, and set branching over ties or x-means clusters of
//! promise scores. Includes instance I/O, benchmark generators and the
//! statistics used to compare schemes.

mod bits;

pub mod bench;
pub mod branching;
#[cfg(feature = "cli")]
pub mod cli;
pub mod clustering;
pub mod expr;
pub mod generators;
pub mod heuristics;
pub mod instance_io;
pub mod model;
pub mod propagation;
pub mod rng;
pub mod search;
pub mod stats;

pub use branching::{Scheme, SchemeKind};
pub use model::{Constraint, Problem, ProblemBuilder, SearchState, Value, VarId};
pub use search::{solve, verify, Limits, Outcome, SolveConfig, Status};
