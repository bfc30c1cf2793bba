//! Exact information measures on finite joint distributions.
//!
//! The crate is built around [`JointDistribution`], a dense probability table
//! over named discrete variables. On top of it sit Shannon entropy, mutual
//! information (optionally conditional), interaction information, and the
//! memorization decomposition, all computed by exact summation in nats and
//! converted on output.
//!
//! Measures that are nonnegative in exact arithmetic (entropy, mutual
//! information) may come out slightly negative in floating point; values
//! above `-NEG_SLACK` are clamped to zero, anything lower is reported as an
//! error because it indicates an invalid input table rather than roundoff.

mod dist;
mod measures;
mod units;

pub use dist::JointDistribution;
pub use measures::{
    entropy, interaction_information, memorization_decomposition, mutual_information,
    MemorizationDecomposition,
};
pub use units::InfoUnit;

use thiserror::Error;

/// Tolerance for the total-probability check on construction.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Magnitude of negative roundoff tolerated (and clamped) in nonnegative
/// measures.
pub const NEG_SLACK: f64 = 1e-12;

/// Errors from distribution construction and information measures.
#[derive(Debug, Error)]
pub enum InfoError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` appears in more than one subset")]
    OverlappingSubsets(String),
    #[error("variable subset is empty")]
    EmptySubset,
    #[error("alphabet size for `{0}` must be at least 1")]
    EmptyAlphabet(String),
    #[error("probability table has {actual} entries, expected {expected}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("probability at flat index {index} is {value:e}; entries must be finite and nonnegative")]
    InvalidProbability { index: usize, value: f64 },
    #[error("probabilities sum to {0:.17}; must be 1 within {SUM_TOLERANCE:e}")]
    NotNormalized(f64),
    #[error("nonnegative measure evaluated to {0:e}, beyond numerical slack; input table is inconsistent")]
    NegativeMeasure(f64),
}
