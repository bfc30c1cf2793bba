//! Finite conditional mechanisms `p(w | x, y)` and the analyses that act on
//! them: worst-case privacy epsilons under several adjacency notions,
//! factorization testing, the relaxed-privacy epsilon obtained by comparing
//! against the nearest factorized kernel, the memorization decomposition
//! induced by a prior over `(x, y)`, and an adversarial search for the prior
//! that maximizes relational memorization.
//!
//! Epsilons are reported in nats throughout; information quantities carry an
//! explicit unit.

mod decompose;
mod drp;
mod epsilon;
mod factorize;
mod mechanism;
mod search;

pub use decompose::{decompose, joint_with_output, random_prior, uniform_prior};
pub use drp::{drp_epsilon, DrpMethod};
pub use epsilon::{privacy_epsilon, Adjacency, EpsilonReport, Witness};
pub use factorize::{is_factorized, Factorization};
pub use mechanism::Mechanism;
pub use search::{adversarial_prior_search, AdversarialSearchResult};

use thiserror::Error;

/// Tolerance for conditional rows summing to one.
pub const ROW_TOLERANCE: f64 = 1e-12;

/// Errors from mechanism construction and analysis.
#[derive(Debug, Error)]
pub enum MechError {
    #[error("alphabet sizes must all be at least 1 (got nx={nx}, ny={ny}, nw={nw})")]
    EmptyAlphabet { nx: usize, ny: usize, nw: usize },
    #[error("kernel has {actual} entries, expected {expected}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("kernel entry at flat index {index} is {value:e}; entries must be finite and nonnegative")]
    InvalidKernelEntry { index: usize, value: f64 },
    #[error("conditional row (x={x}, y={y}) sums to {sum:.17}; must be 1 within {ROW_TOLERANCE:e}")]
    RowNotNormalized { x: usize, y: usize, sum: f64 },
    #[error("tolerance must be positive and finite, got {0:e}")]
    InvalidTolerance(f64),
    #[error("iteration budget must be at least 1")]
    ZeroIterations(),
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("prior must be a two-variable table with sizes ({nx}, {ny}); got {actual:?}")]
    PriorShape {
        nx: usize,
        ny: usize,
        actual: Vec<usize>,
    },
    #[error("kernel has {cells} cells; exhaustive search is limited to {max}")]
    TooLargeForExhaustive { cells: usize, max: usize },
    #[error(transparent)]
    Info(#[from] info_core::InfoError),
}
