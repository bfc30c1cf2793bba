//! Overparameterized linear regression on concatenated records.
//!
//! Each record is `z_i = (x_i, y_i)` with a scalar target `x_i` and a
//! feature vector `y_i`; the model predicts `x` from the full record by
//! minimizing `L(w) = ||Z w - X||^2 / (2n)`. Because `x` itself is part of
//! the input, the trivial solution `w = e_1` always achieves zero loss; what
//! gradient descent from zero actually finds, and how much of `X` can be
//! read back out of the trained weights, depends on the regime:
//!
//! * `d < n` (more samples than features): the unique minimizer is `e_1`,
//!   the weights carry nothing about individual targets, and the
//!   reconstruction attack is degenerate;
//! * `d >= n`: gradient descent from zero converges to the minimum-norm
//!   interpolator `w* = e_1 + v* / ||v*||^2` with `v* = (-1, pinv(Y) X)`,
//!   from which every training target can be reconstructed exactly.
//!
//! The crate provides seeded Gaussian datasets, plain gradient descent, the
//! closed-form limit, the reconstruction attack, per-step memorization
//! curves, and the curvature spectrum governing the dynamics.

mod attack;
mod closed_form;
mod curve;
mod dataset;
mod gd;

pub use attack::{recovery_attack, AttackResult};
pub use closed_form::{closed_form_minimizer, dynamics_spectrum};
pub use curve::{memorization_curve, CurvePoint, Trajectory};
pub use dataset::{sample_gaussian_dataset, Dataset};
pub use gd::{default_learning_rate, empirical_loss, gradient_descent, GdConfig, GdRun};

use thiserror::Error;

/// Rank tolerance: smallest singular value required of the feature matrix.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Loss threshold treated as divergence.
pub const DIVERGENCE_LOSS: f64 = 1e12;

#[derive(Debug, Error)]
pub enum LinSimError {
    #[error("dataset must have n >= 1 and d >= 1 (got n={n}, d={d})")]
    EmptyDataset { n: usize, d: usize },
    #[error("feature matrix is rank deficient: smallest singular value {sigma_min:e} <= {RANK_TOLERANCE:e}")]
    RankDeficient { sigma_min: f64 },
    #[error("operation requires {need} (got n={n}, d={d})")]
    WrongRegime {
        n: usize,
        d: usize,
        need: &'static str,
    },
    #[error("gradient descent diverged at step {step} with loss {loss:e}; lower the learning rate")]
    Diverged { step: usize, loss: f64 },
    #[error("attack degenerate: leading weight {leading} leaves no recoverable signal")]
    DegenerateAttack { leading: f64 },
    #[error("all training targets are zero; memorization is undefined")]
    DegenerateTargets,
    #[error("dimension mismatch: expected d={expected}, got d={actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
