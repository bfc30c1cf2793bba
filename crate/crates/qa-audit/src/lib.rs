//! Corruption-based memorization auditing for extractive QA models.
//!
//! A model that answers a question correctly even after every digit has been
//! deleted from its context cannot be reading the answer off the passage; it
//! must have stored the context-answer association during training. This crate
//! provides the pieces of that audit:
//!
//! - dataset ingestion for common QA file layouts ([`load_dataset`]),
//! - the digit-deletion corruption ([`corrupt_digits`]),
//! - SQuAD-convention answer scoring ([`score_answer`], exact match and
//!   token-level F1),
//! - recovery rates over a prediction set ([`recovery_rate`]),
//! - train/validation comparison reports ([`memorization_report`]), and
//! - a client for collecting model predictions from a file or an HTTP
//!   endpoint ([`fetch_predictions`]).
//!
//! The headline number is `m = r_tr - r_val`: the gap between recovery rates
//! on corrupted training and corrupted validation data, in percentage points.
//! A model that only generalizes scores equally badly on both; the gap is the
//! part attributable to memorized associations.

mod entropy;
mod loader;
mod metric;
mod normalize;
mod predictions;
mod rates;
mod report;
mod sample;

use std::path::PathBuf;

use thiserror::Error;

pub use entropy::{estimate_answer_entropy, AnswerEntropy};
pub use loader::{load_dataset, DatasetFormat};
pub use metric::{score_answer, score_answer_with_policy, GoldPolicy, Metric};
pub use normalize::{answer_tokens, normalize_answer};
pub use predictions::{
    fetch_predictions, EndpointOptions, PredictionSet, PredictionSource, Provenance,
};
pub use rates::{recovery_rate, recovery_rate_with_policy};
pub use report::{memorization_report, MemorizationReport};
pub use sample::{corrupt_all, corrupt_digits, numerical_subset, CorruptedSample, QASample, Split};

/// Errors produced by loading, scoring, and prediction collection.
#[derive(Debug, Error)]
pub enum QaError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path} at byte offset {offset}: {message}")]
    Parse {
        path: PathBuf,
        offset: usize,
        message: String,
    },
    #[error("parse error in {path} at line {line}: {message}")]
    ParseLine {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("duplicate sample id {id:?}")]
    DuplicateId { id: String },
    #[error("sample {id:?} has no gold answers")]
    EmptyGolds { id: String },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("rate {value} outside [0, 100]")]
    InvalidRate { value: f64 },
    #[error("{} prediction(s) missing, first missing ids: {}", .ids.len(), preview(.ids))]
    MissingPredictions { ids: Vec<String> },
    #[error("duplicate prediction for id {id:?}")]
    DuplicatePrediction { id: String },
    #[error("malformed prediction line {line} in {path} (expected id<TAB>answer)")]
    MalformedPredictionLine { path: PathBuf, line: usize },
    #[error("malformed endpoint record for id {id:?}: {message}")]
    MalformedRecord { id: String, message: String },
    #[error("malformed endpoint response: {detail}")]
    MalformedResponse { detail: String },
    #[error("endpoint {url} failed after {attempts} attempt(s): {message}")]
    Endpoint {
        url: String,
        attempts: u32,
        message: String,
    },
}

fn preview(ids: &[String]) -> String {
    const SHOW: usize = 8;
    let shown: Vec<&str> = ids.iter().take(SHOW).map(String::as_str).collect();
    if ids.len() > SHOW {
        format!("{} ...", shown.join(", "))
    } else {
        shown.join(", ")
    }
}
