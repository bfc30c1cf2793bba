use serde::{Deserialize, Serialize};

use crate::QaError;

/// Which split a sample belongs to. Recovery rates are always compared
/// between the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Split::Train => write!(f, "train"),
            Split::Val => write!(f, "val"),
        }
    }
}

/// One QA record: a context passage, a question about it, and the accepted
/// gold answers. `gold_answers` is nonempty; validation records commonly
/// carry several accepted variants while training records carry one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QASample {
    pub id: String,
    pub context: String,
    pub question: String,
    pub gold_answers: Vec<String>,
    pub split: Split,
}

impl QASample {
    /// Builds a sample, rejecting an empty gold-answer list.
    pub fn new(
        id: impl Into<String>,
        context: impl Into<String>,
        question: impl Into<String>,
        gold_answers: Vec<String>,
        split: Split,
    ) -> Result<Self, QaError> {
        let id = id.into();
        if gold_answers.is_empty() {
            return Err(QaError::EmptyGolds { id });
        }
        Ok(QASample {
            id,
            context: context.into(),
            question: question.into(),
            gold_answers,
            split,
        })
    }
}

/// A sample whose context has had every digit deleted. The question and the
/// gold answers are untouched, so scoring a model on corrupted samples
/// isolates what it can answer without the numeric evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptedSample {
    pub base: QASample,
    pub corrupted_context: String,
}

/// Deletes every ASCII digit from the context. Characters are removed, not
/// replaced, so surrounding punctuation and spacing collapse together
/// ("February 6, 2016," becomes "February , ,"). All non-digit characters are
/// preserved in order and the operation is idempotent.
pub fn corrupt_digits(sample: &QASample) -> CorruptedSample {
    let corrupted_context: String = sample
        .context
        .chars()
        .filter(|c| !c.is_ascii_digit())
        .collect();
    CorruptedSample {
        base: sample.clone(),
        corrupted_context,
    }
}

/// Corrupts a whole dataset, preserving order.
pub fn corrupt_all(samples: &[QASample]) -> Vec<CorruptedSample> {
    samples.iter().map(corrupt_digits).collect()
}

/// Keeps only samples where at least one gold answer contains a digit, and
/// reports the retained fraction. Deleting digits from a context can only
/// remove the evidence for answers that are themselves numeric, so audits
/// focus on this subset.
pub fn numerical_subset(samples: &[QASample]) -> (Vec<QASample>, f64) {
    let kept: Vec<QASample> = samples
        .iter()
        .filter(|s| {
            s.gold_answers
                .iter()
                .any(|a| a.chars().any(|c| c.is_ascii_digit()))
        })
        .cloned()
        .collect();
    let fraction = if samples.is_empty() {
        0.0
    } else {
        kept.len() as f64 / samples.len() as f64
    };
    (kept, fraction)
}
