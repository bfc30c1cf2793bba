use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::normalize::{answer_tokens, normalize_answer};

/// Answer-scoring metric: exact match on normalized strings, or token-level
/// F1 on normalized token multisets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Em,
    F1,
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Em => write!(f, "EM"),
            Metric::F1 => write!(f, "F1"),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "em" => Ok(Metric::Em),
            "f1" => Ok(Metric::F1),
            other => Err(format!("unknown metric {other:?} (expected em or f1)")),
        }
    }
}

/// How multiple gold answers combine into one score. Validation records often
/// list several accepted answers; taking the best match over all of them is
/// the usual convention, while scoring only the first gold quantifies how
/// much that leniency inflates validation rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoldPolicy {
    MaxOverGolds,
    FirstGoldOnly,
}

fn em_single(pred: &str, gold: &str) -> f64 {
    if normalize_answer(pred) == normalize_answer(gold) {
        1.0
    } else {
        0.0
    }
}

fn f1_single(pred: &str, gold: &str) -> f64 {
    let pred_tokens = answer_tokens(pred);
    let gold_tokens = answer_tokens(gold);
    // An answer that normalizes to nothing can only be matched exactly.
    if pred_tokens.is_empty() || gold_tokens.is_empty() {
        return if pred_tokens == gold_tokens { 1.0 } else { 0.0 };
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in &gold_tokens {
        *counts.entry(t.as_str()).or_insert(0) += 1;
    }
    let mut overlap = 0usize;
    for t in &pred_tokens {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    if overlap == 0 {
        return 0.0;
    }
    let precision = overlap as f64 / pred_tokens.len() as f64;
    let recall = overlap as f64 / gold_tokens.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Scores a prediction against the gold answers, taking the best score over
/// all golds. EM returns 0 or 1; F1 returns a value in [0, 1]. An empty gold
/// list scores 0.
pub fn score_answer(pred: &str, golds: &[String], metric: Metric) -> f64 {
    score_answer_with_policy(pred, golds, metric, GoldPolicy::MaxOverGolds)
}

/// Scores a prediction under an explicit gold-combination policy.
pub fn score_answer_with_policy(
    pred: &str,
    golds: &[String],
    metric: Metric,
    policy: GoldPolicy,
) -> f64 {
    let scorer = match metric {
        Metric::Em => em_single,
        Metric::F1 => f1_single,
    };
    match policy {
        GoldPolicy::MaxOverGolds => golds
            .iter()
            .map(|g| scorer(pred, g))
            .fold(0.0f64, f64::max),
        GoldPolicy::FirstGoldOnly => golds.first().map_or(0.0, |g| scorer(pred, g)),
    }
}
