use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::normalize::normalize_answer;
use crate::sample::QASample;
use crate::QaError;

/// Entropy estimates for the gold-answer distribution, in bits.
///
/// `equiprobable_bits` (log2 of the distinct-answer count) is the ceiling
/// reached when every distinct answer is equally likely; entropy-scaled
/// reports default to it. `plugin_bits` is the plug-in Shannon entropy of
/// the empirical answer frequencies and is never larger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnswerEntropy {
    pub plugin_bits: f64,
    pub equiprobable_bits: f64,
    pub distinct: usize,
    pub total: usize,
}

/// Estimates the entropy of the answer variable from the primary (first)
/// gold of each sample, after normalization.
pub fn estimate_answer_entropy(samples: &[QASample]) -> Result<AnswerEntropy, QaError> {
    if samples.is_empty() {
        return Err(QaError::EmptyDataset);
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for s in samples {
        let key = s
            .gold_answers
            .first()
            .map(|g| normalize_answer(g))
            .unwrap_or_default();
        *counts.entry(key).or_insert(0) += 1;
    }
    let total = samples.len();
    let n = total as f64;
    let plugin_bits = -counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>();
    // -0.0 from a single class; normalize the sign.
    let plugin_bits = if plugin_bits == 0.0 { 0.0 } else { plugin_bits };
    Ok(AnswerEntropy {
        plugin_bits,
        equiprobable_bits: (counts.len() as f64).log2(),
        distinct: counts.len(),
        total,
    })
}
