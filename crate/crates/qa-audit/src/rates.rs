use crate::metric::{score_answer_with_policy, GoldPolicy, Metric};
use crate::predictions::PredictionSet;
use crate::sample::CorruptedSample;
use crate::QaError;

/// Recovery rate in [0, 100] of a prediction set over corrupted samples,
/// scoring with max-over-golds.
///
/// EM mode reports the percentage of exact matches; F1 mode reports the mean
/// F1 times 100. Every sample must have a prediction: a missing id is an
/// error, never a zero score.
pub fn recovery_rate(
    preds: &PredictionSet,
    corrupted: &[CorruptedSample],
    metric: Metric,
) -> Result<f64, QaError> {
    recovery_rate_with_policy(preds, corrupted, metric, GoldPolicy::MaxOverGolds)
}

/// Recovery rate under an explicit gold-combination policy.
pub fn recovery_rate_with_policy(
    preds: &PredictionSet,
    corrupted: &[CorruptedSample],
    metric: Metric,
    policy: GoldPolicy,
) -> Result<f64, QaError> {
    if corrupted.is_empty() {
        return Err(QaError::EmptyDataset);
    }
    let missing: Vec<String> = corrupted
        .iter()
        .filter(|s| preds.get(&s.base.id).is_none())
        .map(|s| s.base.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(QaError::MissingPredictions { ids: missing });
    }
    let total: f64 = corrupted
        .iter()
        .map(|s| {
            let pred = preds.get(&s.base.id).expect("coverage checked above");
            let score = score_answer_with_policy(pred, &s.base.gold_answers, metric, policy);
            match metric {
                Metric::Em => {
                    if score == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                Metric::F1 => score,
            }
        })
        .sum();
    Ok(total / corrupted.len() as f64 * 100.0)
}
