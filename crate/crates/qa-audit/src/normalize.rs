/// Normalizes an answer string the way the standard SQuAD evaluator does:
/// lowercase, delete ASCII punctuation, drop the article tokens "a", "an",
/// "the", and collapse whitespace runs to single spaces.
///
/// Punctuation is deleted rather than replaced, so "76.5" stays one token
/// ("765") and "February 6, 2016" becomes "february 6 2016".
pub fn normalize_answer(s: &str) -> String {
    let lowered = s.to_lowercase();
    let stripped: String = lowered
        .chars()
        .filter(|c| !c.is_ascii_punctuation())
        .collect();
    stripped
        .split_whitespace()
        .filter(|t| !matches!(*t, "a" | "an" | "the"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Normalized token list used by the F1 metric.
pub fn answer_tokens(s: &str) -> Vec<String> {
    normalize_answer(s)
        .split_whitespace()
        .map(str::to_owned)
        .collect()
}
