use std::collections::BTreeMap;
use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use crate::sample::{QASample, Split};
use crate::QaError;

/// Supported dataset file layouts.
///
/// - `SquadJson`: nested `data / paragraphs / qas` articles, answers as
///   `{text, ...}` objects.
/// - `DropJson`: top-level map from passage id to `{passage, qa_pairs}`,
///   answers as number / spans / date objects.
/// - `SimpleJsonl`: one flat JSON record per line with `id`, `context`,
///   `question`, `answers`, and an optional `split`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetFormat {
    SquadJson,
    DropJson,
    SimpleJsonl,
}

impl std::str::FromStr for DatasetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "squad_json" | "squad" => Ok(DatasetFormat::SquadJson),
            "drop_json" | "drop" => Ok(DatasetFormat::DropJson),
            "simple_jsonl" | "jsonl" => Ok(DatasetFormat::SimpleJsonl),
            other => Err(format!(
                "unknown dataset format {other:?} (expected squad_json, drop_json, or simple_jsonl)"
            )),
        }
    }
}

/// Loads a dataset file into flat samples. `split` tags every record unless
/// the format carries its own split field (simple_jsonl may). Ids must be
/// unique; every record must have at least one gold answer. An empty file
/// body yields an empty dataset with a warning rather than an error.
pub fn load_dataset(
    path: &Path,
    format: DatasetFormat,
    split: Split,
) -> Result<Vec<QASample>, QaError> {
    let text = std::fs::read_to_string(path).map_err(|source| QaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let samples = match format {
        DatasetFormat::SquadJson => load_squad(path, &text, split)?,
        DatasetFormat::DropJson => load_drop(path, &text, split)?,
        DatasetFormat::SimpleJsonl => load_jsonl(path, &text, split)?,
    };
    let mut seen: HashSet<&str> = HashSet::with_capacity(samples.len());
    for s in &samples {
        if !seen.insert(s.id.as_str()) {
            return Err(QaError::DuplicateId { id: s.id.clone() });
        }
    }
    if samples.is_empty() {
        log::warn!("{}: dataset is empty", path.display());
    }
    Ok(samples)
}

/// Converts a serde_json error position to a byte offset in `text`.
fn json_error(path: &Path, text: &str, err: &serde_json::Error) -> QaError {
    let (line, column) = (err.line(), err.column());
    let offset = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum::<usize>()
        + column.saturating_sub(1);
    QaError::Parse {
        path: path.to_path_buf(),
        offset,
        message: err.to_string(),
    }
}

/// Deduplicates gold answers while keeping first-occurrence order; all listed
/// answers are retained as golds (validation records often carry variants).
fn dedup_golds(raw: Vec<String>) -> Vec<String> {
    let mut seen = HashSet::new();
    raw.into_iter().filter(|a| seen.insert(a.clone())).collect()
}

#[derive(Deserialize)]
struct SquadFile {
    data: Vec<SquadArticle>,
}

#[derive(Deserialize)]
struct SquadArticle {
    paragraphs: Vec<SquadParagraph>,
}

#[derive(Deserialize)]
struct SquadParagraph {
    context: String,
    qas: Vec<SquadQa>,
}

#[derive(Deserialize)]
struct SquadQa {
    id: String,
    question: String,
    answers: Vec<SquadAnswer>,
}

#[derive(Deserialize)]
struct SquadAnswer {
    text: String,
}

fn load_squad(path: &Path, text: &str, split: Split) -> Result<Vec<QASample>, QaError> {
    let file: SquadFile =
        serde_json::from_str(text).map_err(|e| json_error(path, text, &e))?;
    let mut samples = Vec::new();
    for article in file.data {
        for para in article.paragraphs {
            for qa in para.qas {
                let golds = dedup_golds(qa.answers.into_iter().map(|a| a.text).collect());
                samples.push(QASample::new(
                    qa.id,
                    para.context.clone(),
                    qa.question,
                    golds,
                    split,
                )?);
            }
        }
    }
    Ok(samples)
}

// DROP answers are structured: exactly one of number, spans, or date carries
// the answer. BTreeMap keeps passage iteration order independent of hash
// seeds so loads are deterministic.
type DropFile = BTreeMap<String, DropPassage>;

#[derive(Deserialize)]
struct DropPassage {
    passage: String,
    qa_pairs: Vec<DropQa>,
}

#[derive(Deserialize)]
struct DropQa {
    question: String,
    query_id: String,
    answer: DropAnswer,
    #[serde(default)]
    validated_answers: Vec<DropAnswer>,
}

#[derive(Deserialize, Default)]
struct DropAnswer {
    #[serde(default)]
    number: String,
    #[serde(default)]
    spans: Vec<String>,
    #[serde(default)]
    date: DropDate,
}

#[derive(Deserialize, Default)]
struct DropDate {
    #[serde(default)]
    day: String,
    #[serde(default)]
    month: String,
    #[serde(default)]
    year: String,
}

impl DropAnswer {
    fn text(&self) -> Option<String> {
        if !self.number.is_empty() {
            return Some(self.number.clone());
        }
        if !self.spans.is_empty() {
            return Some(self.spans.join(", "));
        }
        let date: Vec<&str> = [&self.date.day, &self.date.month, &self.date.year]
            .into_iter()
            .map(String::as_str)
            .filter(|p| !p.is_empty())
            .collect();
        if date.is_empty() {
            None
        } else {
            Some(date.join(" "))
        }
    }
}

fn load_drop(path: &Path, text: &str, split: Split) -> Result<Vec<QASample>, QaError> {
    let file: DropFile =
        serde_json::from_str(text).map_err(|e| json_error(path, text, &e))?;
    let mut samples = Vec::new();
    for passage in file.into_values() {
        for qa in passage.qa_pairs {
            let mut raw: Vec<String> = qa.answer.text().into_iter().collect();
            raw.extend(qa.validated_answers.iter().filter_map(DropAnswer::text));
            samples.push(QASample::new(
                qa.query_id,
                passage.passage.clone(),
                qa.question,
                dedup_golds(raw),
                split,
            )?);
        }
    }
    Ok(samples)
}

#[derive(Deserialize)]
struct SimpleRecord {
    id: String,
    context: String,
    question: String,
    answers: Vec<String>,
    #[serde(default)]
    split: Option<Split>,
}

fn load_jsonl(path: &Path, text: &str, default_split: Split) -> Result<Vec<QASample>, QaError> {
    let mut samples = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: SimpleRecord =
            serde_json::from_str(line).map_err(|e| QaError::ParseLine {
                path: path.to_path_buf(),
                line: idx + 1,
                message: e.to_string(),
            })?;
        samples.push(QASample::new(
            record.id,
            record.context,
            record.question,
            dedup_golds(record.answers),
            record.split.unwrap_or(default_split),
        )?);
    }
    Ok(samples)
}
