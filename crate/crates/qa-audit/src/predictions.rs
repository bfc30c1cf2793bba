use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::sample::CorruptedSample;
use crate::QaError;

/// Where a prediction set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    File,
    Endpoint,
}

/// Tuning for endpoint fetches. Defaults: batches of 32, 4 concurrent
/// requests, 3 attempts per batch with doubling backoff starting at 100 ms.
#[derive(Debug, Clone)]
pub struct EndpointOptions {
    pub url: String,
    pub batch_size: usize,
    pub concurrency: usize,
    pub attempts: u32,
    pub initial_backoff: Duration,
    pub timeout: Duration,
}

impl EndpointOptions {
    pub fn new(url: impl Into<String>) -> Self {
        EndpointOptions {
            url: url.into(),
            batch_size: 32,
            concurrency: 4,
            attempts: 3,
            initial_backoff: Duration::from_millis(100),
            timeout: Duration::from_secs(30),
        }
    }
}

/// Prediction source: a local TSV file (`id<TAB>answer` per line) or an HTTP
/// endpoint answering batched JSON requests.
#[derive(Debug, Clone)]
pub enum PredictionSource {
    File(PathBuf),
    Endpoint(EndpointOptions),
}

/// Complete id-to-answer mapping for a set of audited samples. Construction
/// guarantees coverage: every sample id has a prediction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionSet {
    answers: BTreeMap<String, String>,
    pub provenance: Provenance,
}

impl PredictionSet {
    /// Wraps an id-to-answer map, without a coverage check (callers pairing
    /// it with a dataset get the check from [`crate::recovery_rate`]).
    pub fn from_map(answers: BTreeMap<String, String>, provenance: Provenance) -> Self {
        PredictionSet {
            answers,
            provenance,
        }
    }

    pub fn get(&self, id: &str) -> Option<&str> {
        self.answers.get(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.answers.keys().map(String::as_str)
    }
}

/// Collects predictions for every corrupted sample from a file or endpoint.
///
/// File mode rejects duplicate ids and malformed lines; ids not in the
/// sample set are ignored with a warning. Endpoint mode posts batches of
/// `{id, corrupted_context, question}` records, expects `{predictions:
/// [{id, answer}]}` responses, retries failed batches with backoff, and
/// issues up to `concurrency` requests at a time. Both modes fail if any
/// sample is left without a prediction, listing the missing ids.
pub fn fetch_predictions(
    source: &PredictionSource,
    samples: &[CorruptedSample],
) -> Result<PredictionSet, QaError> {
    let mut set = match source {
        PredictionSource::File(path) => read_prediction_file(path, samples)?,
        PredictionSource::Endpoint(opts) => query_endpoint(opts, samples)?,
    };
    let missing: Vec<String> = samples
        .iter()
        .map(|s| s.base.id.clone())
        .filter(|id| !set.answers.contains_key(id))
        .collect();
    if !missing.is_empty() {
        return Err(QaError::MissingPredictions { ids: missing });
    }
    // Drop entries for ids outside the audited subset so the mapping and the
    // dataset agree exactly.
    let wanted: BTreeSet<&str> = samples.iter().map(|s| s.base.id.as_str()).collect();
    let before = set.answers.len();
    set.answers.retain(|id, _| wanted.contains(id.as_str()));
    if set.answers.len() < before {
        log::warn!(
            "ignoring {} prediction(s) for ids outside the audited sample set",
            before - set.answers.len()
        );
    }
    Ok(set)
}

fn read_prediction_file(
    path: &Path,
    _samples: &[CorruptedSample],
) -> Result<PredictionSet, QaError> {
    let text = std::fs::read_to_string(path).map_err(|source| QaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut answers = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let Some((id, answer)) = line.split_once('\t') else {
            return Err(QaError::MalformedPredictionLine {
                path: path.to_path_buf(),
                line: idx + 1,
            });
        };
        if answers.insert(id.to_string(), answer.to_string()).is_some() {
            return Err(QaError::DuplicatePrediction { id: id.to_string() });
        }
    }
    Ok(PredictionSet {
        answers,
        provenance: Provenance::File,
    })
}

#[derive(Serialize)]
struct EndpointRequest<'a> {
    samples: Vec<EndpointQuery<'a>>,
}

#[derive(Serialize)]
struct EndpointQuery<'a> {
    id: &'a str,
    corrupted_context: &'a str,
    question: &'a str,
}

#[derive(Deserialize)]
struct EndpointResponse {
    predictions: Vec<EndpointRecord>,
}

#[derive(Deserialize)]
struct EndpointRecord {
    id: Option<String>,
    answer: Option<String>,
}

fn query_endpoint(
    opts: &EndpointOptions,
    samples: &[CorruptedSample],
) -> Result<PredictionSet, QaError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(opts.timeout)
        .build()
        .map_err(|e| QaError::Endpoint {
            url: opts.url.clone(),
            attempts: 0,
            message: e.to_string(),
        })?;
    let batch_size = opts.batch_size.max(1);
    let batches: Vec<&[CorruptedSample]> = samples.chunks(batch_size).collect();
    type BatchResult = Result<Vec<(String, String)>, QaError>;
    let results: Mutex<Vec<Option<BatchResult>>> =
        Mutex::new((0..batches.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = opts.concurrency.max(1).min(batches.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                let Some(batch) = batches.get(idx) else {
                    break;
                };
                let outcome = fetch_batch(&client, opts, batch);
                results.lock().unwrap()[idx] = Some(outcome);
            });
        }
    });
    // Merge in batch order so the outcome is independent of scheduling.
    let mut answers = BTreeMap::new();
    for slot in results.into_inner().unwrap() {
        let pairs = slot.expect("every batch processed")?;
        for (id, answer) in pairs {
            if answers.insert(id.clone(), answer).is_some() {
                return Err(QaError::DuplicatePrediction { id });
            }
        }
    }
    Ok(PredictionSet {
        answers,
        provenance: Provenance::Endpoint,
    })
}

fn fetch_batch(
    client: &reqwest::blocking::Client,
    opts: &EndpointOptions,
    batch: &[CorruptedSample],
) -> Result<Vec<(String, String)>, QaError> {
    let request = EndpointRequest {
        samples: batch
            .iter()
            .map(|s| EndpointQuery {
                id: &s.base.id,
                corrupted_context: &s.corrupted_context,
                question: &s.base.question,
            })
            .collect(),
    };
    let attempts = opts.attempts.max(1);
    let mut last_error = String::new();
    for attempt in 0..attempts {
        if attempt > 0 {
            std::thread::sleep(opts.initial_backoff * 2u32.pow(attempt - 1));
        }
        match client.post(&opts.url).json(&request).send() {
            Ok(response) if response.status().is_success() => {
                let body: EndpointResponse =
                    response.json().map_err(|e| QaError::MalformedResponse {
                        detail: e.to_string(),
                    })?;
                return parse_records(body, batch);
            }
            Ok(response) => {
                last_error = format!("status {}", response.status());
            }
            Err(e) => {
                last_error = e.to_string();
            }
        }
    }
    Err(QaError::Endpoint {
        url: opts.url.clone(),
        attempts,
        message: last_error,
    })
}

fn parse_records(
    body: EndpointResponse,
    batch: &[CorruptedSample],
) -> Result<Vec<(String, String)>, QaError> {
    let requested: BTreeSet<&str> = batch.iter().map(|s| s.base.id.as_str()).collect();
    let mut pairs = Vec::with_capacity(body.predictions.len());
    for record in body.predictions {
        let Some(id) = record.id else {
            return Err(QaError::MalformedResponse {
                detail: "prediction record missing id".into(),
            });
        };
        if !requested.contains(id.as_str()) {
            return Err(QaError::MalformedRecord {
                id,
                message: "id was not part of the request batch".into(),
            });
        }
        let Some(answer) = record.answer else {
            return Err(QaError::MalformedRecord {
                id,
                message: "record has no answer field".into(),
            });
        };
        pairs.push((id, answer));
    }
    Ok(pairs)
}
