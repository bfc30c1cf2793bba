//! Loader behavior on the fixture corpus and on malformed inputs.

use std::io::Write;
use std::path::{Path, PathBuf};

use qa_audit::{load_dataset, DatasetFormat, QaError, Split};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn write_temp(dir: &tempfile::TempDir, name: &str, content: &str) -> PathBuf {
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

#[test]
fn squad_fixture_flattens_articles() {
    let samples = load_dataset(&fixture("squad_small.json"), DatasetFormat::SquadJson, Split::Train)
        .unwrap();
    assert_eq!(samples.len(), 7);
    let first = &samples[0];
    assert_eq!(first.id, "beyonce-formation-1");
    assert!(first.context.starts_with("On February 6, 2016"));
    assert_eq!(first.gold_answers, vec!["February 6, 2016".to_string()]);
    assert_eq!(first.split, Split::Train);
    // Paragraph context is shared across its questions.
    assert_eq!(samples[1].context, first.context);
    // Repeated answer texts are deduplicated, distinct ones kept in order.
    let median = samples.iter().find(|s| s.id == "county-median-4").unwrap();
    assert_eq!(
        median.gold_answers,
        vec!["40 years".to_string(), "40".to_string()]
    );
}

#[test]
fn minimal_squad_file_counts_qas() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "mini.json",
        r#"{"data": [{"paragraphs": [{"context": "c 1", "qas": [
            {"id": "a", "question": "q1", "answers": [{"text": "x", "answer_start": 0}]},
            {"id": "b", "question": "q2", "answers": [{"text": "y", "answer_start": 1}]}
        ]}]}]}"#,
    );
    let samples = load_dataset(&path, DatasetFormat::SquadJson, Split::Val).unwrap();
    assert_eq!(samples.len(), 2);
    assert!(samples.iter().all(|s| s.split == Split::Val));
}

#[test]
fn empty_data_list_loads_as_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "empty.json", r#"{"data": []}"#);
    let samples = load_dataset(&path, DatasetFormat::SquadJson, Split::Train).unwrap();
    assert!(samples.is_empty());
}

#[test]
fn malformed_json_reports_byte_offset() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "bad.json", r#"{"data": [}"#);
    let err = load_dataset(&path, DatasetFormat::SquadJson, Split::Train).unwrap_err();
    match err {
        QaError::Parse { offset, .. } => assert_eq!(offset, 10),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn malformed_json_offset_counts_earlier_lines() {
    let dir = tempfile::tempdir().unwrap();
    // Line 1 occupies bytes 0..9 including the newline; the offending '!'
    // sits at byte 9 on line 2.
    let path = write_temp(&dir, "bad2.json", "{\"data\":\n!}");
    let err = load_dataset(&path, DatasetFormat::SquadJson, Split::Train).unwrap_err();
    match err {
        QaError::Parse { offset, message, .. } => {
            assert_eq!(offset, 9, "{message}");
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn drop_fixture_extracts_all_answer_kinds() {
    let samples =
        load_dataset(&fixture("drop_small.json"), DatasetFormat::DropJson, Split::Val).unwrap();
    // Passages iterate in key order, so the load is deterministic.
    let ids: Vec<&str> = samples.iter().map(|s| s.id.as_str()).collect();
    assert_eq!(ids, ["drop-q-4", "drop-q-1", "drop-q-2", "drop-q-3"]);
    let by_id = |id: &str| samples.iter().find(|s| s.id == id).unwrap();
    // Number, span, and date answers all flatten to strings.
    assert_eq!(by_id("drop-q-1").gold_answers, vec!["7".to_string()]);
    assert_eq!(by_id("drop-q-3").gold_answers, vec!["2010".to_string()]);
    assert_eq!(
        by_id("drop-q-4").gold_answers,
        vec!["3 March 1875".to_string()]
    );
    // Validated answers are retained as additional golds, deduplicated.
    assert_eq!(
        by_id("drop-q-2").gold_answers,
        vec!["The Bears".to_string(), "Bears".to_string()]
    );
}

#[test]
fn jsonl_fixture_honors_record_splits() {
    let samples = load_dataset(
        &fixture("simple_small.jsonl"),
        DatasetFormat::SimpleJsonl,
        Split::Val,
    )
    .unwrap();
    assert_eq!(samples.len(), 3);
    assert_eq!(samples[0].split, Split::Train); // explicit in the record
    assert_eq!(samples[1].split, Split::Val);
    assert_eq!(samples[2].split, Split::Val); // falls back to the argument
    assert_eq!(
        samples[1].gold_answers,
        vec!["324 metres".to_string(), "324".to_string()]
    );
}

#[test]
fn jsonl_parse_error_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "bad.jsonl",
        "{\"id\": \"a\", \"context\": \"c\", \"question\": \"q\", \"answers\": [\"x\"]}\nnot json\n",
    );
    let err = load_dataset(&path, DatasetFormat::SimpleJsonl, Split::Train).unwrap_err();
    match err {
        QaError::ParseLine { line, .. } => assert_eq!(line, 2),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn duplicate_ids_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let record = r#"{"id": "dup", "context": "c", "question": "q", "answers": ["x"]}"#;
    let path = write_temp(&dir, "dup.jsonl", &format!("{record}\n{record}\n"));
    let err = load_dataset(&path, DatasetFormat::SimpleJsonl, Split::Train).unwrap_err();
    assert!(matches!(err, QaError::DuplicateId { id } if id == "dup"));
}

#[test]
fn sample_without_answers_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "noans.jsonl",
        r#"{"id": "e1", "context": "c", "question": "q", "answers": []}"#,
    );
    let err = load_dataset(&path, DatasetFormat::SimpleJsonl, Split::Train).unwrap_err();
    assert!(matches!(err, QaError::EmptyGolds { id } if id == "e1"));
}

#[test]
fn missing_file_reports_path() {
    let err = load_dataset(
        Path::new("/definitely/not/here.json"),
        DatasetFormat::SquadJson,
        Split::Train,
    )
    .unwrap_err();
    assert!(matches!(err, QaError::Io { .. }));
}
