use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qa_audit::{
    corrupt_all, estimate_answer_entropy, fetch_predictions, load_dataset, memorization_report,
    numerical_subset, recovery_rate, DatasetFormat, EndpointOptions, MemorizationReport, Metric,
    PredictionSource, QASample, Split,
};
use serde::Serialize;

use super::pretty_json;
use crate::cli::QaCmd;
use crate::config::{FileConfig, QaSection};
use crate::manifest::RunRecorder;

pub fn run(cmd: &QaCmd, cfg: &FileConfig, rec: &mut RunRecorder) -> Result<()> {
    match cmd {
        QaCmd::Corrupt {
            dataset,
            format,
            split,
        } => corrupt(dataset, format.as_deref(), split, &cfg.qa, rec),
        QaCmd::Report {
            dataset,
            val_dataset,
            format,
            train_preds,
            val_preds,
            endpoint,
            metric,
            numerical_only,
            entropy,
        } => report(
            ReportArgs {
                dataset,
                val_dataset: val_dataset.as_deref(),
                format: format.as_deref(),
                train_preds: train_preds.as_deref(),
                val_preds: val_preds.as_deref(),
                endpoint: endpoint.as_deref(),
                metric: metric.as_deref(),
                numerical_only: *numerical_only,
                entropy,
            },
            &cfg.qa,
            rec,
        ),
        QaCmd::Epochs {
            dataset,
            val_dataset,
            format,
            preds_dir,
            metric,
            numerical_only,
        } => epochs(
            dataset,
            val_dataset.as_deref(),
            format.as_deref(),
            preds_dir,
            metric.as_deref(),
            *numerical_only,
            &cfg.qa,
            rec,
        ),
    }
}

fn corrupt(
    dataset: &Path,
    format: Option<&str>,
    split: &str,
    qa: &QaSection,
    rec: &mut RunRecorder,
) -> Result<()> {
    let (fmt, fmt_name) = parse_format(format, qa)?;
    let split = parse_split(split)?;
    rec.param("format", fmt_name);
    rec.param("default_split", split.to_string());
    rec.input(dataset)?;
    let samples = load_dataset(dataset, fmt, split)?;
    let corrupted = corrupt_all(&samples);
    // Digits are single bytes, so the byte difference counts deletions.
    let removed: usize = corrupted
        .iter()
        .map(|c| c.base.context.len() - c.corrupted_context.len())
        .sum();

    #[derive(Serialize)]
    struct Line<'a> {
        id: &'a str,
        split: Split,
        question: &'a str,
        gold_answers: &'a [String],
        corrupted_context: &'a str,
    }
    let mut out = String::new();
    for c in &corrupted {
        out.push_str(&serde_json::to_string(&Line {
            id: &c.base.id,
            split: c.base.split,
            question: &c.base.question,
            gold_answers: &c.base.gold_answers,
            corrupted_context: &c.corrupted_context,
        })?);
        out.push('\n');
    }
    let path = rec.write_output("corrupted.jsonl", &out)?;
    println!(
        "corrupted {} samples ({} digit bytes deleted) into {}",
        corrupted.len(),
        removed,
        path.display()
    );
    Ok(())
}

struct ReportArgs<'a> {
    dataset: &'a Path,
    val_dataset: Option<&'a Path>,
    format: Option<&'a str>,
    train_preds: Option<&'a Path>,
    val_preds: Option<&'a Path>,
    endpoint: Option<&'a str>,
    metric: Option<&'a str>,
    numerical_only: bool,
    entropy: &'a str,
}

fn report(args: ReportArgs<'_>, qa: &QaSection, rec: &mut RunRecorder) -> Result<()> {
    let (fmt, fmt_name) = parse_format(args.format, qa)?;
    rec.param("format", fmt_name);
    rec.param("numerical_only", args.numerical_only);
    rec.param("entropy", args.entropy);
    let metrics = parse_metrics(args.metric, qa)?;
    let (train, val) = load_splits(rec, args.dataset, args.val_dataset, fmt)?;
    let (train, val) = maybe_numerical(args.numerical_only, train, val, rec)?;
    let corr_tr = corrupt_all(&train);
    let corr_val = corrupt_all(&val);

    let (src_tr, src_val) = match (args.endpoint, args.train_preds, args.val_preds) {
        (Some(url), None, None) => {
            let mut opts = EndpointOptions::new(url);
            if let Some(b) = qa.batch_size {
                opts.batch_size = b;
            }
            if let Some(c) = qa.concurrency {
                opts.concurrency = c;
            }
            if let Some(a) = qa.attempts {
                opts.attempts = a;
            }
            rec.param("endpoint", url);
            (
                PredictionSource::Endpoint(opts.clone()),
                PredictionSource::Endpoint(opts),
            )
        }
        (None, Some(tr), Some(va)) => {
            rec.input(tr)?;
            rec.input(va)?;
            (
                PredictionSource::File(tr.to_path_buf()),
                PredictionSource::File(va.to_path_buf()),
            )
        }
        (Some(_), _, _) => bail!("--endpoint cannot be combined with prediction files"),
        _ => bail!("provide either --endpoint or both --train-preds and --val-preds"),
    };
    let preds_tr = fetch_predictions(&src_tr, &corr_tr)?;
    let preds_val = fetch_predictions(&src_val, &corr_val)?;

    let h_bits = match args.entropy {
        "none" => None,
        mode => {
            let est = estimate_answer_entropy(&train)?;
            Some(match mode {
                "equiprobable" => est.equiprobable_bits,
                "plugin" => est.plugin_bits,
                other => bail!(
                    "unknown entropy mode '{other}' (expected equiprobable, plugin, or none)"
                ),
            })
        }
    };

    let mut reports: Vec<MemorizationReport> = Vec::new();
    for metric in &metrics {
        let r_tr = recovery_rate(&preds_tr, &corr_tr, *metric)?;
        let r_val = recovery_rate(&preds_val, &corr_val, *metric)?;
        let rep = memorization_report(r_tr, r_val, *metric, h_bits, Some(train.len()))?
            .with_counts(train.len(), val.len());
        reports.push(rep);
    }

    rec.write_output("report.json", &pretty_json(&reports)?)?;
    let mut csv = String::from("metric,r_tr,r_val,m\n");
    for rep in &reports {
        csv.push_str(&rep.summary_row());
        csv.push('\n');
    }
    rec.write_output("summary.csv", &csv)?;

    for rep in &reports {
        println!(
            "{}: train recovery {}, val recovery {}, gap m = {}",
            rep.metric, rep.r_tr, rep.r_val, rep.m
        );
        if let (Some(h), Some(scaled)) = (rep.h_x_bits, rep.mem_r_scaled_bits) {
            println!("    relational estimate {scaled} bits at H = {h} bits per answer");
        }
        if let Some(bound) = rep.mem_m_bound {
            println!("    sample-marginal ceiling {bound:e} per sample");
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn epochs(
    dataset: &Path,
    val_dataset: Option<&Path>,
    format: Option<&str>,
    preds_dir: &Path,
    metric: Option<&str>,
    numerical_only: bool,
    qa: &QaSection,
    rec: &mut RunRecorder,
) -> Result<()> {
    let (fmt, fmt_name) = parse_format(format, qa)?;
    rec.param("format", fmt_name);
    rec.param("numerical_only", numerical_only);
    rec.param("preds_dir", preds_dir.display().to_string());
    let metrics = parse_metrics(metric, qa)?;
    let (train, val) = load_splits(rec, dataset, val_dataset, fmt)?;
    let (train, val) = maybe_numerical(numerical_only, train, val, rec)?;
    let corr_tr = corrupt_all(&train);
    let corr_val = corrupt_all(&val);

    let pairs = scan_epoch_files(preds_dir)?;
    if pairs.is_empty() {
        bail!(
            "no epoch-N.train.tsv / epoch-N.val.tsv pairs found in {}",
            preds_dir.display()
        );
    }
    let mut csv = String::from("epoch,metric,r_tr,r_val,m\n");
    for (epoch, tr_path, val_path) in &pairs {
        rec.input(tr_path)?;
        rec.input(val_path)?;
        let p_tr = fetch_predictions(&PredictionSource::File(tr_path.clone()), &corr_tr)?;
        let p_val = fetch_predictions(&PredictionSource::File(val_path.clone()), &corr_val)?;
        for metric in &metrics {
            let r_tr = recovery_rate(&p_tr, &corr_tr, *metric)?;
            let r_val = recovery_rate(&p_val, &corr_val, *metric)?;
            let m = r_tr - r_val;
            csv.push_str(&format!("{epoch},{metric},{r_tr},{r_val},{m}\n"));
        }
    }
    let path = rec.write_output("epochs.csv", &csv)?;
    print!("{csv}");
    println!(
        "({} epochs x {} metrics written to {})",
        pairs.len(),
        metrics.len(),
        path.display()
    );
    Ok(())
}

fn parse_format(flag: Option<&str>, qa: &QaSection) -> Result<(DatasetFormat, String)> {
    let name = flag
        .map(str::to_owned)
        .or_else(|| qa.format.clone())
        .unwrap_or_else(|| "simple_jsonl".into());
    let fmt = name.parse::<DatasetFormat>().map_err(anyhow::Error::msg)?;
    Ok((fmt, name))
}

fn parse_metrics(flag: Option<&str>, qa: &QaSection) -> Result<Vec<Metric>> {
    let name = flag
        .map(str::to_owned)
        .or_else(|| qa.metric.clone())
        .unwrap_or_else(|| "both".into());
    if name.eq_ignore_ascii_case("both") {
        Ok(vec![Metric::Em, Metric::F1])
    } else {
        Ok(vec![name.parse::<Metric>().map_err(anyhow::Error::msg)?])
    }
}

fn parse_split(s: &str) -> Result<Split> {
    match s {
        "train" => Ok(Split::Train),
        "val" => Ok(Split::Val),
        other => bail!("unknown split '{other}' (expected train or val)"),
    }
}

/// Loads one or two dataset files and partitions the samples by split tag.
/// A second file is tagged as validation by default; formats carrying their
/// own split field keep it either way.
fn load_splits(
    rec: &mut RunRecorder,
    train_path: &Path,
    val_path: Option<&Path>,
    fmt: DatasetFormat,
) -> Result<(Vec<QASample>, Vec<QASample>)> {
    rec.input(train_path)?;
    let mut all = load_dataset(train_path, fmt, Split::Train)?;
    if let Some(vp) = val_path {
        rec.input(vp)?;
        all.extend(load_dataset(vp, fmt, Split::Val)?);
    }
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for s in &all {
        if !seen.insert(s.id.clone()) {
            bail!("sample id '{}' appears in both dataset files", s.id);
        }
    }
    let (train, val): (Vec<_>, Vec<_>) = all.into_iter().partition(|s| s.split == Split::Train);
    if train.is_empty() {
        bail!("no training samples in the dataset");
    }
    if val.is_empty() {
        bail!(
            "no validation samples; pass --val-dataset or use a format \
             whose records carry a split field"
        );
    }
    Ok((train, val))
}

fn maybe_numerical(
    enabled: bool,
    train: Vec<QASample>,
    val: Vec<QASample>,
    rec: &mut RunRecorder,
) -> Result<(Vec<QASample>, Vec<QASample>)> {
    if !enabled {
        return Ok((train, val));
    }
    let (train_sub, frac_tr) = numerical_subset(&train);
    let (val_sub, frac_val) = numerical_subset(&val);
    rec.param("numerical_fraction_train", frac_tr);
    rec.param("numerical_fraction_val", frac_val);
    if train_sub.is_empty() || val_sub.is_empty() {
        bail!("--numerical-only left an empty split (train {} of {}, val {} of {})",
            train_sub.len(), train.len(), val_sub.len(), val.len());
    }
    Ok((train_sub, val_sub))
}

fn scan_epoch_files(dir: &Path) -> Result<Vec<(u64, PathBuf, PathBuf)>> {
    let mut trains: BTreeMap<u64, PathBuf> = BTreeMap::new();
    let mut vals: BTreeMap<u64, PathBuf> = BTreeMap::new();
    let entries = std::fs::read_dir(dir)
        .with_context(|| format!("reading predictions directory {}", dir.display()))?;
    for entry in entries {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(epoch) = parse_epoch(&name, ".train.tsv") {
            if trains.insert(epoch, entry.path()).is_some() {
                bail!("two train prediction files map to epoch {epoch}");
            }
        } else if let Some(epoch) = parse_epoch(&name, ".val.tsv") {
            if vals.insert(epoch, entry.path()).is_some() {
                bail!("two val prediction files map to epoch {epoch}");
            }
        }
    }
    let mut out = Vec::new();
    for (epoch, tr) in trains {
        match vals.remove(&epoch) {
            Some(v) => out.push((epoch, tr, v)),
            None => bail!("epoch {epoch} has train predictions but no epoch-{epoch}.val.tsv"),
        }
    }
    if let Some((epoch, _)) = vals.into_iter().next() {
        bail!("epoch {epoch} has val predictions but no epoch-{epoch}.train.tsv");
    }
    Ok(out)
}

fn parse_epoch(name: &str, suffix: &str) -> Option<u64> {
    name.strip_prefix("epoch-")?.strip_suffix(suffix)?.parse().ok()
}
