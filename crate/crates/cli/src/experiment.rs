//! The end-to-end notation comparison on one manifest.
//!
//! For each notation: tokenize the train split, train a Markov model, run
//! the harness on the test split, decode and score the continuations. The
//! test pieces themselves are scored after a round trip through each
//! notation. Both sets are then bootstrapped and compared across notations.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use structok_core::metrics::MetricReport;
use structok_core::stats::{compare_sets, derive_seed, BootstrapConfig, ComparisonTable};
use structok_core::tokenizer::RepresentationKind;

use crate::commands::{
    corpus_stats_report, encode_pieces, evaluate_sequences, generate_into, load_pieces, train_on,
    write_reports, CorpusStatsReport, EvaluationReport, LoadedPiece, MODEL_FILE,
};
use crate::config::RunConfig;
use crate::manifest::{DatasetManifest, Split};
use crate::{io, tables};

pub const REPORT_JSON: &str = "report.json";
pub const TABLES_TXT: &str = "tables.txt";
pub const RUN_LOG: &str = "run.log";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NotationSummary {
    pub kind: RepresentationKind,
    pub train_files: usize,
    pub train_tokens: usize,
    pub model_contexts: usize,
    pub generated: usize,
    pub skipped_primers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub dataset: String,
    pub corpus: CorpusStatsReport,
    pub notations: Vec<NotationSummary>,
    /// Generated pieces, original notation against explicit.
    pub generated: ComparisonTable,
    /// Test pieces after a round trip through each notation.
    pub real: ComparisonTable,
}

impl ExperimentReport {
    /// True when every cell of the generated comparison and the real
    /// entropy/consistency cells have intervals on both sides.
    pub fn fully_populated(&self) -> bool {
        use structok_core::metrics::MetricKind;
        use structok_core::stats::CellStatus;
        let ok = |t: &ComparisonTable, m: MetricKind| t.cell(m).is_some_and(|c| c.status == CellStatus::Ok);
        MetricKind::ALL.iter().all(|&m| ok(&self.generated, m))
            && ok(&self.real, MetricKind::Entropy)
            && ok(&self.real, MetricKind::Consistency)
    }
}

/// Timestamped progress lines; kept apart from the deterministic outputs.
struct RunLog {
    started: Instant,
    text: String,
}

impl RunLog {
    fn new() -> Self {
        let mut log = Self {
            started: Instant::now(),
            text: String::new(),
        };
        let epoch = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let _ = writeln!(log.text, "started at unix time {epoch}");
        log
    }

    fn stage(&mut self, what: &str) {
        let _ = writeln!(self.text, "[{:8.2}s] {what}", self.started.elapsed().as_secs_f64());
    }
}

fn stage<T>(log: &mut RunLog, name: &str, kind: Option<RepresentationKind>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let label = match kind {
        Some(k) => format!("{name} ({k})"),
        None => name.to_string(),
    };
    log.stage(&format!("{label}: start"));
    let out = f().with_context(|| format!("stage '{label}' failed"));
    log.stage(&format!("{label}: {}", if out.is_ok() { "done" } else { "failed" }));
    out
}

/// Runs the experiment and writes all artifacts under `out`. Outputs written
/// before a failing stage are kept.
pub fn cmd_experiment(manifest: &Path, out: &Path, cfg: &RunConfig) -> Result<ExperimentReport> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    cfg.write_to(out)?;
    let mut log = RunLog::new();
    let result = run(manifest, out, cfg, &mut log);
    if let Err(e) = &result {
        log.stage(&format!("error: {e:#}"));
    }
    io::write_bytes(&out.join(RUN_LOG), log.text.as_bytes())?;
    result
}

fn run(manifest: &Path, out: &Path, cfg: &RunConfig, log: &mut RunLog) -> Result<ExperimentReport> {
    let m = stage(log, "load manifest", None, || DatasetManifest::load(manifest))?;
    m.require_splits(&[Split::Train, Split::Test])?;
    let (pieces, missing) = stage(log, "read midi", None, || Ok(load_pieces(&m, &Split::ALL)))?;
    let kinds = RepresentationKind::ALL;
    let corpus = stage(log, "corpus stats", None, || {
        corpus_stats_report(&m, &pieces, missing, &kinds)
    })?;
    io::write_json(&out.join("corpus_stats.json"), &corpus)?;

    let by_split = |s: Split| -> Vec<&LoadedPiece> { pieces.iter().filter(|p| p.entry.split == s).collect() };
    let (train, test) = (by_split(Split::Train), by_split(Split::Test));

    let mut notations = Vec::new();
    let mut generated: Vec<Vec<MetricReport>> = Vec::new();
    let mut real: Vec<Vec<MetricReport>> = Vec::new();
    for kind in kinds {
        let dir = out.join(kind.name());
        let (model, tokens) = stage(log, "train", Some(kind), || train_on(&train, kind, cfg))?;
        io::write_bytes(&dir.join(MODEL_FILE), &model.to_bytes())?;
        let (summary, seqs) = stage(log, "generate", Some(kind), || {
            generate_into(&model, &test, Vec::new(), &dir, cfg)
        })?;
        let gen_reports = stage(log, "metrics generated", Some(kind), || Ok(evaluate_sequences(&seqs, cfg)))?;
        write_reports(&dir, "metrics_generated", &as_report(&gen_reports))?;
        let real_reports = stage(log, "metrics real", Some(kind), || {
            Ok(evaluate_sequences(&encode_pieces(&test, kind), cfg))
        })?;
        write_reports(&dir, "metrics_real", &as_report(&real_reports))?;
        notations.push(NotationSummary {
            kind,
            train_files: train.len(),
            train_tokens: tokens,
            model_contexts: model.context_count(),
            generated: summary.pieces.len(),
            skipped_primers: summary.skipped,
        });
        generated.push(gen_reports);
        real.push(real_reports);
    }

    let boot = cfg.bootstrap_config();
    let (a, b) = (kinds[0].name(), kinds[1].name());
    let gen_table = stage(log, "bootstrap generated", None, || {
        Ok(compare_sets(a, &generated[0], b, &generated[1], &boot)?)
    })?;
    let real_boot = BootstrapConfig {
        seed: derive_seed(boot.seed, &[1]),
        ..boot
    };
    let real_table = stage(log, "bootstrap real", None, || {
        Ok(compare_sets(a, &real[0], b, &real[1], &real_boot)?)
    })?;

    let report = ExperimentReport {
        dataset: m.manifest.name.clone(),
        corpus,
        notations,
        generated: gen_table,
        real: real_table,
    };
    io::write_json(&out.join(REPORT_JSON), &report)?;
    io::write_csv(
        &out.join("comparison_generated.csv"),
        &report.generated.csv_header(),
        &report.generated.csv_records(),
    )?;
    io::write_csv(&out.join("comparison_real.csv"), &report.real.csv_header(), &report.real.csv_records())?;
    io::write_bytes(&out.join(TABLES_TXT), tables::experiment(&report).as_bytes())?;
    log.stage("report written");
    Ok(report)
}

fn as_report(reports: &[MetricReport]) -> EvaluationReport {
    EvaluationReport {
        reports: reports.to_vec(),
        errors: Vec::new(),
    }
}
