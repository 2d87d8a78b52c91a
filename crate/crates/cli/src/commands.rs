//! The file-level commands: inspect, tokenize, detokenize, stats, train,
//! generate, evaluate, compare, scapeplot and make-corpus.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use structok_core::generate::{run_harness, train_markov, GeneratorModel, MarkovModel};
use structok_core::metrics::{chromagram, evaluate, fitness_scape_plot, compute_ssm, enhance_ssm, MetricReport};
use structok_core::smf::{notes_to_document, parse_smf, write_smf, extract_notes, ExtractWarnings, NoteList};
use structok_core::stats::compare_sets;
use structok_core::tokenizer::{
    corpus_stats, decode, encode, to_binary, to_text, DecodeAnomalies, RepresentationKind, TokenSequence,
};

use crate::config::RunConfig;
use crate::corpus::{write_corpus, CorpusLayout};
use crate::io::{self, Input};
use crate::manifest::{DatasetManifest, LoadedManifest, ManifestEntry, Split};
use crate::{tables, CliError, FileError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenFormat {
    #[default]
    Binary,
    Text,
}

impl TokenFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TokenFormat::Binary => "tok",
            TokenFormat::Text => "txt",
        }
    }

    pub fn render(self, seq: &TokenSequence) -> Vec<u8> {
        match self {
            TokenFormat::Binary => to_binary(seq),
            TokenFormat::Text => to_text(seq).into_bytes(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

fn unique_count(ids: &[u16]) -> usize {
    ids.iter().collect::<HashSet<_>>().len()
}

// ---------------------------------------------------------------- inspect

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackSummary {
    pub events: usize,
    pub end_tick: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Inspection {
    Midi {
        path: String,
        format: u16,
        ticks_per_quarter: u16,
        tracks: Vec<TrackSummary>,
        notes: usize,
        duration_s: f64,
        lowest_pitch: Option<u8>,
        highest_pitch: Option<u8>,
        warnings: ExtractWarnings,
    },
    Tokens {
        path: String,
        kind: RepresentationKind,
        length: usize,
        unique: usize,
        notes: usize,
        duration_s: f64,
        anomalies: DecodeAnomalies,
    },
}

/// Summarizes a MIDI file or a token file (recognized by its magic; text
/// token files need `kind`).
pub fn cmd_inspect(path: &Path, kind: Option<RepresentationKind>) -> Result<Inspection> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let shown = path.display().to_string();
    if bytes.starts_with(b"MThd") {
        let doc = parse_smf(&bytes).with_context(|| format!("parsing {shown}"))?;
        let ex = extract_notes(&doc);
        return Ok(Inspection::Midi {
            path: shown,
            format: doc.format.code(),
            ticks_per_quarter: doc.ticks_per_quarter,
            tracks: doc
                .tracks
                .iter()
                .map(|t| TrackSummary {
                    events: t.events.len(),
                    end_tick: t.end_tick(),
                })
                .collect(),
            notes: ex.notes.len(),
            duration_s: ex.notes.total_duration_s,
            lowest_pitch: ex.notes.iter().map(|n| n.pitch).min(),
            highest_pitch: ex.notes.iter().map(|n| n.pitch).max(),
            warnings: ex.warnings,
        });
    }
    let seq = io::read_tokens(path, kind, &shown)?;
    let decoded = decode(&seq);
    Ok(Inspection::Tokens {
        path: shown,
        kind: seq.kind,
        length: seq.len(),
        unique: unique_count(&seq.ids),
        notes: decoded.notes.len(),
        duration_s: decoded.notes.total_duration_s,
        anomalies: decoded.anomalies,
    })
}

// --------------------------------------------------------------- tokenize

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenizeEntry {
    pub input: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub length: usize,
    pub unique: usize,
    /// Irregularities met while extracting notes from the MIDI file.
    pub anomalies: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenizeSummary {
    pub kind: RepresentationKind,
    pub format: TokenFormat,
    pub ok: usize,
    pub failed: usize,
    pub files: Vec<TokenizeEntry>,
}

pub const TOKENIZE_SUMMARY: &str = "tokenize_summary.json";

/// Tokenizes every MIDI input into `out`, one token file per input, plus a
/// summary. Fails only when no input could be tokenized.
pub fn cmd_tokenize(
    inputs: &[PathBuf],
    kind: RepresentationKind,
    format: TokenFormat,
    out: &Path,
    cfg: &RunConfig,
) -> Result<TokenizeSummary> {
    let found = io::discover_midi(inputs)?;
    if found.is_empty() {
        return Err(CliError::NoInputs.into());
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let stems = io::output_stems(&found);
    let files: Vec<TokenizeEntry> = found
        .par_iter()
        .zip(stems.par_iter())
        .map(|(input, stem)| {
            let shown = input.path.display().to_string();
            let result = io::load_midi(&input.path).and_then(|ex| {
                let seq = encode(&ex.notes, kind, input.name.as_str());
                let name = format!("{stem}.{}", format.extension());
                io::write_bytes(&out.join(&name), &format.render(&seq))?;
                Ok((name, seq, ex.warnings.total()))
            });
            match result {
                Ok((name, seq, anomalies)) => TokenizeEntry {
                    input: shown,
                    status: Status::Ok,
                    output: Some(name),
                    error: None,
                    length: seq.len(),
                    unique: unique_count(&seq.ids),
                    anomalies,
                },
                Err(e) => TokenizeEntry {
                    input: shown,
                    status: Status::Error,
                    output: None,
                    error: Some(format!("{e:#}")),
                    length: 0,
                    unique: 0,
                    anomalies: 0,
                },
            }
        })
        .collect();
    let ok = files.iter().filter(|f| f.status == Status::Ok).count();
    let summary = TokenizeSummary {
        kind,
        format,
        ok,
        failed: files.len() - ok,
        files,
    };
    io::write_json(&out.join(TOKENIZE_SUMMARY), &summary)?;
    cfg.write_to(out)?;
    if ok == 0 {
        return Err(CliError::AllInputsFailed(summary.failed).into());
    }
    Ok(summary)
}

// ------------------------------------------------------------- detokenize

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetokenizeEntry {
    pub input: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub notes: usize,
    pub anomalies: DecodeAnomalies,
}

pub const DETOKENIZE_SUMMARY: &str = "detokenize_summary.json";

fn is_token_file(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e == "tok" || e == "txt")
}

/// Decodes token files back to MIDI. Anomalies are counted, not fatal.
pub fn cmd_detokenize(
    inputs: &[PathBuf],
    kind: Option<RepresentationKind>,
    out: &Path,
    cfg: &RunConfig,
) -> Result<Vec<DetokenizeEntry>> {
    let found = io::discover(inputs, &is_token_file)?;
    if found.is_empty() {
        return Err(CliError::NoInputs.into());
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let stems = io::output_stems(&found);
    let entries: Vec<DetokenizeEntry> = found
        .par_iter()
        .zip(stems.par_iter())
        .map(|(input, stem)| {
            let shown = input.path.display().to_string();
            let result = io::read_tokens(&input.path, kind, &input.name).and_then(|seq| {
                let decoded = decode(&seq);
                let name = format!("{stem}.mid");
                io::write_bytes(&out.join(&name), &write_smf(&notes_to_document(&decoded.notes)))?;
                Ok((name, decoded))
            });
            match result {
                Ok((name, d)) => DetokenizeEntry {
                    input: shown,
                    status: Status::Ok,
                    output: Some(name),
                    error: None,
                    notes: d.notes.len(),
                    anomalies: d.anomalies,
                },
                Err(e) => DetokenizeEntry {
                    input: shown,
                    status: Status::Error,
                    output: None,
                    error: Some(format!("{e:#}")),
                    notes: 0,
                    anomalies: DecodeAnomalies::default(),
                },
            }
        })
        .collect();
    io::write_json(&out.join(DETOKENIZE_SUMMARY), &entries)?;
    cfg.write_to(out)?;
    if entries.iter().all(|e| e.status == Status::Error) {
        return Err(CliError::AllInputsFailed(entries.len()).into());
    }
    Ok(entries)
}

// ------------------------------------------------------------------ stats

/// A manifest file that parsed, with its notes.
#[derive(Debug, Clone)]
pub struct LoadedPiece {
    pub entry: ManifestEntry,
    pub notes: NoteList,
}

/// Loads the files of the given splits in manifest order. Unreadable files
/// are returned as errors and left out.
pub fn load_pieces(m: &LoadedManifest, splits: &[Split]) -> (Vec<LoadedPiece>, Vec<FileError>) {
    let entries: Vec<&ManifestEntry> =
        m.manifest.files.iter().filter(|f| splits.contains(&f.split)).collect();
    let results: Vec<Result<LoadedPiece, FileError>> = entries
        .par_iter()
        .map(|&entry| {
            io::load_midi(&m.resolve(entry))
                .map(|ex| LoadedPiece {
                    entry: entry.clone(),
                    notes: ex.notes,
                })
                .map_err(|e| FileError::new(entry.path.clone(), &e))
        })
        .collect();
    let mut pieces = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(p) => pieces.push(p),
            Err(e) => errors.push(e),
        }
    }
    (pieces, errors)
}

pub fn encode_pieces(pieces: &[&LoadedPiece], kind: RepresentationKind) -> Vec<TokenSequence> {
    pieces
        .par_iter()
        .map(|p| encode(&p.notes, kind, p.entry.path.as_str()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SplitCounts {
    pub total: usize,
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NotationStats {
    pub kind: RepresentationKind,
    pub mean_length: f64,
    pub mean_unique: f64,
    pub family_counts: std::collections::BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStatsReport {
    pub dataset: String,
    /// Files that were read successfully, per split.
    pub files: SplitCounts,
    pub notations: Vec<NotationStats>,
    pub missing: Vec<FileError>,
}

pub const STATS_JSON: &str = "stats.json";
pub const TABLE1_TXT: &str = "table1.txt";

pub fn corpus_stats_report(
    m: &LoadedManifest,
    pieces: &[LoadedPiece],
    missing: Vec<FileError>,
    kinds: &[RepresentationKind],
) -> Result<CorpusStatsReport> {
    if pieces.is_empty() {
        return Err(CliError::EmptyCorpus.into());
    }
    let count = |s: Split| pieces.iter().filter(|p| p.entry.split == s).count();
    let all: Vec<&LoadedPiece> = pieces.iter().collect();
    let notations = kinds
        .iter()
        .map(|&kind| {
            let st = corpus_stats(&encode_pieces(&all, kind))?;
            Ok(NotationStats {
                kind,
                mean_length: st.mean_length,
                mean_unique: st.mean_unique,
                family_counts: st.family_counts,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CorpusStatsReport {
        dataset: m.manifest.name.clone(),
        files: SplitCounts {
            total: pieces.len(),
            train: count(Split::Train),
            validation: count(Split::Validation),
            test: count(Split::Test),
        },
        notations,
        missing,
    })
}

/// Table-1 statistics for a manifest; with `out`, writes JSON and text there.
pub fn cmd_stats(
    manifest: &Path,
    kind: Option<RepresentationKind>,
    out: Option<&Path>,
    cfg: &RunConfig,
) -> Result<CorpusStatsReport> {
    let m = DatasetManifest::load(manifest)?;
    let kinds = kind.map_or_else(|| m.manifest.kinds(), |k| vec![k]);
    let (pieces, missing) = load_pieces(&m, &Split::ALL);
    let report = corpus_stats_report(&m, &pieces, missing, &kinds)?;
    if let Some(out) = out {
        io::write_json(&out.join(STATS_JSON), &report)?;
        io::write_bytes(&out.join(TABLE1_TXT), tables::table1(&report).as_bytes())?;
        cfg.write_to(out)?;
    }
    Ok(report)
}

// ------------------------------------------------------------------ train

pub const MODEL_FILE: &str = "model.smkv";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainSummary {
    pub kind: RepresentationKind,
    pub order: usize,
    pub alpha: f64,
    pub files: usize,
    pub tokens: usize,
    pub contexts: usize,
    pub missing: Vec<FileError>,
}

pub fn train_on(
    pieces: &[&LoadedPiece],
    kind: RepresentationKind,
    cfg: &RunConfig,
) -> Result<(MarkovModel, usize)> {
    let corpus = encode_pieces(pieces, kind);
    let tokens = corpus.iter().map(TokenSequence::len).sum();
    let model = train_markov(&corpus, cfg.markov.order, cfg.markov.alpha)?;
    Ok((model, tokens))
}

/// Trains a Markov model on the manifest's train split.
pub fn cmd_train(manifest: &Path, kind: RepresentationKind, out: &Path, cfg: &RunConfig) -> Result<TrainSummary> {
    let m = DatasetManifest::load(manifest)?;
    m.require_splits(&[Split::Train])?;
    let (pieces, missing) = load_pieces(&m, &[Split::Train]);
    let refs: Vec<&LoadedPiece> = pieces.iter().collect();
    let (model, tokens) = train_on(&refs, kind, cfg)?;
    io::write_bytes(&out.join(MODEL_FILE), &model.to_bytes())?;
    let summary = TrainSummary {
        kind,
        order: model.order(),
        alpha: model.alpha(),
        files: pieces.len(),
        tokens,
        contexts: model.context_count(),
        missing,
    };
    io::write_json(&out.join("train_summary.json"), &summary)?;
    cfg.write_to(out)?;
    Ok(summary)
}

// --------------------------------------------------------------- generate

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratedEntry {
    pub file: String,
    pub primer_source: String,
    pub primer_index: usize,
    pub continuation: usize,
    pub seed: u64,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationSummary {
    pub kind: RepresentationKind,
    pub pieces: Vec<GeneratedEntry>,
    /// Test files too short to serve as primers.
    pub skipped: Vec<String>,
    pub missing: Vec<FileError>,
}

pub const GENERATED_DIR: &str = "generated";

/// Runs the harness on the test split and writes token files, MIDI renders
/// and a summary under `out`. Returns the summary and the sequences.
pub fn generate_into(
    model: &MarkovModel,
    test: &[&LoadedPiece],
    missing: Vec<FileError>,
    out: &Path,
    cfg: &RunConfig,
) -> Result<(GenerationSummary, Vec<TokenSequence>)> {
    let kind = model.kind();
    let corpus = encode_pieces(test, kind);
    let output = run_harness(model, &corpus, &cfg.harness_for(kind.code()))?;
    let dir = out.join(GENERATED_DIR);
    let mut entries = Vec::with_capacity(output.pieces.len());
    for g in &output.pieces {
        let stem = format!("gen_{:02}_{}", g.primer_index, g.continuation);
        io::write_bytes(&dir.join(format!("{stem}.tok")), &to_binary(&g.sequence))?;
        let notes = decode(&g.sequence).notes;
        io::write_bytes(&dir.join(format!("{stem}.mid")), &write_smf(&notes_to_document(&notes)))?;
        entries.push(GeneratedEntry {
            file: format!("{GENERATED_DIR}/{stem}.tok"),
            primer_source: g.primer_source.clone(),
            primer_index: g.primer_index,
            continuation: g.continuation,
            seed: g.seed,
            length: g.sequence.len(),
        });
    }
    let summary = GenerationSummary {
        kind,
        pieces: entries,
        skipped: output.skipped,
        missing,
    };
    io::write_json(&out.join("generation.json"), &summary)?;
    let seqs = output.pieces.into_iter().map(|g| g.sequence).collect();
    Ok((summary, seqs))
}

/// Continues primers drawn from the manifest's test split with a trained
/// model.
pub fn cmd_generate(model_path: &Path, manifest: &Path, out: &Path, cfg: &RunConfig) -> Result<GenerationSummary> {
    let bytes = fs::read(model_path).with_context(|| format!("reading {}", model_path.display()))?;
    let model = MarkovModel::from_bytes(&bytes).with_context(|| format!("loading {}", model_path.display()))?;
    let m = DatasetManifest::load(manifest)?;
    m.require_splits(&[Split::Test])?;
    let (pieces, missing) = load_pieces(&m, &[Split::Test]);
    let refs: Vec<&LoadedPiece> = pieces.iter().collect();
    let (summary, _) = generate_into(&model, &refs, missing, out, cfg)?;
    cfg.write_to(out)?;
    Ok(summary)
}

// --------------------------------------------------------------- evaluate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub reports: Vec<MetricReport>,
    #[serde(default)]
    pub errors: Vec<EvalError>,
}

/// Like [`FileError`], but readable back by `compare`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalError {
    pub path: String,
    pub error: String,
}

pub const METRICS_JSON: &str = "metrics.json";
pub const METRICS_CSV: &str = "metrics.csv";

/// Metric reports for token sequences, decoded leniently.
pub fn evaluate_sequences(seqs: &[TokenSequence], cfg: &RunConfig) -> Vec<MetricReport> {
    seqs.par_iter()
        .map(|seq| {
            let d = decode(seq);
            let mut r = evaluate(&seq.source, &d.notes, &cfg.metrics);
            r.flags.decode_anomalies = d.anomalies.total();
            r
        })
        .collect()
}

pub fn write_reports(out: &Path, stem: &str, report: &EvaluationReport) -> Result<()> {
    io::write_json(&out.join(format!("{stem}.json")), report)?;
    let rows: Vec<Vec<String>> = report.reports.iter().map(MetricReport::csv_record).collect();
    io::write_csv(&out.join(format!("{stem}.csv")), &MetricReport::csv_header(), &rows)
}

fn is_evaluable(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| ["mid", "midi", "tok", "txt"].contains(&e.to_ascii_lowercase().as_str()))
}

fn evaluate_input(input: &Input, kind: Option<RepresentationKind>, cfg: &RunConfig) -> Result<MetricReport> {
    let bytes = fs::read(&input.path).with_context(|| format!("reading {}", input.path.display()))?;
    if bytes.starts_with(b"MThd") {
        let doc = parse_smf(&bytes).with_context(|| format!("parsing {}", input.path.display()))?;
        return Ok(evaluate(&input.name, &extract_notes(&doc).notes, &cfg.metrics));
    }
    let seq = io::read_tokens(&input.path, kind, &input.name)?;
    Ok(evaluate_sequences(std::slice::from_ref(&seq), cfg).remove(0))
}

/// Computes all metrics for MIDI and token files.
pub fn cmd_evaluate(
    inputs: &[PathBuf],
    kind: Option<RepresentationKind>,
    out: &Path,
    cfg: &RunConfig,
) -> Result<EvaluationReport> {
    let found = io::discover(inputs, &is_evaluable)?;
    if found.is_empty() {
        return Err(CliError::NoInputs.into());
    }
    let results: Vec<Result<MetricReport>> = found.par_iter().map(|i| evaluate_input(i, kind, cfg)).collect();
    let mut report = EvaluationReport {
        reports: Vec::new(),
        errors: Vec::new(),
    };
    for (input, r) in found.iter().zip(results) {
        match r {
            Ok(m) => report.reports.push(m),
            Err(e) => report.errors.push(EvalError {
                path: input.path.display().to_string(),
                error: format!("{e:#}"),
            }),
        }
    }
    write_reports(out, "metrics", &report)?;
    cfg.write_to(out)?;
    if report.reports.is_empty() {
        return Err(CliError::AllInputsFailed(found.len()).into());
    }
    Ok(report)
}

// ---------------------------------------------------------------- compare

pub const COMPARISON_JSON: &str = "comparison.json";

/// Bootstrap comparison of two `metrics.json` files.
pub fn cmd_compare(
    a: &Path,
    label_a: &str,
    b: &Path,
    label_b: &str,
    out: &Path,
    cfg: &RunConfig,
) -> Result<structok_core::stats::ComparisonTable> {
    let load = |p: &Path| -> Result<EvaluationReport> {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
    };
    let (ra, rb) = (load(a)?, load(b)?);
    let table = compare_sets(label_a, &ra.reports, label_b, &rb.reports, &cfg.bootstrap_config())?;
    io::write_json(&out.join(COMPARISON_JSON), &table)?;
    io::write_csv(&out.join("comparison.csv"), &table.csv_header(), &table.csv_records())?;
    io::write_bytes(&out.join("comparison.txt"), tables::comparison(&table).as_bytes())?;
    cfg.write_to(out)?;
    Ok(table)
}

// -------------------------------------------------------------- scapeplot

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotFormat {
    #[default]
    Csv,
    Pgm,
}

/// Writes the fitness scape plot of one MIDI file as `<stem>.scape.<fmt>`
/// and returns the written path.
pub fn cmd_scapeplot(midi: &Path, format: PlotFormat, out: &Path, cfg: &RunConfig) -> Result<PathBuf> {
    let notes = io::load_midi(midi)?.notes;
    let chroma = chromagram(&notes, cfg.metrics.frame_rate).downsample(cfg.metrics.downsample_factor());
    if chroma.len() < 2 {
        return Err(CliError::TooShort { frames: chroma.len() }.into());
    }
    let ssm = enhance_ssm(&compute_ssm(&chroma), &cfg.metrics.enhance);
    let plot = fitness_scape_plot(&ssm, cfg.metrics.max_axis);
    let stem = midi.file_stem().map_or("plot".into(), |s| s.to_string_lossy().into_owned());
    let (ext, body) = match format {
        PlotFormat::Csv => ("csv", plot.to_csv()),
        PlotFormat::Pgm => ("pgm", plot.to_pgm()),
    };
    let path = out.join(format!("{stem}.scape.{ext}"));
    io::write_bytes(&path, body.as_bytes())?;
    cfg.write_to(out)?;
    Ok(path)
}

// ------------------------------------------------------------ make-corpus

pub fn cmd_make_corpus(out: &Path, seed: u64) -> Result<DatasetManifest> {
    write_corpus(out, CorpusLayout::default(), seed)
}
