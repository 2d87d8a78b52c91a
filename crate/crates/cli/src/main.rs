use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use structok_cli::commands::{self, PlotFormat, TokenFormat};
use structok_cli::corpus::DEFAULT_CORPUS_SEED;
use structok_cli::{experiment, survey, tables, RunConfig};
use structok_core::tokenizer::RepresentationKind;

#[derive(Parser)]
#[command(name = "structok", version, about = "Compare MIDI token notations by the structure of generated music")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Master seed for every random stream
    #[arg(long, global = true, env = "STRUCTOK_SEED")]
    seed: Option<u64>,
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Chroma frame rate in frames per second
    #[arg(long, global = true)]
    frame_rate: Option<f64>,
    /// Number of windows for pitch class consistency
    #[arg(long, global = true)]
    windows: Option<usize>,
    /// Bootstrap resamples
    #[arg(long, global = true)]
    bootstrap_n: Option<usize>,
    /// Confidence level of bootstrap intervals
    #[arg(long, global = true)]
    level: Option<f64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Args)]
struct HarnessArgs {
    /// Primer files drawn from the test split
    #[arg(long)]
    primers: Option<usize>,
    /// Continuations per primer
    #[arg(long)]
    continuations: Option<usize>,
    #[arg(long)]
    primer_len: Option<usize>,
    #[arg(long)]
    total_len: Option<usize>,
    #[arg(long)]
    temperature: Option<f64>,
    /// Markov order
    #[arg(long)]
    order: Option<usize>,
    /// Additive smoothing of the Markov model
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a MIDI or token file
    Inspect {
        file: PathBuf,
        #[arg(long)]
        kind: Option<RepresentationKind>,
    },
    /// Convert MIDI files (or directories of them) to token files
    Tokenize {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        kind: RepresentationKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "binary")]
        format: FormatArg,
    },
    /// Decode token files back to MIDI
    Detokenize {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Notation of text token files
        #[arg(long)]
        kind: Option<RepresentationKind>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Corpus statistics of a manifest
    Stats {
        manifest: PathBuf,
        #[arg(long)]
        kind: Option<RepresentationKind>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a Markov model on a manifest's train split
    Train {
        manifest: PathBuf,
        #[arg(long)]
        kind: RepresentationKind,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        harness: HarnessArgs,
    },
    /// Continue primers from a manifest's test split
    Generate {
        model: PathBuf,
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        harness: HarnessArgs,
    },
    /// Compute all metrics for MIDI or token files
    Evaluate {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        kind: Option<RepresentationKind>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bootstrap comparison of two metrics.json files
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "onoff")]
        label_a: String,
        #[arg(long, default_value = "explicit")]
        label_b: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mann-Whitney analysis of a listening-study CSV
    Survey {
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export the fitness scape plot of a MIDI file
    Scapeplot {
        midi: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Run the full notation comparison on a manifest
    Experiment {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        harness: HarnessArgs,
    },
    /// Write the synthetic mini-corpus and its manifest
    MakeCorpus {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Binary,
    Text,
    Csv,
    Pgm,
}

impl FormatArg {
    fn token(self) -> Result<TokenFormat> {
        match self {
            FormatArg::Binary => Ok(TokenFormat::Binary),
            FormatArg::Text => Ok(TokenFormat::Text),
            _ => anyhow::bail!("token files are written as binary or text"),
        }
    }

    fn plot(self) -> Result<PlotFormat> {
        match self {
            FormatArg::Csv => Ok(PlotFormat::Csv),
            FormatArg::Pgm => Ok(PlotFormat::Pgm),
            _ => anyhow::bail!("scape plots are written as csv or pgm"),
        }
    }
}

fn run_config(g: &GlobalArgs, h: Option<&HarnessArgs>) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(v) = g.frame_rate {
        cfg.metrics.frame_rate = v;
    }
    if let Some(v) = g.windows {
        cfg.metrics.windows = v;
    }
    if let Some(v) = g.bootstrap_n {
        cfg.bootstrap.resamples = v;
    }
    if let Some(v) = g.level {
        cfg.bootstrap.level = v;
    }
    if let Some(h) = h {
        let hc = &mut cfg.harness;
        hc.primers_per_dataset = h.primers.unwrap_or(hc.primers_per_dataset);
        hc.continuations_per_primer = h.continuations.unwrap_or(hc.continuations_per_primer);
        hc.primer_len = h.primer_len.unwrap_or(hc.primer_len);
        hc.total_len = h.total_len.unwrap_or(hc.total_len);
        hc.sampling.temperature = h.temperature.unwrap_or(hc.sampling.temperature);
        cfg.markov.order = h.order.unwrap_or(cfg.markov.order);
        cfg.markov.alpha = h.alpha.unwrap_or(cfg.markov.alpha);
    }
    Ok(cfg)
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn report_failures<'a>(errors: impl Iterator<Item = (&'a str, &'a str)>) {
    for (path, err) in errors {
        eprintln!("warning: {path}: {err}");
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.global.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Inspect { file, kind } => print_json(&commands::cmd_inspect(file, *kind)?),
        Command::Tokenize {
            inputs,
            kind,
            out,
            format,
        } => {
            let s = commands::cmd_tokenize(inputs, *kind, format.token()?, out, &run_config(g, None)?)?;
            report_failures(s.files.iter().filter_map(|f| f.error.as_deref().map(|e| (f.input.as_str(), e))));
            println!("tokenized {} of {} files into {}", s.ok, s.ok + s.failed, out.display());
            Ok(())
        }
        Command::Detokenize { inputs, kind, out } => {
            let entries = commands::cmd_detokenize(inputs, *kind, out, &run_config(g, None)?)?;
            report_failures(entries.iter().filter_map(|f| f.error.as_deref().map(|e| (f.input.as_str(), e))));
            println!("decoded {} files into {}", entries.len(), out.display());
            Ok(())
        }
        Command::Stats { manifest, kind, out } => {
            let r = commands::cmd_stats(manifest, *kind, out.as_deref(), &run_config(g, None)?)?;
            print!("{}", tables::table1(&r));
            Ok(())
        }
        Command::Train {
            manifest,
            kind,
            out,
            harness,
        } => {
            let s = commands::cmd_train(manifest, *kind, out, &run_config(g, Some(harness))?)?;
            print_json(&s)
        }
        Command::Generate {
            model,
            manifest,
            out,
            harness,
        } => {
            let s = commands::cmd_generate(model, manifest, out, &run_config(g, Some(harness))?)?;
            println!("generated {} pieces into {}", s.pieces.len(), out.display());
            Ok(())
        }
        Command::Evaluate { inputs, kind, out } => {
            let r = commands::cmd_evaluate(inputs, *kind, out, &run_config(g, None)?)?;
            report_failures(r.errors.iter().map(|e| (e.path.as_str(), e.error.as_str())));
            println!("evaluated {} files into {}", r.reports.len(), out.display());
            Ok(())
        }
        Command::Compare {
            a,
            b,
            label_a,
            label_b,
            out,
        } => {
            let t = commands::cmd_compare(a, label_a, b, label_b, out, &run_config(g, None)?)?;
            print!("{}", tables::comparison(&t));
            Ok(())
        }
        Command::Survey { csv, out } => {
            let r = survey::cmd_survey(csv, out, &run_config(g, None)?)?;
            print!("{}", tables::table5(&r));
            Ok(())
        }
        Command::Scapeplot { midi, out, format } => {
            let path = commands::cmd_scapeplot(midi, format.plot()?, out, &run_config(g, None)?)?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Experiment { manifest, out, harness } => {
            let r = experiment::cmd_experiment(manifest, out, &run_config(g, Some(harness))?)?;
            report_failures(r.corpus.missing.iter().map(|m| (m.path.as_str(), m.error.as_str())));
            print!("{}", tables::experiment(&r));
            Ok(())
        }
        Command::MakeCorpus { out } => {
            let m = commands::cmd_make_corpus(out, g.seed.unwrap_or(DEFAULT_CORPUS_SEED))?;
            println!("wrote {} files and manifest.json to {}", m.files.len(), out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
