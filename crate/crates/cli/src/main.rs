//! `argmine`: corpus toolkit and classification pipeline for
//! paragraph-level legal-argument annotations.
//!
//! Exit codes: 0 success, 1 validation/schema failure, 2 backend or
//! protocol failure, 3 usage error.

mod commands;
mod error;
mod output;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `key: value` lines for humans.
    Record,
    /// Comma-separated with a header row.
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "argmine", version, about = "Legal-argument corpus toolkit and classifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a corpus file against the schema and invariants.
    Validate {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Print aggregate corpus statistics.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum, default_value = "record")]
        format: Format,
    },
    /// Stratified train/validation/test split over (label, court) strata.
    Split {
        #[arg(long)]
        corpus: PathBuf,
        /// Train, validation and test fractions; must sum to 1.
        #[arg(long, num_args = 3, value_names = ["TRAIN", "VAL", "TEST"])]
        ratios: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV (doc_id,split).
        #[arg(long)]
        out: PathBuf,
    },
    /// Inter-annotator agreement between two annotations of one corpus.
    Iaa {
        #[arg(long)]
        corpus_a: PathBuf,
        #[arg(long)]
        corpus_b: PathBuf,
        #[arg(long, value_enum, default_value = "record")]
        format: Format,
    },
    /// Fit a reference predictor on a training corpus and score it.
    Baseline {
        #[arg(long, value_enum)]
        kind: commands::baseline::Kind,
        /// 1 = paragraph argument presence, 2 = paragraph argument
        /// types, 3 = holistic document label.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        task: u8,
        #[arg(long)]
        train: PathBuf,
        /// Gold corpus to evaluate on.
        #[arg(long)]
        eval: PathBuf,
        /// Trigger lexicon TSV (required for --kind trigger).
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "uniform")]
        mode: commands::baseline::Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "record")]
        format: Format,
    },
    /// Score predicted annotations against gold annotations.
    Eval {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        task: u8,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long, value_enum, default_value = "record")]
        format: Format,
    },
    /// Train the feature-based holistic classifier.
    TrainMlp {
        #[arg(long)]
        corpus: PathBuf,
        /// Split assignment CSV from `argmine split`.
        #[arg(long)]
        split: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "bce")]
        loss: commands::mlp::LossArg,
        #[arg(long, value_enum, default_value = "loss")]
        monitor: commands::mlp::MonitorArg,
        #[arg(long, default_value_t = 200)]
        max_epochs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict holistic labels with a trained model.
    PredictMlp {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact Shapley attribution of one document's prediction.
    Explain {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// Document to explain.
        #[arg(long)]
        doc: String,
        /// Corpus whose mean feature vector serves as the reference
        /// point; defaults to --corpus.
        #[arg(long)]
        reference_corpus: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "record")]
        format: Format,
    },
    /// Run the three-stage pipeline.
    Pipeline {
        #[command(subcommand)]
        command: PipelineCommand,
    },
    /// Regenerate distribution/trend reports as plot-ready CSV.
    Report {
        #[arg(long)]
        corpus: PathBuf,
        /// First year of the date filter (inclusive).
        #[arg(long)]
        from: Option<i32>,
        /// Last year of the date filter (inclusive).
        #[arg(long)]
        to: Option<i32>,
        #[arg(long, default_value_t = 1)]
        bucket_years: u32,
        /// Output directory for distribution.csv, holistic.csv,
        /// trends.csv, trends_rolling3.csv, shares.csv.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum PipelineCommand {
    /// Run all three stages over a corpus file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Input corpus (gold labels, if any, are ignored).
        #[arg(long = "in")]
        input: PathBuf,
        /// Output results file, one JSON record per document.
        #[arg(long = "out")]
        output: PathBuf,
        /// Disable stage-1 filtering for this run.
        #[arg(long)]
        no_filter: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let result = match cli.command {
        Command::Validate { corpus } => commands::corpus::validate(&corpus),
        Command::Stats { corpus, format } => commands::corpus::stats(&corpus, format),
        Command::Split {
            corpus,
            ratios,
            seed,
            out,
        } => commands::corpus::split(&corpus, &ratios, seed, &out),
        Command::Iaa {
            corpus_a,
            corpus_b,
            format,
        } => commands::agreement::iaa(&corpus_a, &corpus_b, format),
        Command::Baseline {
            kind,
            task,
            train,
            eval,
            lexicon,
            mode,
            seed,
            format,
        } => commands::baseline::run(kind, task, &train, &eval, lexicon.as_deref(), mode, seed, format),
        Command::Eval {
            task,
            gold,
            pred,
            format,
        } => commands::eval::run(task, &gold, &pred, format),
        Command::TrainMlp {
            corpus,
            split,
            seed,
            loss,
            monitor,
            max_epochs,
            out,
        } => commands::mlp::train(&corpus, &split, seed, loss, monitor, max_epochs, &out),
        Command::PredictMlp { model, corpus, out } => {
            commands::mlp::predict(&model, &corpus, out.as_deref())
        }
        Command::Explain {
            model,
            corpus,
            doc,
            reference_corpus,
            format,
        } => commands::mlp::explain(&model, &corpus, &doc, reference_corpus.as_deref(), format),
        Command::Pipeline {
            command: PipelineCommand::Run {
                config,
                input,
                output,
                no_filter,
            },
        } => commands::pipeline::run(&config, &input, &output, no_filter),
        Command::Report {
            corpus,
            from,
            to,
            bucket_years,
            out,
        } => commands::report::run(&corpus, from, to, bucket_years, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
