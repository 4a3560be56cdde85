//! `hca`: classify short social-media posts into descriptive categories.
//!
//! `hca run` executes the whole pipeline from a TOML config; the other
//! subcommands expose each stage over its file artifacts, and chaining them
//! reproduces `run` byte for byte.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hca_core::error::Error;
use hca_core::ingest::DataFormat;
use hca_core::pipeline::{
    self, hca_run, load_graph, load_normalize_config, load_specs, ArtifactPaths, ClassifierKind,
    RunConfig, TrainParams,
};

#[derive(Parser)]
#[command(name = "hca", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write every stage artifact plus a report
    Run(RunArgs),
    /// Read a dataset, apply the hashtag filter, write records.jsonl
    Ingest(IngestArgs),
    /// Normalize records into token lists (docs.jsonl)
    Normalize(NormalizeArgs),
    /// Expand category seeds over the synonym graph into corpus.tsv
    BuildCorpus(BuildCorpusArgs),
    /// Label documents by corpus hit counts (labels.jsonl)
    WeakLabel(WeakLabelArgs),
    /// Fit the vocabulary and train a classifier on weak labels
    Train(TrainArgs),
    /// Classify documents with a trained model (classified.jsonl)
    Classify(ClassifyArgs),
    /// Score classifications against gold labels
    Eval(EvalArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; flags below override its fields
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    format: Option<DataFormat>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    classifier: Option<ClassifierKind>,
    /// Comma-separated hashtag filter (empty keeps all records)
    #[arg(long, value_delimiter = ',')]
    hashtags: Option<Vec<String>>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    min_count: Option<usize>,
    #[arg(long)]
    intersect_dataset_vocab: bool,
    #[arg(long)]
    smoothing: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    test_fraction: Option<f64>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    slang: Option<PathBuf>,
    #[arg(long)]
    reference_vocab: Option<PathBuf>,
    #[arg(long)]
    emoticons: Option<PathBuf>,
    #[arg(long)]
    categories: Option<PathBuf>,
    #[arg(long)]
    synonym_graph: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "jsonl")]
    format: DataFormat,
    /// Comma-separated hashtag filter (empty keeps all records)
    #[arg(long, value_delimiter = ',')]
    hashtags: Vec<String>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct NormalizeArgs {
    /// records.jsonl from the ingest stage
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    slang: Option<PathBuf>,
    #[arg(long)]
    reference_vocab: Option<PathBuf>,
    #[arg(long)]
    emoticons: Option<PathBuf>,
}

#[derive(Args)]
struct BuildCorpusArgs {
    #[arg(long)]
    categories: Option<PathBuf>,
    #[arg(long)]
    synonym_graph: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    max_depth: usize,
    /// docs.jsonl whose vocabulary the corpus is intersected with
    #[arg(long)]
    intersect_docs: Option<PathBuf>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    conflicts_output: PathBuf,
}

#[derive(Args)]
struct WeakLabelArgs {
    /// docs.jsonl from the normalize stage
    #[arg(long)]
    docs: PathBuf,
    /// corpus.tsv from the build-corpus stage
    #[arg(long)]
    corpus: PathBuf,
    /// category spec file fixing the tie-break order
    #[arg(long)]
    categories: Option<PathBuf>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// docs.jsonl from the normalize stage
    #[arg(long)]
    docs: PathBuf,
    /// labels.jsonl from the weak-label stage
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    classifier: ClassifierKind,
    #[arg(long, default_value_t = 1)]
    min_count: usize,
    #[arg(long, default_value_t = 1.0)]
    smoothing: f64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 1e-3)]
    l2: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long)]
    vocab_output: PathBuf,
    #[arg(long)]
    model_output: PathBuf,
    #[arg(long)]
    categories_output: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    docs: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// categories.txt from the train stage
    #[arg(long)]
    categories: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// classified.jsonl from the classify stage
    #[arg(long)]
    classified: PathBuf,
    /// records.jsonl carrying gold labels
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

fn hashtag_set(tags: &[String]) -> BTreeSet<String> {
    tags.iter()
        .filter(|t| !t.is_empty())
        .map(|t| t.trim_start_matches('#').to_lowercase())
        .collect()
}

fn build_run_config(args: RunArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            toml::from_str::<RunConfig>(&content)
                .map_err(|e| Error::validation(format!("{}: {e}", path.display())))?
        }
        None => {
            let dataset = args
                .dataset
                .clone()
                .ok_or_else(|| Error::validation("--dataset is required without --config"))?;
            let output_dir = args
                .output_dir
                .clone()
                .ok_or_else(|| Error::validation("--output-dir is required without --config"))?;
            RunConfig::new(dataset, output_dir)
        }
    };
    if let Some(v) = args.dataset {
        cfg.dataset = v;
    }
    if let Some(v) = args.format {
        cfg.format = v;
    }
    if let Some(v) = args.output_dir {
        cfg.output_dir = v;
    }
    if let Some(v) = args.classifier {
        cfg.classifier = v;
    }
    if let Some(v) = args.hashtags {
        cfg.hashtags = hashtag_set(&v);
    }
    if let Some(v) = args.max_depth {
        cfg.max_depth = v;
    }
    if let Some(v) = args.min_count {
        cfg.min_count = v;
    }
    if args.intersect_dataset_vocab {
        cfg.intersect_dataset_vocab = true;
    }
    if let Some(v) = args.smoothing {
        cfg.smoothing = v;
    }
    if let Some(v) = args.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = args.learning_rate {
        cfg.learning_rate = v;
    }
    if let Some(v) = args.l2 {
        cfg.l2 = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.tolerance {
        cfg.tolerance = v;
    }
    if let Some(v) = args.test_fraction {
        cfg.test_fraction = v;
    }
    if let Some(v) = args.stopwords {
        cfg.stopwords = Some(v);
    }
    if let Some(v) = args.slang {
        cfg.slang = Some(v);
    }
    if let Some(v) = args.reference_vocab {
        cfg.reference_vocab = Some(v);
    }
    if let Some(v) = args.emoticons {
        cfg.emoticons = Some(v);
    }
    if let Some(v) = args.categories {
        cfg.categories = Some(v);
    }
    if let Some(v) = args.synonym_graph {
        cfg.synonym_graph = Some(v);
    }
    Ok(cfg)
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Run(args) => {
            let cfg = build_run_config(args)?;
            let report = hca_run(&cfg)?;
            print!("{}", report.render_text());
            let paths = ArtifactPaths::new(&cfg.output_dir);
            eprintln!("artifacts written to {}", cfg.output_dir.display());
            eprintln!("classified output: {}", paths.classified.display());
        }
        Command::Ingest(args) => {
            let summary = pipeline::stage_ingest(
                &args.input,
                args.format,
                &hashtag_set(&args.hashtags),
                &args.output,
            )?;
            eprintln!(
                "ingested {} records, kept {} after filtering",
                summary.ingested, summary.kept
            );
        }
        Command::Normalize(args) => {
            let cfg = load_normalize_config(
                args.stopwords.as_deref(),
                args.slang.as_deref(),
                args.reference_vocab.as_deref(),
                args.emoticons.as_deref(),
            )?;
            let count = pipeline::stage_normalize(&args.input, &cfg, &args.output)?;
            eprintln!("normalized {count} records");
        }
        Command::BuildCorpus(args) => {
            let specs = load_specs(args.categories.as_deref())?;
            let graph = load_graph(args.synonym_graph.as_deref())?;
            let summary = pipeline::stage_build_corpus(
                &specs,
                &graph,
                args.max_depth,
                args.intersect_docs.as_deref(),
                &args.output,
                &args.conflicts_output,
            )?;
            eprintln!(
                "corpus has {} words ({} conflict exclusions)",
                summary.entries, summary.conflicts
            );
        }
        Command::WeakLabel(args) => {
            let specs = load_specs(args.categories.as_deref())?;
            let spec_order: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
            let summary =
                pipeline::stage_weak_label(&args.docs, &args.corpus, &spec_order, &args.output)?;
            eprintln!(
                "labeled {} documents, {} unlabeled",
                summary.labeled, summary.unlabeled
            );
        }
        Command::Train(args) => {
            let params = TrainParams {
                classifier: args.classifier,
                min_count: args.min_count,
                smoothing: args.smoothing,
                epochs: args.epochs,
                learning_rate: args.learning_rate,
                l2: args.l2,
                seed: args.seed,
                tolerance: args.tolerance,
            };
            let summary = pipeline::stage_train(
                &args.docs,
                &args.labels,
                &params,
                &args.vocab_output,
                &args.model_output,
                &args.categories_output,
            )?;
            eprintln!(
                "trained {:?} on {} documents, {} categories, vocabulary {}",
                args.classifier,
                summary.training_docs,
                summary.trained_categories.len(),
                summary.vocab_size
            );
        }
        Command::Classify(args) => {
            let count = pipeline::stage_classify(
                &args.docs,
                &args.vocab,
                &args.model,
                &args.categories,
                &args.output,
            )?;
            eprintln!("classified {count} documents");
        }
        Command::Eval(args) => {
            let summary = pipeline::stage_eval(&args.classified, &args.gold, &args.output)?;
            println!(
                "accuracy {:.6}  macro-f1 {:.6}  ({} documents, {} categories)",
                summary.metrics.accuracy,
                summary.metrics.macro_f1,
                summary.evaluated,
                summary.categories.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
