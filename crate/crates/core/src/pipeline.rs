//! End-to-end pipeline: ingest -> filter -> normalize -> corpus ->
//! weak-label -> train -> classify -> evaluate, with every stage reading
//! and writing file artifacts so the fused run and the stage-wise CLI
//! subcommands produce byte-identical outputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::classify::{
    evaluate, maxent_train, nb_train, svm_train, LabeledSet, Metrics, Model, TrainConfig,
};
use crate::defaults;
use crate::error::{Error, Result};
use crate::features::{fit_vocabulary, vectorize, Vocabulary};
use crate::ingest::{filter_by_hashtags, read_dataset, DataFormat, TweetRecord};
use crate::lexicon::{
    build_corpus, weak_label, CategoryCorpus, CategorySpec, SynonymGraph, WeakLabel,
};
use crate::normalize::{
    self, load_emoticons, load_reference_vocab, load_slang, load_stopwords, NormalizeConfig,
    NormalizedDoc,
};

pub fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Nb,
    Maxent,
    Svm,
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" => Ok(ClassifierKind::Nb),
            "maxent" => Ok(ClassifierKind::Maxent),
            "svm" => Ok(ClassifierKind::Svm),
            other => Err(Error::validation(format!(
                "unknown classifier {other:?}, expected nb, maxent, or svm"
            ))),
        }
    }
}

fn default_format() -> DataFormat {
    DataFormat::Jsonl
}
fn default_max_depth() -> usize {
    2
}
fn default_min_count() -> usize {
    1
}
fn default_classifier() -> ClassifierKind {
    ClassifierKind::Svm
}
fn default_smoothing() -> f64 {
    1.0
}
fn default_epochs() -> usize {
    200
}
fn default_learning_rate() -> f64 {
    0.1
}
fn default_l2() -> f64 {
    1e-3
}
fn default_tolerance() -> f64 {
    1e-6
}
fn default_test_fraction() -> f64 {
    0.2
}

/// Resolved configuration for one full run. Unset resource paths fall back
/// to the built-in data files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: PathBuf,
    #[serde(default = "default_format")]
    pub format: DataFormat,
    #[serde(default)]
    pub stopwords: Option<PathBuf>,
    #[serde(default)]
    pub slang: Option<PathBuf>,
    #[serde(default)]
    pub reference_vocab: Option<PathBuf>,
    #[serde(default)]
    pub emoticons: Option<PathBuf>,
    #[serde(default)]
    pub categories: Option<PathBuf>,
    #[serde(default)]
    pub synonym_graph: Option<PathBuf>,
    /// Records must carry at least one of these hashtags; empty means no
    /// filtering.
    #[serde(default)]
    pub hashtags: BTreeSet<String>,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    #[serde(default = "default_min_count")]
    pub min_count: usize,
    /// Keep only corpus words that occur in the normalized dataset.
    #[serde(default)]
    pub intersect_dataset_vocab: bool,
    #[serde(default = "default_classifier")]
    pub classifier: ClassifierKind,
    /// Naive Bayes additive smoothing.
    #[serde(default = "default_smoothing")]
    pub smoothing: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_l2")]
    pub l2: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Reserved for library-level train/test splitting; echoed into the
    /// report for provenance.
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// A config with every optional knob at its default.
    pub fn new(dataset: PathBuf, output_dir: PathBuf) -> Self {
        RunConfig {
            dataset,
            format: default_format(),
            stopwords: None,
            slang: None,
            reference_vocab: None,
            emoticons: None,
            categories: None,
            synonym_graph: None,
            hashtags: BTreeSet::new(),
            max_depth: default_max_depth(),
            min_count: default_min_count(),
            intersect_dataset_vocab: false,
            classifier: default_classifier(),
            smoothing: default_smoothing(),
            epochs: default_epochs(),
            learning_rate: default_learning_rate(),
            l2: default_l2(),
            seed: 0,
            tolerance: default_tolerance(),
            test_fraction: default_test_fraction(),
            output_dir,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut referenced: Vec<&Path> = vec![&self.dataset];
        for path in [
            &self.stopwords,
            &self.slang,
            &self.reference_vocab,
            &self.emoticons,
            &self.categories,
            &self.synonym_graph,
        ]
        .into_iter()
        .flatten()
        {
            referenced.push(path);
        }
        for path in referenced {
            if !path.exists() {
                return Err(Error::io(
                    path,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
                ));
            }
        }
        if self.min_count == 0 {
            return Err(Error::validation("min_count must be positive"));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::validation(format!(
                "test_fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if self.smoothing < 0.0 || !self.smoothing.is_finite() {
            return Err(Error::validation("smoothing must be non-negative and finite"));
        }
        self.train_config().validate()?;
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig<f64> {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            l2: self.l2,
            seed: self.seed,
            tolerance: self.tolerance,
        }
    }
}

/// Fixed artifact names inside a run's output directory.
#[derive(Debug, Clone)]
pub struct ArtifactPaths {
    pub config: PathBuf,
    pub records: PathBuf,
    pub docs: PathBuf,
    pub corpus: PathBuf,
    pub corpus_conflicts: PathBuf,
    pub labels: PathBuf,
    pub vocab: PathBuf,
    pub model: PathBuf,
    pub categories: PathBuf,
    pub classified: PathBuf,
    pub metrics_gold: PathBuf,
    pub report_text: PathBuf,
    pub report_json: PathBuf,
}

impl ArtifactPaths {
    pub fn new(dir: &Path) -> Self {
        ArtifactPaths {
            config: dir.join("config.json"),
            records: dir.join("records.jsonl"),
            docs: dir.join("docs.jsonl"),
            corpus: dir.join("corpus.tsv"),
            corpus_conflicts: dir.join("corpus_conflicts.txt"),
            labels: dir.join("labels.jsonl"),
            vocab: dir.join("vocab.tsv"),
            model: dir.join("model.txt"),
            categories: dir.join("categories.txt"),
            classified: dir.join("classified.jsonl"),
            metrics_gold: dir.join("metrics_gold.json"),
            report_text: dir.join("report.txt"),
            report_json: dir.join("report.jsonl"),
        }
    }
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("artifact serializes"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut items = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let item = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
        items.push(item);
    }
    Ok(items)
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

/// Load the normalization config from explicit files, falling back to the
/// built-in data for unset paths.
pub fn load_normalize_config(
    stopwords: Option<&Path>,
    slang: Option<&Path>,
    reference_vocab: Option<&Path>,
    emoticons: Option<&Path>,
) -> Result<NormalizeConfig> {
    let stopwords = match stopwords {
        Some(path) => load_stopwords(path)?,
        None => normalize::parse_stopwords(defaults::STOPWORDS),
    };
    let slang = match slang {
        Some(path) => load_slang(path)?,
        None => normalize::parse_slang(defaults::SLANG, Path::new("<builtin>"))?,
    };
    let reference_vocab = match reference_vocab {
        Some(path) => load_reference_vocab(path)?,
        None => normalize::parse_reference_vocab(defaults::REFERENCE_VOCAB),
    };
    let emoticons = match emoticons {
        Some(path) => load_emoticons(path)?,
        None => normalize::parse_emoticons(defaults::EMOTICONS),
    };
    NormalizeConfig::new(stopwords, slang, reference_vocab, emoticons)
}

pub fn load_specs(categories: Option<&Path>) -> Result<Vec<CategorySpec>> {
    match categories {
        Some(path) => crate::lexicon::load_category_specs(path),
        None => defaults::category_specs(),
    }
}

pub fn load_graph(graph: Option<&Path>) -> Result<SynonymGraph> {
    match graph {
        Some(path) => SynonymGraph::load(path),
        None => defaults::synonym_graph(),
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IngestSummary {
    pub ingested: usize,
    pub kept: usize,
}

/// Read the dataset, apply the hashtag filter (when non-empty), and write
/// the surviving records.
pub fn stage_ingest(
    dataset: &Path,
    format: DataFormat,
    hashtags: &BTreeSet<String>,
    out_records: &Path,
) -> Result<IngestSummary> {
    let ds = read_dataset(dataset, format)?;
    let ingested = ds.records.len();
    let kept = if hashtags.is_empty() {
        ds
    } else {
        filter_by_hashtags(&ds, hashtags)?
    };
    let summary = IngestSummary {
        ingested,
        kept: kept.records.len(),
    };
    write_jsonl(out_records, &kept.records)?;
    Ok(summary)
}

/// Normalize every record into its token list.
pub fn stage_normalize(
    records: &Path,
    cfg: &NormalizeConfig,
    out_docs: &Path,
) -> Result<usize> {
    let records: Vec<TweetRecord> = read_jsonl(records)?;
    let docs: Vec<NormalizedDoc> = records.iter().map(|r| normalize::normalize(r, cfg)).collect();
    write_jsonl(out_docs, &docs)?;
    Ok(docs.len())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub entries: usize,
    pub conflicts: usize,
}

/// Expand seeds into the category corpus; optionally intersect it with the
/// vocabulary of an already-normalized dataset.
pub fn stage_build_corpus(
    specs: &[CategorySpec],
    graph: &SynonymGraph,
    max_depth: usize,
    intersect_docs: Option<&Path>,
    out_corpus: &Path,
    out_conflicts: &Path,
) -> Result<CorpusSummary> {
    let build = build_corpus(specs, graph, max_depth)?;
    let mut corpus = build.corpus;
    if let Some(docs_path) = intersect_docs {
        let docs: Vec<NormalizedDoc> = read_jsonl(docs_path)?;
        let seen: BTreeSet<String> = docs
            .into_iter()
            .flat_map(|d| d.tokens.into_iter())
            .collect();
        corpus.retain_words(&seen);
    }
    write_text(out_corpus, &corpus.dump())?;
    let mut conflicts_text = String::new();
    for word in &build.conflicts {
        conflicts_text.push_str(word);
        conflicts_text.push('\n');
    }
    write_text(out_conflicts, &conflicts_text)?;
    Ok(CorpusSummary {
        entries: corpus.len(),
        conflicts: build.conflicts.len(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeakLabelSummary {
    pub labeled: usize,
    pub unlabeled: usize,
    pub distribution: BTreeMap<String, usize>,
}

/// Weak-label every document by corpus hit counts.
pub fn stage_weak_label(
    docs: &Path,
    corpus: &Path,
    spec_order: &[String],
    out_labels: &Path,
) -> Result<WeakLabelSummary> {
    let docs: Vec<NormalizedDoc> = read_jsonl(docs)?;
    let corpus = CategoryCorpus::load(corpus)?;
    for category in corpus.categories() {
        if !spec_order.iter().any(|s| s == category) {
            return Err(Error::validation(format!(
                "corpus category {category:?} missing from the category specs"
            )));
        }
    }
    let labels: Vec<WeakLabel> = docs
        .iter()
        .map(|d| weak_label(d, &corpus, spec_order))
        .collect();
    let mut distribution: BTreeMap<String, usize> = BTreeMap::new();
    let mut labeled = 0;
    for label in &labels {
        if let Some(category) = &label.category {
            labeled += 1;
            *distribution.entry(category.clone()).or_default() += 1;
        }
    }
    let summary = WeakLabelSummary {
        labeled,
        unlabeled: labels.len() - labeled,
        distribution,
    };
    write_jsonl(out_labels, &labels)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub classifier: ClassifierKind,
    pub min_count: usize,
    pub smoothing: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
    pub tolerance: f64,
}

impl TrainParams {
    pub fn from_run_config(cfg: &RunConfig) -> Self {
        TrainParams {
            classifier: cfg.classifier,
            min_count: cfg.min_count,
            smoothing: cfg.smoothing,
            epochs: cfg.epochs,
            learning_rate: cfg.learning_rate,
            l2: cfg.l2,
            seed: cfg.seed,
            tolerance: cfg.tolerance,
        }
    }

    fn train_config(&self) -> TrainConfig<f64> {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            l2: self.l2,
            seed: self.seed,
            tolerance: self.tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainSummary {
    pub trained_categories: Vec<String>,
    pub vocab_size: usize,
    pub training_docs: usize,
}

/// Fit the vocabulary on weak-labeled documents and train the chosen
/// classifier on their weak labels. Writes the vocabulary, the model, and
/// the category-name index.
pub fn stage_train(
    docs: &Path,
    labels: &Path,
    params: &TrainParams,
    out_vocab: &Path,
    out_model: &Path,
    out_categories: &Path,
) -> Result<TrainSummary> {
    let docs: Vec<NormalizedDoc> = read_jsonl(docs)?;
    let weak_labels: Vec<WeakLabel> = read_jsonl(labels)?;
    let by_id: BTreeMap<&str, &WeakLabel> =
        weak_labels.iter().map(|l| (l.doc_id.as_str(), l)).collect();

    let mut training_docs: Vec<&NormalizedDoc> = Vec::new();
    let mut training_categories: Vec<&str> = Vec::new();
    for doc in &docs {
        let label = by_id.get(doc.id.as_str()).ok_or_else(|| {
            Error::Pipeline(format!(
                "record {:?} has no weak label: run weak-label first",
                doc.id
            ))
        })?;
        if let Some(category) = &label.category {
            training_docs.push(doc);
            training_categories.push(category);
        }
    }
    if training_docs.is_empty() {
        return Err(Error::Pipeline("no trainable data".to_string()));
    }

    let category_names: Vec<String> = training_categories
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|c| c.to_string())
        .collect();
    let index_of: BTreeMap<&str, usize> = category_names
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let owned_docs: Vec<NormalizedDoc> = training_docs.iter().map(|d| (*d).clone()).collect();
    let vocab = fit_vocabulary(&owned_docs, params.min_count)?;
    let vectors = owned_docs.iter().map(|d| vectorize(d, &vocab)).collect();
    let labels_idx: Vec<usize> = training_categories
        .iter()
        .map(|c| index_of[*c])
        .collect();
    let data = LabeledSet::new(vectors, labels_idx, category_names.clone(), vocab.size())?;

    let model = match params.classifier {
        ClassifierKind::Nb => Model::Nb(nb_train(&data, params.smoothing)?),
        ClassifierKind::Maxent => Model::MaxEnt(maxent_train(&data, &params.train_config())?),
        ClassifierKind::Svm => Model::Svm(svm_train(&data, &params.train_config())?),
    };

    write_text(out_vocab, &vocab.dump())?;
    model.save(out_model)?;
    let mut categories_text = String::new();
    for name in &category_names {
        categories_text.push_str(name);
        categories_text.push('\n');
    }
    write_text(out_categories, &categories_text)?;
    Ok(TrainSummary {
        trained_categories: category_names,
        vocab_size: vocab.size(),
        training_docs: owned_docs.len(),
    })
}

/// One classified document as emitted by the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedRecord {
    pub id: String,
    pub category: String,
    /// "posterior" for nb/maxent scores, "margin" for svm.
    pub score_kind: String,
    pub scores: BTreeMap<String, f64>,
}

pub fn load_category_names(path: &Path) -> Result<Vec<String>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(content.lines().map(str::to_string).collect())
}

/// Classify every document with a trained model.
pub fn stage_classify(
    docs: &Path,
    vocab: &Path,
    model: &Path,
    categories: &Path,
    out_classified: &Path,
) -> Result<usize> {
    let docs: Vec<NormalizedDoc> = read_jsonl(docs)?;
    let vocab = Vocabulary::load(vocab)?;
    let model: Model<f64> = Model::load(model)?;
    let category_names = load_category_names(categories)?;
    if category_names.len() != model.num_categories() {
        return Err(Error::validation(format!(
            "{} category names for a model with {} categories",
            category_names.len(),
            model.num_categories()
        )));
    }
    if vocab.size() != model.vocab_size() {
        return Err(Error::validation(format!(
            "vocabulary size {} does not match model vocabulary size {}",
            vocab.size(),
            model.vocab_size()
        )));
    }
    let mut out = Vec::with_capacity(docs.len());
    for doc in &docs {
        let x = vectorize(doc, &vocab);
        let (winner, scores) = model.classify(&x).map_err(|e| match e {
            Error::Unclassifiable => {
                Error::Pipeline(format!("classify: record {:?}: {e}", doc.id))
            }
            other => other,
        })?;
        let scores: BTreeMap<String, f64> = category_names
            .iter()
            .cloned()
            .zip(scores.iter().copied())
            .collect();
        out.push(ClassifiedRecord {
            id: doc.id.clone(),
            category: category_names[winner].clone(),
            score_kind: model.score_kind().to_string(),
            scores,
        });
    }
    write_jsonl(out_classified, &out)?;
    Ok(out.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub evaluated: usize,
    pub categories: Vec<String>,
    pub metrics: Metrics,
}

/// Score classifications against the gold labels carried by the records
/// file. Categories are indexed over the sorted union of predicted and gold
/// names, so gold categories the model never predicts still count against
/// recall.
pub fn stage_eval(
    classified: &Path,
    gold_records: &Path,
    out_metrics: &Path,
) -> Result<EvalSummary> {
    let classified: Vec<ClassifiedRecord> = read_jsonl(classified)?;
    let records: Vec<TweetRecord> = read_jsonl(gold_records)?;
    let predicted_by_id: BTreeMap<&str, &str> = classified
        .iter()
        .map(|c| (c.id.as_str(), c.category.as_str()))
        .collect();

    let mut names: BTreeSet<&str> = classified.iter().map(|c| c.category.as_str()).collect();
    for record in &records {
        if let Some(label) = &record.label {
            names.insert(label.as_str());
        }
    }
    let categories: Vec<String> = names.iter().map(|n| n.to_string()).collect();
    let index_of: BTreeMap<&str, usize> = categories
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let mut predicted = Vec::new();
    let mut gold = Vec::new();
    for record in &records {
        let Some(label) = &record.label else { continue };
        let Some(prediction) = predicted_by_id.get(record.id.as_str()) else {
            return Err(Error::validation(format!(
                "record {:?} has a gold label but no classification: run classify first",
                record.id
            )));
        };
        predicted.push(index_of[prediction]);
        gold.push(index_of[label.as_str()]);
    }
    if gold.is_empty() {
        return Err(Error::validation(
            "no gold labels present in the records file",
        ));
    }
    let metrics = evaluate(&predicted, &gold, categories.len())?;
    let summary = EvalSummary {
        evaluated: gold.len(),
        categories,
        metrics,
    };
    let mut json = serde_json::to_string(&summary).expect("summary serializes");
    json.push('\n');
    write_text(out_metrics, &json)?;
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub ingested: usize,
    pub filtered: usize,
    pub normalized: usize,
    pub weak_labeled: usize,
    pub unlabeled: usize,
}

/// Machine-readable run report; also rendered as text.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub counts: StageCounts,
    pub corpus: CorpusSummary,
    pub weak_distribution: BTreeMap<String, usize>,
    pub trained_categories: Vec<String>,
    pub metrics_vs_weak: Metrics,
    pub gold: Option<EvalSummary>,
    pub config: RunConfig,
}

impl RunReport {
    fn metrics_block(out: &mut String, title: &str, metrics: &Metrics, extra: Option<usize>) {
        out.push_str(title);
        if let Some(n) = extra {
            out.push_str(&format!(" ({n} documents)"));
        }
        out.push('\n');
        out.push_str(&format!("  accuracy  {:.6}\n", metrics.accuracy));
        out.push_str(&format!("  macro-f1  {:.6}\n", metrics.macro_f1));
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("hca run report (tool {})\n\n", self.tool_version));
        out.push_str("counts\n");
        out.push_str(&format!("  ingested      {}\n", self.counts.ingested));
        out.push_str(&format!("  filtered      {}\n", self.counts.filtered));
        out.push_str(&format!("  normalized    {}\n", self.counts.normalized));
        out.push_str(&format!("  weak-labeled  {}\n", self.counts.weak_labeled));
        out.push_str(&format!("  unlabeled     {}\n\n", self.counts.unlabeled));
        out.push_str("corpus\n");
        out.push_str(&format!("  entries    {}\n", self.corpus.entries));
        out.push_str(&format!("  conflicts  {}\n\n", self.corpus.conflicts));
        out.push_str("weak-label distribution\n");
        for (category, count) in &self.weak_distribution {
            out.push_str(&format!("  {category}  {count}\n"));
        }
        out.push('\n');
        out.push_str(&format!(
            "trained categories ({}): {}\n\n",
            self.trained_categories.len(),
            self.trained_categories.join(", ")
        ));
        Self::metrics_block(&mut out, "metrics vs weak labels", &self.metrics_vs_weak, None);
        if let Some(gold) = &self.gold {
            out.push('\n');
            Self::metrics_block(
                &mut out,
                "metrics vs gold labels",
                &gold.metrics,
                Some(gold.evaluated),
            );
        }
        out.push('\n');
        out.push_str("config\n");
        let config = serde_json::to_value(&self.config).expect("config serializes");
        if let serde_json::Value::Object(map) = config {
            for (key, value) in map {
                out.push_str(&format!("  {key} = {value}\n"));
            }
        }
        out
    }
}

fn in_stage(stage: &str, err: Error) -> Error {
    match err {
        Error::Validation(msg) => Error::Validation(format!("{stage}: {msg}")),
        Error::Pipeline(msg) if !msg.starts_with(stage) => {
            Error::Pipeline(format!("{stage}: {msg}"))
        }
        other => other,
    }
}

/// Execute the whole pipeline for one configuration, writing every stage
/// artifact plus the report into `cfg.output_dir`. Deterministic for a
/// fixed config.
pub fn hca_run(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
    let paths = ArtifactPaths::new(&cfg.output_dir);

    let mut config_json = serde_json::to_string(cfg).expect("config serializes");
    config_json.push('\n');
    write_text(&paths.config, &config_json)?;

    let normalize_cfg = load_normalize_config(
        cfg.stopwords.as_deref(),
        cfg.slang.as_deref(),
        cfg.reference_vocab.as_deref(),
        cfg.emoticons.as_deref(),
    )
    .map_err(|e| in_stage("normalize", e))?;
    let specs = load_specs(cfg.categories.as_deref()).map_err(|e| in_stage("build-corpus", e))?;
    let graph =
        load_graph(cfg.synonym_graph.as_deref()).map_err(|e| in_stage("build-corpus", e))?;
    let spec_order: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();

    let ingest = stage_ingest(&cfg.dataset, cfg.format, &cfg.hashtags, &paths.records)
        .map_err(|e| in_stage("ingest", e))?;
    let normalized = stage_normalize(&paths.records, &normalize_cfg, &paths.docs)
        .map_err(|e| in_stage("normalize", e))?;
    let corpus = stage_build_corpus(
        &specs,
        &graph,
        cfg.max_depth,
        cfg.intersect_dataset_vocab.then_some(paths.docs.as_path()),
        &paths.corpus,
        &paths.corpus_conflicts,
    )
    .map_err(|e| in_stage("build-corpus", e))?;
    let weak = stage_weak_label(&paths.docs, &paths.corpus, &spec_order, &paths.labels)
        .map_err(|e| in_stage("weak-label", e))?;
    let train = stage_train(
        &paths.docs,
        &paths.labels,
        &TrainParams::from_run_config(cfg),
        &paths.vocab,
        &paths.model,
        &paths.categories,
    )
    .map_err(|e| in_stage("train", e))?;
    let classified_count = stage_classify(
        &paths.docs,
        &paths.vocab,
        &paths.model,
        &paths.categories,
        &paths.classified,
    )
    .map_err(|e| in_stage("classify", e))?;
    debug_assert_eq!(classified_count, normalized);

    // metrics against the weak labels, over the weak-labeled documents
    let classified: Vec<ClassifiedRecord> = read_jsonl(&paths.classified)?;
    let weak_labels: Vec<WeakLabel> = read_jsonl(&paths.labels)?;
    let index_of: BTreeMap<&str, usize> = train
        .trained_categories
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let predicted_by_id: BTreeMap<&str, &str> = classified
        .iter()
        .map(|c| (c.id.as_str(), c.category.as_str()))
        .collect();
    let mut predicted = Vec::new();
    let mut weak_gold = Vec::new();
    for label in &weak_labels {
        if let Some(category) = &label.category {
            let prediction = predicted_by_id[label.doc_id.as_str()];
            predicted.push(index_of[prediction]);
            weak_gold.push(index_of[category.as_str()]);
        }
    }
    let metrics_vs_weak = evaluate(&predicted, &weak_gold, train.trained_categories.len())
        .map_err(|e| in_stage("eval", e))?;

    let records: Vec<TweetRecord> = read_jsonl(&paths.records)?;
    let has_gold = records.iter().any(|r| r.label.is_some());
    let gold = if has_gold {
        Some(
            stage_eval(&paths.classified, &paths.records, &paths.metrics_gold)
                .map_err(|e| in_stage("eval", e))?,
        )
    } else {
        None
    };

    let report = RunReport {
        tool_version: tool_version().to_string(),
        counts: StageCounts {
            ingested: ingest.ingested,
            filtered: ingest.kept,
            normalized,
            weak_labeled: weak.labeled,
            unlabeled: weak.unlabeled,
        },
        corpus,
        weak_distribution: weak.distribution,
        trained_categories: train.trained_categories,
        metrics_vs_weak,
        gold,
        config: cfg.clone(),
    };
    let mut report_json = serde_json::to_string(&report).expect("report serializes");
    report_json.push('\n');
    write_text(&paths.report_json, &report_json)?;
    write_text(&paths.report_text, &report.render_text())?;
    Ok(report)
}
