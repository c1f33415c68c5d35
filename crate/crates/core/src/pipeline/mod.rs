//! Experiment runner and real-time serving.
//!
//! An experiment reads four raw corpora, labels them, splits the in-domain Spanish
//! data once, and trains one model per row:
//!
//! | row            | training data                                              |
//! |----------------|------------------------------------------------------------|
//! | `LDC`          | LDC-like corpus                                            |
//! | `LDC_SELECTED` | LDC plus the lowest-perplexity OpenSubtitle utterances      |
//! | `AUGMENTED`    | the above, concatenated to match the in-domain histogram    |
//! | strategies     | augmented data plus oversampled in-domain train, with or without converted English |
//!
//! Every row is scored on the same in-domain test split. All intermediate corpora,
//! models and reports land under `output_dir` with a manifest of their hashes.

mod config;
mod serve;

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use config::{
    AugmentationConfig, DataPaths, DataRow, EvalConfig, ExperimentConfig, SelectionConfig,
    SplitConfig, seed_from_env, SCHEMA_VERSION, SEED_ENV,
};
pub use serve::{
    handle_request, load_model, punctuate, serve_stream, serve_tcp, Punctuated, ServeError,
    ServeStats,
};

use crate::augment::{augment_to_distribution, histogram, histogram_report, terminal_count};
use crate::corpus::{label_raw, read_jsonl, render, write_jsonl, LabeledUtterance, RawUtterance};
use crate::crosslingual::anglicize_to_spanish_conventions;
use crate::evaluate::{evaluate_with_predictions, split_corpus, EvalReport, Split};
use crate::selection::{score_report, select_lowest_perplexity, LmOptions, NGramModel};
use crate::tagger::{oversample, run_strategy, Perceptron, Strategy, TaggerModel};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {message}")]
    Data { stage: &'static str, message: String },
    #[error("{stage}: {path}: {source}")]
    Io { stage: &'static str, path: PathBuf, source: std::io::Error },
    #[error("{0} test utterances also occur in training data")]
    Leakage(usize),
}

impl PipelineError {
    /// Process exit code: 2 for configuration problems, 3 for bad or insufficient
    /// data, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Data { .. } | PipelineError::Leakage(_) => 3,
            PipelineError::Io { .. } => 1,
        }
    }

    fn data(stage: &'static str, e: impl std::fmt::Display) -> PipelineError {
        PipelineError::Data { stage, message: e.to_string() }
    }
}

/// The four raw input corpora.
#[derive(Debug, Clone, Default)]
pub struct RawCorpora {
    pub es_indomain: Vec<RawUtterance>,
    pub ldc: Vec<RawUtterance>,
    pub opensubtitle_pool: Vec<RawUtterance>,
    pub en_indomain: Vec<RawUtterance>,
}

impl RawCorpora {
    pub fn load(paths: &DataPaths) -> Result<RawCorpora, PipelineError> {
        let read = |p: &Option<PathBuf>| -> Result<Vec<RawUtterance>, PipelineError> {
            match p {
                Some(p) => read_jsonl(p).map_err(|e| PipelineError::Data {
                    stage: "load",
                    message: format!("{}: {e}", p.display()),
                }),
                None => Ok(Vec::new()),
            }
        };
        Ok(RawCorpora {
            es_indomain: read(&Some(paths.es_indomain.clone()))?,
            ldc: read(&Some(paths.ldc.clone()))?,
            opensubtitle_pool: read(&paths.opensubtitle_pool)?,
            en_indomain: read(&paths.en_indomain)?,
        })
    }
}

/// Counts of input lines dropped along the way, per corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounts {
    /// Lines whose punctuation could not be turned into labels.
    pub unlabelable: BTreeMap<String, usize>,
    /// Utterances identical to a test utterance.
    pub leakage: BTreeMap<String, usize>,
    /// Augmentation sources without any sentence-ending mark.
    pub no_terminal: usize,
    /// English utterances already carrying Spanish opening marks.
    pub not_english_convention: usize,
}

/// Which training set and strategy a row uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Data(DataRow),
    Strategy(Strategy),
}

impl RowKind {
    pub fn id(self) -> &'static str {
        match self {
            RowKind::Data(d) => d.id(),
            RowKind::Strategy(s) => match s {
                Strategy::EsOnly => "es_only",
                Strategy::EsThenEn => "es_then_en",
                Strategy::EnThenEs => "en_then_es",
                Strategy::Joint => "joint",
            },
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            RowKind::Data(d) => d.title(),
            RowKind::Strategy(s) => s.display_label(),
        }
    }

    fn table(self) -> &'static str {
        match self {
            RowKind::Data(_) => "training data",
            RowKind::Strategy(_) => "strategy",
        }
    }
}

/// Scores of one trained row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowResult {
    pub id: String,
    pub title: String,
    pub table: String,
    pub train_utterances: usize,
    pub train_tokens: usize,
    pub validation_micro_f1: f64,
    pub test_micro_f1: f64,
    pub test_macro_f1: f64,
}

/// Labeled corpora after splitting, selection, augmentation and conversion.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub split: Split,
    pub ldc: Vec<LabeledUtterance>,
    pub selected: Vec<LabeledUtterance>,
    /// Perplexity of every (labelable, leakage-free) pool utterance, by pool index.
    pub selection_scores: Vec<f64>,
    pub augmented: Vec<LabeledUtterance>,
    /// Augmented data plus the oversampled in-domain train split.
    pub es_train: Vec<LabeledUtterance>,
    pub en_converted: Vec<LabeledUtterance>,
    pub drops: DropCounts,
}

impl PreparedData {
    fn training_set(&self, row: DataRow) -> Vec<LabeledUtterance> {
        match row {
            DataRow::Ldc => self.ldc.clone(),
            DataRow::LdcSelected => self.ldc.iter().chain(&self.selected).cloned().collect(),
            DataRow::Augmented => self.augmented.clone(),
        }
    }
}

/// A trained row: its model, its test report and its summary line.
#[derive(Debug, Clone)]
pub struct TrainedRow {
    pub kind: RowKind,
    pub model: TaggerModel,
    pub report: EvalReport,
    pub result: RowResult,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub data: PreparedData,
    pub rows: Vec<TrainedRow>,
}

impl ExperimentOutcome {
    pub fn results(&self) -> Vec<RowResult> {
        self.rows.iter().map(|r| r.result.clone()).collect()
    }

    pub fn row(&self, kind: RowKind) -> Option<&TrainedRow> {
        self.rows.iter().find(|r| r.kind == kind)
    }
}

fn content_key(u: &LabeledUtterance) -> [u8; 32] {
    let mut h = Sha256::new();
    for t in u.tokens() {
        h.update(t.to_lowercase().as_bytes());
        h.update([0x1f]);
    }
    h.finalize().into()
}

/// Labels `raw`, counting lines that fail. Returns kept utterances with the index of
/// each in `raw`.
fn label_all(
    raw: &[RawUtterance],
    name: &str,
    lower: bool,
    drops: &mut DropCounts,
) -> Vec<(usize, LabeledUtterance)> {
    let mut out = Vec::with_capacity(raw.len());
    let mut failed = 0;
    for (i, r) in raw.iter().enumerate() {
        match label_raw(r) {
            Ok(u) => out.push((i, if lower { u.lowercased() } else { u })),
            Err(_) => failed += 1,
        }
    }
    drops.unlabelable.insert(name.to_string(), failed);
    out
}

fn drop_leaked(
    corpus: Vec<(usize, LabeledUtterance)>,
    test: &HashSet<[u8; 32]>,
    name: &str,
    drops: &mut DropCounts,
) -> Vec<(usize, LabeledUtterance)> {
    let before = corpus.len();
    let kept: Vec<_> = corpus.into_iter().filter(|(_, u)| !test.contains(&content_key(u))).collect();
    drops.leakage.insert(name.to_string(), before - kept.len());
    kept
}

/// Runs every preprocessing stage in memory.
pub fn prepare(raw: &RawCorpora, config: &ExperimentConfig) -> Result<PreparedData, PipelineError> {
    let mut drops = DropCounts::default();
    let lower = config.lowercase;
    let es: Vec<LabeledUtterance> = label_all(&raw.es_indomain, "es_indomain", lower, &mut drops)
        .into_iter()
        .map(|(_, u)| u)
        .collect();
    let split = split_corpus(&es, config.split.fractions(), config.eval.seed)
        .map_err(|e| PipelineError::data("split", e))?;

    let test_keys: HashSet<[u8; 32]> = split.test.iter().map(content_key).collect();
    let train: Vec<LabeledUtterance> =
        split.train.iter().filter(|u| !test_keys.contains(&content_key(u))).cloned().collect();
    drops.leakage.insert("es_indomain.train".into(), split.train.len() - train.len());
    let split = Split { train, ..split };
    if split.train.is_empty() {
        return Err(PipelineError::data("split", "no in-domain training utterances"));
    }

    let ldc_labeled = label_all(&raw.ldc, "ldc", lower, &mut drops);
    let ldc: Vec<LabeledUtterance> =
        drop_leaked(ldc_labeled, &test_keys, "ldc", &mut drops).into_iter().map(|(_, u)| u).collect();

    let (selected, selection_scores) = if let Some(k) = config.selection.k {
        let pool_labeled = label_all(&raw.opensubtitle_pool, "opensubtitle_pool", lower, &mut drops);
        let pool = drop_leaked(pool_labeled, &test_keys, "opensubtitle_pool", &mut drops);
        let lm_corpus: Vec<RawUtterance> = split
            .train
            .iter()
            .map(|u| RawUtterance::new(render(u, false)).expect("non-empty utterance"))
            .collect();
        let opts = LmOptions::with_order(config.selection.order);
        let lm = NGramModel::train(&lm_corpus, &opts).map_err(|e| PipelineError::data("select", e))?;
        let pool_raw: Vec<RawUtterance> = pool.iter().map(|(i, _)| raw.opensubtitle_pool[*i].clone()).collect();
        let sel = select_lowest_perplexity(&lm, &pool_raw, k.min(pool_raw.len()))
            .map_err(|e| PipelineError::data("select", e))?;
        let selected = sel.indices.iter().map(|&i| pool[i].1.clone()).collect();
        (selected, sel.scores)
    } else {
        (Vec::new(), Vec::new())
    };

    let source: Vec<LabeledUtterance> = ldc.iter().chain(&selected).cloned().collect();
    let with_terminal: Vec<LabeledUtterance> =
        source.into_iter().filter(|u| terminal_count(u) > 0).collect();
    drops.no_terminal = ldc.len() + selected.len() - with_terminal.len();
    let target = histogram(&split.train).map_err(|e| PipelineError::data("augment", e))?;
    let augmented = if with_terminal.is_empty() {
        Vec::new()
    } else {
        augment_to_distribution(&with_terminal, &target, config.augmentation.seed, config.augmentation.max_tokens)
            .map_err(|e| PipelineError::data("augment", e))?
    };

    let oversample_target = config.oversample_to.unwrap_or(augmented.len()).max(split.train.len());
    let in_domain = oversample(&split.train, oversample_target, config.tagger.seed)
        .map_err(|e| PipelineError::data("oversample", e))?;
    let es_train: Vec<LabeledUtterance> = augmented.iter().chain(&in_domain).cloned().collect();

    let en_labeled = label_all(&raw.en_indomain, "en_indomain", lower, &mut drops);
    let mut en_converted = Vec::with_capacity(en_labeled.len());
    for (_, u) in en_labeled {
        match anglicize_to_spanish_conventions(&u) {
            Ok(c) => en_converted.push(c),
            Err(_) => drops.not_english_convention += 1,
        }
    }

    let data = PreparedData { split, ldc, selected, selection_scores, augmented, es_train, en_converted, drops };
    check_leakage(&data)?;
    Ok(data)
}

/// Fails if any test utterance also appears, by content hash, in a training corpus.
pub fn check_leakage(data: &PreparedData) -> Result<(), PipelineError> {
    let test: HashSet<[u8; 32]> = data.split.test.iter().map(content_key).collect();
    let training: HashSet<[u8; 32]> = data
        .split
        .train
        .iter()
        .chain(&data.ldc)
        .chain(&data.selected)
        .chain(&data.es_train)
        .map(content_key)
        .collect();
    let shared = test.intersection(&training).count();
    if shared > 0 {
        return Err(PipelineError::Leakage(shared));
    }
    Ok(())
}

fn corpus_tokens(c: &[LabeledUtterance]) -> usize {
    c.iter().map(LabeledUtterance::len).sum()
}

fn train_row(data: &PreparedData, kind: RowKind, config: &ExperimentConfig) -> Result<TrainedRow, PipelineError> {
    let stage = "train";
    let (model, train_utterances, train_tokens) = match kind {
        RowKind::Data(row) => {
            let corpus = data.training_set(row);
            let m = run_strategy(&Perceptron, Strategy::EsOnly, &corpus, &[], &config.tagger)
                .map_err(|e| PipelineError::data(stage, e))?;
            (m, corpus.len(), corpus_tokens(&corpus))
        }
        RowKind::Strategy(s) => {
            let m = run_strategy(&Perceptron, s, &data.es_train, &data.en_converted, &config.tagger)
                .map_err(|e| PipelineError::data(stage, e))?;
            let (n, t) = match s {
                Strategy::EsOnly => (data.es_train.len(), corpus_tokens(&data.es_train)),
                _ => (
                    data.es_train.len() + data.en_converted.len(),
                    corpus_tokens(&data.es_train) + corpus_tokens(&data.en_converted),
                ),
            };
            (m, n, t)
        }
    };
    let policy = config.eval.repair;
    let (report, _) = evaluate_with_predictions(&model, &data.split.test, policy, "es_indomain.test")
        .map_err(|e| PipelineError::data("eval", e))?;
    let validation_micro_f1 = if data.split.validation.is_empty() {
        f64::NAN
    } else {
        evaluate_with_predictions(&model, &data.split.validation, policy, "es_indomain.validation")
            .map_err(|e| PipelineError::data("eval", e))?
            .0
            .micro_f1_non_none
    };
    let result = RowResult {
        id: kind.id().to_string(),
        title: kind.title().to_string(),
        table: kind.table().to_string(),
        train_utterances,
        train_tokens,
        validation_micro_f1,
        test_micro_f1: report.micro_f1_non_none,
        test_macro_f1: report.macro_f1_non_none,
    };
    Ok(TrainedRow { kind, model, report, result })
}

/// Trains and scores every configured row. Rows are independent and seeded, so they
/// run concurrently and still come back in configuration order.
pub fn train_rows(data: &PreparedData, config: &ExperimentConfig) -> Result<Vec<TrainedRow>, PipelineError> {
    let kinds: Vec<RowKind> = config
        .data_rows
        .iter()
        .map(|d| RowKind::Data(*d))
        .chain(config.strategies.iter().map(|s| RowKind::Strategy(*s)))
        .collect();
    kinds.par_iter().map(|k| train_row(data, *k, config)).collect()
}

/// Runs the experiment in memory, without touching the file system.
pub fn run_in_memory(raw: &RawCorpora, config: &ExperimentConfig) -> Result<ExperimentOutcome, PipelineError> {
    config.validate()?;
    let data = prepare(raw, config)?;
    let rows = train_rows(&data, config)?;
    Ok(ExperimentOutcome { data, rows })
}

/// Loads the configured corpora, runs every row and writes all artifacts.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, PipelineError> {
    config.validate()?;
    config.check_paths()?;
    let raw = RawCorpora::load(&config.data)?;
    let outcome = run_in_memory(&raw, config)?;
    write_outputs(&outcome, config)?;
    Ok(outcome)
}

fn pct(x: f64) -> String {
    if x.is_nan() {
        "-".into()
    } else {
        format!("{:.1}", 100.0 * x)
    }
}

/// Markdown comparison tables, one per row family.
pub fn results_markdown(results: &[RowResult]) -> String {
    let mut out = String::new();
    for table in ["training data", "strategy"] {
        let rows: Vec<&RowResult> = results.iter().filter(|r| r.table == table).collect();
        if rows.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push('\n');
        }
        let head = if table == "strategy" { "Strategy" } else { "Training data" };
        let _ = writeln!(out, "| {head} | Utterances | Tokens | Val micro-F1 | Test micro-F1 | Test macro-F1 |");
        out.push_str("|---|---:|---:|---:|---:|---:|\n");
        for r in rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                r.title,
                r.train_utterances,
                r.train_tokens,
                pct(r.validation_micro_f1),
                pct(r.test_micro_f1),
                pct(r.test_macro_f1)
            );
        }
    }
    out
}

pub fn results_tsv(results: &[RowResult]) -> String {
    let mut out = String::from(
        "row\ttable\ttrain_utterances\ttrain_tokens\tvalidation_micro_f1\ttest_micro_f1\ttest_macro_f1\n",
    );
    for r in results {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}",
            r.id, r.table, r.train_utterances, r.train_tokens, r.validation_micro_f1, r.test_micro_f1, r.test_macro_f1
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub counts: BTreeMap<String, usize>,
    pub dropped: DropCounts,
    /// SHA-256 of every written file, keyed by path relative to the output directory.
    pub files: BTreeMap<String, String>,
}

struct Writer<'a> {
    root: &'a Path,
    files: BTreeMap<String, String>,
}

impl Writer<'_> {
    fn path(&self, rel: &str) -> Result<PathBuf, PipelineError> {
        let p = self.root.join(rel);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)
                .map_err(|source| PipelineError::Io { stage: "write", path: dir.to_path_buf(), source })?;
        }
        Ok(p)
    }

    fn record(&mut self, rel: &str, bytes: &[u8]) {
        self.files.insert(rel.to_string(), hex::encode(Sha256::digest(bytes)));
    }

    fn text(&mut self, rel: &str, content: &str) -> Result<(), PipelineError> {
        let p = self.path(rel)?;
        fs::write(&p, content).map_err(|source| PipelineError::Io { stage: "write", path: p, source })?;
        self.record(rel, content.as_bytes());
        Ok(())
    }

    fn corpus(&mut self, rel: &str, corpus: &[LabeledUtterance]) -> Result<(), PipelineError> {
        let p = self.path(rel)?;
        write_jsonl(corpus, &p).map_err(|e| PipelineError::Io {
            stage: "write",
            path: p.clone(),
            source: std::io::Error::other(e.to_string()),
        })?;
        let bytes = fs::read(&p).map_err(|source| PipelineError::Io { stage: "write", path: p, source })?;
        self.record(rel, &bytes);
        Ok(())
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Writes corpora, models, reports, tables and the manifest under `output_dir`.
pub fn write_outputs(outcome: &ExperimentOutcome, config: &ExperimentConfig) -> Result<(), PipelineError> {
    let mut w = Writer { root: &config.output_dir, files: BTreeMap::new() };
    let d = &outcome.data;
    w.corpus("corpora/es_indomain.train.jsonl", &d.split.train)?;
    w.corpus("corpora/es_indomain.validation.jsonl", &d.split.validation)?;
    w.corpus("corpora/es_indomain.test.jsonl", &d.split.test)?;
    w.corpus("corpora/ldc.jsonl", &d.ldc)?;
    w.corpus("corpora/opensubtitle.selected.jsonl", &d.selected)?;
    w.corpus("corpora/augmented.jsonl", &d.augmented)?;
    w.corpus("corpora/es_train.jsonl", &d.es_train)?;
    w.corpus("corpora/en_converted.jsonl", &d.en_converted)?;
    if !d.selection_scores.is_empty() {
        w.text("selection_scores.tsv", &score_report(&d.selection_scores))?;
    }

    let mut named = Vec::new();
    let hists: Vec<(&str, _)> = [
        ("in_domain_train", &d.split.train),
        ("ldc_selected", &d.training_set(DataRow::LdcSelected)),
        ("augmented", &d.augmented),
    ]
    .into_iter()
    .filter_map(|(n, c)| histogram(c).ok().map(|h| (n, h)))
    .collect();
    for (n, h) in &hists {
        named.push((*n, h));
    }
    w.text("terminal_histograms.tsv", &histogram_report(&named))?;

    for row in &outcome.rows {
        let id = row.kind.id();
        w.text(&format!("models/{id}.json"), &row.model.to_json())?;
        w.text(&format!("reports/{id}.json"), &pretty(&row.report))?;
    }
    let results = outcome.results();
    w.text("results.md", &results_markdown(&results))?;
    w.text("results.tsv", &results_tsv(&results))?;

    let counts: BTreeMap<String, usize> = [
        ("es_indomain.train", d.split.train.len()),
        ("es_indomain.validation", d.split.validation.len()),
        ("es_indomain.test", d.split.test.len()),
        ("ldc", d.ldc.len()),
        ("opensubtitle.selected", d.selected.len()),
        ("augmented", d.augmented.len()),
        ("es_train", d.es_train.len()),
        ("en_converted", d.en_converted.len()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        counts,
        dropped: d.drops.clone(),
        files: w.files.clone(),
    };
    w.text("manifest.json", &pretty(&manifest))?;
    Ok(())
}
