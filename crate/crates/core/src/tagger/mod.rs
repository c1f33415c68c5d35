//! Token classifier, training strategies and oversampling.
//!
//! The built-in backend is an averaged perceptron decoded greedily left to right,
//! with the previous prediction feeding the next position. Anything implementing
//! [`TaggerBackend`] can stand in for it; [`run_strategy`] only talks to the trait.

mod features;
mod perceptron;

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use features::{featurize, word_shape, FEATURE_TEMPLATES, MAX_FEATURES};
pub use perceptron::{continue_train, train, TaggerModel, FORMAT_VERSION};

use crate::corpus::{LabeledUtterance, PunctClass};

#[derive(Debug, thiserror::Error)]
pub enum TaggerError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("epochs must be at least 1")]
    BadEpochs,
    #[error("model label set does not match")]
    LabelSetMismatch,
    #[error("strategy {0} needs English data")]
    MissingEnglishData(Strategy),
    #[error("target size {target} is smaller than the corpus ({len})")]
    TargetTooSmall { target: usize, len: usize },
    #[error("cannot load model: {0}")]
    ModelLoad(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    /// Reshuffle the corpus before every epoch.
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 5, seed: 0, shuffle: true }
    }
}

/// One training run as recorded in a model's log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingRecord {
    pub dataset: String,
    pub epochs: usize,
    pub seed: u64,
}

/// A trained model that labels token sequences.
pub trait Tagger {
    /// One label per token.
    fn predict(&self, tokens: &[String]) -> Vec<PunctClass>;

    fn training_log(&self) -> &[TrainingRecord];
}

/// Something that can train and fine-tune a [`Tagger`].
pub trait TaggerBackend {
    type Model: Tagger;

    fn train(
        &self,
        corpus: &[LabeledUtterance],
        tag: &str,
        config: &TrainConfig,
    ) -> Result<Self::Model, TaggerError>;

    fn continue_train(
        &self,
        model: &Self::Model,
        corpus: &[LabeledUtterance],
        tag: &str,
        config: &TrainConfig,
    ) -> Result<Self::Model, TaggerError>;
}

/// The built-in averaged perceptron.
#[derive(Debug, Clone, Copy, Default)]
pub struct Perceptron;

impl TaggerBackend for Perceptron {
    type Model = TaggerModel;

    fn train(
        &self,
        corpus: &[LabeledUtterance],
        tag: &str,
        config: &TrainConfig,
    ) -> Result<TaggerModel, TaggerError> {
        train(corpus, tag, config)
    }

    fn continue_train(
        &self,
        model: &TaggerModel,
        corpus: &[LabeledUtterance],
        tag: &str,
        config: &TrainConfig,
    ) -> Result<TaggerModel, TaggerError> {
        continue_train(model, corpus, tag, config)
    }
}

/// How Spanish and (converted) English data are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    EsOnly,
    EsThenEn,
    EnThenEs,
    Joint,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::EsOnly, Strategy::EsThenEn, Strategy::EnThenEs, Strategy::Joint];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::EsOnly => "ES_ONLY",
            Strategy::EsThenEn => "ES_THEN_EN",
            Strategy::EnThenEs => "EN_THEN_ES",
            Strategy::Joint => "JOINT",
        }
    }

    /// Label used in result tables.
    pub fn display_label(self) -> &'static str {
        match self {
            Strategy::EsOnly => "ES only",
            Strategy::EsThenEn => "ES->EN",
            Strategy::EnThenEs => "EN->ES",
            Strategy::Joint => "Joint EN,ES",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "esonly" | "es" => Ok(Strategy::EsOnly),
            "esthenen" | "esen" => Ok(Strategy::EsThenEn),
            "enthenes" | "enes" => Ok(Strategy::EnThenEs),
            "joint" | "jointenes" => Ok(Strategy::Joint),
            _ => Err(format!("unknown strategy `{s}`")),
        }
    }
}

pub const ES_TAG: &str = "es";
pub const EN_TAG: &str = "en";
pub const JOINT_TAG: &str = "es+en";

/// Trains according to `strategy`. English data must already follow Spanish
/// conventions (see [`crate::crosslingual`]).
pub fn run_strategy<B: TaggerBackend>(
    backend: &B,
    strategy: Strategy,
    es_data: &[LabeledUtterance],
    en_data: &[LabeledUtterance],
    config: &TrainConfig,
) -> Result<B::Model, TaggerError> {
    if es_data.is_empty() {
        return Err(TaggerError::EmptyCorpus);
    }
    if strategy != Strategy::EsOnly && en_data.is_empty() {
        return Err(TaggerError::MissingEnglishData(strategy));
    }
    match strategy {
        Strategy::EsOnly => backend.train(es_data, ES_TAG, config),
        Strategy::EsThenEn => {
            let m = backend.train(es_data, ES_TAG, config)?;
            backend.continue_train(&m, en_data, EN_TAG, config)
        }
        Strategy::EnThenEs => {
            let m = backend.train(en_data, EN_TAG, config)?;
            backend.continue_train(&m, es_data, ES_TAG, config)
        }
        Strategy::Joint => {
            let mut joint: Vec<LabeledUtterance> = es_data.iter().chain(en_data).cloned().collect();
            joint.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
            backend.train(&joint, JOINT_TAG, config)
        }
    }
}

/// Repeats `corpus` to `target_size`: whole copies plus a seeded sample of the
/// remainder, shuffled.
pub fn oversample(
    corpus: &[LabeledUtterance],
    target_size: usize,
    seed: u64,
) -> Result<Vec<LabeledUtterance>, TaggerError> {
    if corpus.is_empty() {
        return Err(TaggerError::EmptyCorpus);
    }
    if target_size < corpus.len() {
        return Err(TaggerError::TargetTooSmall { target: target_size, len: corpus.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let copies = target_size / corpus.len();
    let remainder = target_size % corpus.len();
    let mut out: Vec<LabeledUtterance> = Vec::with_capacity(target_size);
    for _ in 0..copies {
        out.extend_from_slice(corpus);
    }
    let mut extra = index::sample(&mut rng, corpus.len(), remainder).into_vec();
    extra.sort_unstable();
    out.extend(extra.into_iter().map(|i| corpus[i].clone()));
    out.shuffle(&mut rng);
    Ok(out)
}
