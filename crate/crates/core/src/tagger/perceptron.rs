use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{featurize_lowered, lowercase_tokens, FEATURE_TEMPLATES};
use super::{Tagger, TaggerError, TrainConfig, TrainingRecord};
use crate::corpus::{LabeledUtterance, PunctClass};

pub const FORMAT_VERSION: u32 = 1;

const N: usize = PunctClass::COUNT;

/// Trained averaged-perceptron weights plus provenance.
///
/// Weight rows are indexed by position in `label_set`; argmax ties go to the
/// earlier label.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    label_set: Vec<PunctClass>,
    feature_templates: Vec<String>,
    weights: HashMap<String, [f64; N]>,
    training_log: Vec<TrainingRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: u32,
    label_set: Vec<PunctClass>,
    feature_templates: Vec<String>,
    weights: BTreeMap<String, BTreeMap<PunctClass, f64>>,
    training_log: Vec<TrainingRecord>,
}

impl TaggerModel {
    /// Model with no weights: predicts `label_set[0]` everywhere.
    pub fn empty() -> TaggerModel {
        TaggerModel {
            label_set: PunctClass::ALL.to_vec(),
            feature_templates: FEATURE_TEMPLATES.iter().map(|s| s.to_string()).collect(),
            weights: HashMap::new(),
            training_log: Vec::new(),
        }
    }

    pub fn label_set(&self) -> &[PunctClass] {
        &self.label_set
    }

    pub fn feature_templates(&self) -> &[String] {
        &self.feature_templates
    }

    pub fn weight(&self, feature: &str, label: PunctClass) -> f64 {
        let Some(pos) = self.label_set.iter().position(|l| *l == label) else { return 0.0 };
        self.weights.get(feature).map_or(0.0, |row| row[pos])
    }

    pub fn num_features(&self) -> usize {
        self.weights.len()
    }

    fn best(&self, features: &[String]) -> usize {
        let mut scores = [0.0; N];
        for f in features {
            if let Some(row) = self.weights.get(f) {
                for (s, w) in scores.iter_mut().zip(row) {
                    *s += w;
                }
            }
        }
        argmax(&scores)
    }

    pub fn predict(&self, tokens: &[String]) -> Vec<PunctClass> {
        let lowered = lowercase_tokens(tokens);
        let mut out = Vec::with_capacity(tokens.len());
        let mut prev = None;
        for i in 0..tokens.len() {
            let label = self.label_set[self.best(&featurize_lowered(tokens, &lowered, i, prev))];
            out.push(label);
            prev = Some(label);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let weights = self
            .weights
            .iter()
            .filter(|(_, row)| row.iter().any(|w| *w != 0.0))
            .map(|(f, row)| {
                let per_label = self
                    .label_set
                    .iter()
                    .zip(row)
                    .filter(|(_, w)| **w != 0.0)
                    .map(|(l, w)| (*l, *w))
                    .collect();
                (f.clone(), per_label)
            })
            .collect();
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            label_set: self.label_set.clone(),
            feature_templates: self.feature_templates.clone(),
            weights,
            training_log: self.training_log.clone(),
        };
        serde_json::to_string(&file).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<TaggerModel, TaggerError> {
        let file: ModelFile =
            serde_json::from_str(s).map_err(|e| TaggerError::ModelLoad(e.to_string()))?;
        if file.format_version != FORMAT_VERSION {
            return Err(TaggerError::ModelLoad(format!(
                "unsupported format_version {}",
                file.format_version
            )));
        }
        let mut sorted = file.label_set.clone();
        sorted.sort();
        if sorted != PunctClass::ALL {
            return Err(TaggerError::ModelLoad("label_set must list the nine classes once each".into()));
        }
        let known: Vec<String> = FEATURE_TEMPLATES.iter().map(|s| s.to_string()).collect();
        if file.feature_templates != known {
            return Err(TaggerError::ModelLoad("unknown feature templates".into()));
        }
        let weights = file
            .weights
            .into_iter()
            .map(|(f, per_label)| {
                let mut row = [0.0; N];
                for (l, w) in per_label {
                    let pos = file.label_set.iter().position(|x| *x == l).expect("checked above");
                    row[pos] = w;
                }
                (f, row)
            })
            .collect();
        Ok(TaggerModel {
            label_set: file.label_set,
            feature_templates: file.feature_templates,
            weights,
            training_log: file.training_log,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TaggerError> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TaggerModel, TaggerError> {
        let s = std::fs::read_to_string(path.as_ref())
            .map_err(|e| TaggerError::ModelLoad(format!("{}: {e}", path.as_ref().display())))?;
        TaggerModel::from_json(&s)
    }
}

impl Tagger for TaggerModel {
    fn predict(&self, tokens: &[String]) -> Vec<PunctClass> {
        TaggerModel::predict(self, tokens)
    }

    fn training_log(&self) -> &[TrainingRecord] {
        &self.training_log
    }
}

fn argmax(scores: &[f64; N]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

/// Perceptron weights with lazily maintained running sums for averaging.
///
/// After `step` instances the averaged weight is the mean of the weight vector as it
/// stood after each of the `step` instances.
pub(crate) struct AveragedPerceptron {
    index: HashMap<String, usize>,
    names: Vec<String>,
    weights: Vec<[f64; N]>,
    totals: Vec<[f64; N]>,
    stamps: Vec<[u64; N]>,
    step: u64,
}

impl AveragedPerceptron {
    fn from_model(model: &TaggerModel) -> AveragedPerceptron {
        let mut names: Vec<String> = model.weights.keys().cloned().collect();
        names.sort_unstable();
        let weights: Vec<[f64; N]> = names.iter().map(|n| model.weights[n]).collect();
        AveragedPerceptron {
            index: names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect(),
            totals: vec![[0.0; N]; names.len()],
            stamps: vec![[0; N]; names.len()],
            names,
            weights,
            step: 0,
        }
    }

    fn best(&self, features: &[String]) -> usize {
        let mut scores = [0.0; N];
        for f in features {
            if let Some(&idx) = self.index.get(f) {
                for (s, w) in scores.iter_mut().zip(&self.weights[idx]) {
                    *s += w;
                }
            }
        }
        argmax(&scores)
    }

    fn feature_index(&mut self, f: &str) -> usize {
        if let Some(&idx) = self.index.get(f) {
            return idx;
        }
        let idx = self.names.len();
        self.index.insert(f.to_string(), idx);
        self.names.push(f.to_string());
        self.weights.push([0.0; N]);
        self.totals.push([0.0; N]);
        self.stamps.push([0; N]);
        idx
    }

    fn nudge(&mut self, idx: usize, label: usize, delta: f64) {
        let elapsed = self.step - 1 - self.stamps[idx][label];
        self.totals[idx][label] += elapsed as f64 * self.weights[idx][label];
        self.stamps[idx][label] = self.step - 1;
        self.weights[idx][label] += delta;
    }

    /// Processes one token: predicts, and on a mistake moves weights toward `gold`.
    /// Returns the predicted label position.
    fn observe(&mut self, features: &[String], gold: usize) -> usize {
        self.step += 1;
        let guess = self.best(features);
        if guess != gold {
            for f in features {
                let idx = self.feature_index(f);
                self.nudge(idx, gold, 1.0);
                self.nudge(idx, guess, -1.0);
            }
        }
        guess
    }

    #[cfg(test)]
    pub(crate) fn current(&self) -> HashMap<String, [f64; N]> {
        self.names.iter().cloned().zip(self.weights.iter().copied()).collect()
    }

    fn averaged(&self) -> HashMap<String, [f64; N]> {
        let step = self.step as f64;
        self.names
            .iter()
            .enumerate()
            .filter_map(|(idx, name)| {
                let mut row = [0.0; N];
                for (l, r) in row.iter_mut().enumerate() {
                    let elapsed = (self.step - self.stamps[idx][l]) as f64;
                    *r = (self.totals[idx][l] + elapsed * self.weights[idx][l]) / step;
                }
                row.iter().any(|w| *w != 0.0).then(|| (name.clone(), row))
            })
            .collect()
    }
}

pub(crate) fn fit(
    start: &TaggerModel,
    corpus: &[LabeledUtterance],
    tag: &str,
    config: &TrainConfig,
    observer: &mut dyn FnMut(&AveragedPerceptron),
) -> Result<TaggerModel, TaggerError> {
    if corpus.is_empty() {
        return Err(TaggerError::EmptyCorpus);
    }
    if config.epochs == 0 {
        return Err(TaggerError::BadEpochs);
    }
    let mut p = AveragedPerceptron::from_model(start);
    let position: HashMap<PunctClass, usize> =
        start.label_set.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let lowered: Vec<Vec<String>> = corpus.iter().map(|u| lowercase_tokens(u.tokens())).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    for _ in 0..config.epochs {
        if config.shuffle {
            order.shuffle(&mut rng);
        }
        for &u in &order {
            let tokens = corpus[u].tokens();
            let mut prev = None;
            for (i, gold) in corpus[u].labels().iter().enumerate() {
                let feats = featurize_lowered(tokens, &lowered[u], i, prev);
                let guess = p.observe(&feats, position[gold]);
                observer(&p);
                prev = Some(start.label_set[guess]);
            }
        }
    }

    let mut training_log = start.training_log.clone();
    training_log.push(TrainingRecord { dataset: tag.to_string(), epochs: config.epochs, seed: config.seed });
    Ok(TaggerModel {
        label_set: start.label_set.clone(),
        feature_templates: start.feature_templates.clone(),
        weights: p.averaged(),
        training_log,
    })
}

/// Trains a fresh model on `corpus`, logging it under `tag`.
pub fn train(
    corpus: &[LabeledUtterance],
    tag: &str,
    config: &TrainConfig,
) -> Result<TaggerModel, TaggerError> {
    fit(&TaggerModel::empty(), corpus, tag, config, &mut |_| {})
}

/// Continues training from `model`'s weights.
pub fn continue_train(
    model: &TaggerModel,
    corpus: &[LabeledUtterance],
    tag: &str,
    config: &TrainConfig,
) -> Result<TaggerModel, TaggerError> {
    let mut sorted = model.label_set.clone();
    sorted.sort();
    if sorted != PunctClass::ALL {
        return Err(TaggerError::LabelSetMismatch);
    }
    fit(model, corpus, tag, config, &mut |_| {})
}
