//! Corpus splits, per-class metrics and confusion matrices.
//!
//! The headline number is micro-F1 over punctuation tokens: NONE is background, so a
//! token counts only when its gold or predicted label is something else.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{LabeledUtterance, PunctClass};
use crate::postprocess::{repair_pairing, RepairPolicy};
use crate::tagger::{Tagger, TrainingRecord};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("fractions must be non-negative and sum to 1")]
    BadFractions,
    #[error("corpus needs at least 10 utterances to split, got {0}")]
    CorpusTooSmall(usize),
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("sequence lengths differ: {gold} gold vs {predicted} predicted")]
    LengthMismatch { gold: usize, predicted: usize },
}

pub const DEFAULT_FRACTIONS: (f64, f64, f64) = (0.6, 0.1, 0.3);

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<LabeledUtterance>,
    pub validation: Vec<LabeledUtterance>,
    pub test: Vec<LabeledUtterance>,
}

/// Seeded shuffle, then contiguous cuts at ⌊f₀·n⌋ and ⌊(f₀+f₁)·n⌋.
pub fn split_corpus(
    corpus: &[LabeledUtterance],
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<Split, EvalError> {
    let (a, b, c) = fractions;
    if [a, b, c].iter().any(|f| *f < 0.0 || !f.is_finite()) || (a + b + c - 1.0).abs() > 1e-9 {
        return Err(EvalError::BadFractions);
    }
    let n = corpus.len();
    if n < 10 {
        return Err(EvalError::CorpusTooSmall(n));
    }
    let mut shuffled = corpus.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    // small epsilon so that 0.6 * 10 lands on 6 rather than 5.999…
    let cut1 = ((a * n as f64) + 1e-9).floor() as usize;
    let cut2 = (((a + b) * n as f64) + 1e-9).floor() as usize;
    let test = shuffled.split_off(cut2.min(n));
    let validation = shuffled.split_off(cut1.min(shuffled.len()));
    Ok(Split { train: shuffled, validation, test })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// 9×9 counts indexed `[gold][predicted]` in [`PunctClass::ALL`] order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion(pub [[u64; PunctClass::COUNT]; PunctClass::COUNT]);

impl Confusion {
    pub fn add(&mut self, gold: PunctClass, predicted: PunctClass) {
        self.0[gold.index()][predicted.index()] += 1;
    }

    pub fn get(&self, gold: PunctClass, predicted: PunctClass) -> u64 {
        self.0[gold.index()][predicted.index()]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn row_sum(&self, gold: PunctClass) -> u64 {
        self.0[gold.index()].iter().sum()
    }

    pub fn col_sum(&self, predicted: PunctClass) -> u64 {
        self.0.iter().map(|row| row[predicted.index()]).sum()
    }

    /// Micro precision/recall/F1 over non-NONE labels, read straight off the matrix.
    pub fn micro_non_none(&self) -> (f64, f64, f64) {
        let none = PunctClass::None.index();
        let mut tp = 0u64;
        let mut pred_pos = 0u64;
        let mut gold_pos = 0u64;
        for g in 0..PunctClass::COUNT {
            for p in 0..PunctClass::COUNT {
                let c = self.0[g][p];
                if g == p && g != none {
                    tp += c;
                }
                if p != none {
                    pred_pos += c;
                }
                if g != none {
                    gold_pos += c;
                }
            }
        }
        let precision = ratio(tp, pred_pos);
        let recall = ratio(tp, gold_pos);
        (precision, recall, harmonic(precision, recall))
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub repaired: bool,
    pub tokens: u64,
    pub per_class: BTreeMap<PunctClass, ClassMetrics>,
    pub micro_precision_non_none: f64,
    pub micro_recall_non_none: f64,
    pub micro_f1_non_none: f64,
    pub macro_f1_non_none: f64,
    pub labels: Vec<PunctClass>,
    pub confusion: Confusion,
    pub training_log: Vec<TrainingRecord>,
}

/// Metrics from aligned gold/predicted label sequences.
pub fn score_sequences<'a>(
    pairs: impl IntoIterator<Item = (&'a [PunctClass], &'a [PunctClass])>,
    dataset: &str,
) -> Result<EvalReport, EvalError> {
    let mut confusion = Confusion::default();
    for (gold, predicted) in pairs {
        if gold.len() != predicted.len() {
            return Err(EvalError::LengthMismatch { gold: gold.len(), predicted: predicted.len() });
        }
        for (g, p) in gold.iter().zip(predicted) {
            confusion.add(*g, *p);
        }
    }
    if confusion.total() == 0 {
        return Err(EvalError::EmptyTestSet);
    }
    Ok(report_from_confusion(confusion, dataset))
}

fn report_from_confusion(confusion: Confusion, dataset: &str) -> EvalReport {
    let mut per_class = BTreeMap::new();
    let mut tp_sum = 0u64;
    let mut fp_sum = 0u64;
    let mut fn_sum = 0u64;
    let mut macro_terms = Vec::new();
    for c in PunctClass::ALL {
        let tp = confusion.get(c, c);
        let support = confusion.row_sum(c);
        let predicted = confusion.col_sum(c);
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = harmonic(precision, recall);
        per_class.insert(c, ClassMetrics { precision, recall, f1, support });
        if c != PunctClass::None {
            tp_sum += tp;
            fp_sum += predicted - tp;
            fn_sum += support - tp;
            if support > 0 {
                macro_terms.push(f1);
            }
        }
    }
    let micro_p = ratio(tp_sum, tp_sum + fp_sum);
    let micro_r = ratio(tp_sum, tp_sum + fn_sum);
    let macro_f1 = if macro_terms.is_empty() {
        0.0
    } else {
        macro_terms.iter().sum::<f64>() / macro_terms.len() as f64
    };
    EvalReport {
        dataset: dataset.to_string(),
        repaired: false,
        tokens: confusion.total(),
        per_class,
        micro_precision_non_none: micro_p,
        micro_recall_non_none: micro_r,
        micro_f1_non_none: harmonic(micro_p, micro_r),
        macro_f1_non_none: macro_f1,
        labels: PunctClass::ALL.to_vec(),
        confusion,
        training_log: Vec::new(),
    }
}

/// Labels every test utterance with `model`, optionally repairs pairing, and scores
/// against gold. Also returns the predicted sequences.
pub fn evaluate_with_predictions<T: Tagger + Sync>(
    model: &T,
    test: &[LabeledUtterance],
    repair: Option<RepairPolicy>,
    dataset: &str,
) -> Result<(EvalReport, Vec<Vec<PunctClass>>), EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    use rayon::prelude::*;
    let predictions: Vec<Vec<PunctClass>> = test
        .par_iter()
        .map(|u| {
            let raw = model.predict(u.tokens());
            match repair {
                Some(policy) => repair_pairing(&raw, policy),
                None => raw,
            }
        })
        .collect();
    let mut report = score_sequences(
        test.iter().zip(&predictions).map(|(u, p)| (u.labels(), p.as_slice())),
        dataset,
    )?;
    report.repaired = repair.is_some();
    report.training_log = model.training_log().to_vec();
    Ok((report, predictions))
}

pub fn evaluate<T: Tagger + Sync>(
    model: &T,
    test: &[LabeledUtterance],
    apply_repair: bool,
) -> Result<EvalReport, EvalError> {
    let policy = apply_repair.then_some(RepairPolicy::default());
    Ok(evaluate_with_predictions(model, test, policy, "test")?.0)
}

/// Rows and columns of a confusion matrix restricted to some classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionSlice {
    pub classes: Vec<PunctClass>,
    /// `[gold][predicted]`, in `classes` order.
    pub counts: Vec<Vec<u64>>,
}

pub fn confusion_slice(report: &EvalReport, classes: &[PunctClass]) -> ConfusionSlice {
    let counts = classes
        .iter()
        .map(|g| classes.iter().map(|p| report.confusion.get(*g, *p)).collect())
        .collect();
    ConfusionSlice { classes: classes.to_vec(), counts }
}

/// Like [`confusion_slice`] but takes class names.
pub fn confusion_slice_by_name(report: &EvalReport, names: &[&str]) -> Result<ConfusionSlice, EvalError> {
    let classes = names
        .iter()
        .map(|n| n.parse::<PunctClass>().map_err(|_| EvalError::UnknownClass(n.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(confusion_slice(report, &classes))
}

impl fmt::Display for ConfusionSlice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = "Gold \\ Prediction";
        let width = self
            .classes
            .iter()
            .map(|c| c.name().len())
            .chain([head.len()])
            .max()
            .unwrap_or(0);
        write!(f, "| {head:<width$} |")?;
        for c in &self.classes {
            write!(f, " {:>w$} |", c.name(), w = c.name().len())?;
        }
        writeln!(f)?;
        for (g, row) in self.classes.iter().zip(&self.counts) {
            write!(f, "| {:<width$} |", g.name())?;
            for (c, n) in self.classes.iter().zip(row) {
                write!(f, " {:>w$} |", n, w = c.name().len())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dataset: {}  tokens: {}  repair: {}", self.dataset, self.tokens, self.repaired)?;
        writeln!(f, "{:<18} {:>9} {:>9} {:>9} {:>8}", "class", "precision", "recall", "f1", "support")?;
        for (c, m) in &self.per_class {
            writeln!(
                f,
                "{:<18} {:>9.4} {:>9.4} {:>9.4} {:>8}",
                c.name(),
                m.precision,
                m.recall,
                m.f1,
                m.support
            )?;
        }
        writeln!(
            f,
            "micro (non-NONE): P {:.4}  R {:.4}  F1 {:.4}",
            self.micro_precision_non_none, self.micro_recall_non_none, self.micro_f1_non_none
        )?;
        writeln!(f, "macro F1 (non-NONE): {:.4}", self.macro_f1_non_none)
    }
}
