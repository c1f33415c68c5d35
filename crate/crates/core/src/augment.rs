//! Terminating-punctuation histograms and concatenation augmentation.
//!
//! Out-of-domain corpora are mostly one sentence per line, while endpointed ASR
//! utterances often hold several sentences. [`augment_to_distribution`] concatenates
//! consecutive (shuffled) source utterances so that the number of sentence-ending
//! marks per output utterance follows a target histogram, usually measured on
//! in-domain data with [`histogram`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::LabeledUtterance;

pub const DEFAULT_MAX_TOKENS: usize = 200;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AugmentError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("source utterance {index} has no terminating punctuation")]
    ZeroTerminalSource { index: usize },
    #[error("target histogram puts mass on zero terminators or has no mass")]
    BadTarget,
}

/// Number of sentence-ending labels in the utterance.
pub fn terminal_count(u: &LabeledUtterance) -> usize {
    u.labels().iter().filter(|l| l.is_terminating()).count()
}

/// Empirical distribution of terminator counts per utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalHistogram {
    buckets: BTreeMap<usize, f64>,
    sample_size: usize,
}

impl TerminalHistogram {
    /// Builds a histogram from explicit masses, normalizing them to sum to one.
    /// Zero-mass entries are dropped.
    pub fn from_masses(masses: impl IntoIterator<Item = (usize, f64)>) -> Option<TerminalHistogram> {
        let mut buckets: BTreeMap<usize, f64> = BTreeMap::new();
        for (k, m) in masses {
            if m < 0.0 || !m.is_finite() {
                return None;
            }
            if m > 0.0 {
                *buckets.entry(k).or_default() += m;
            }
        }
        let total: f64 = buckets.values().sum();
        if total <= 0.0 {
            return None;
        }
        buckets.values_mut().for_each(|m| *m /= total);
        Some(TerminalHistogram { buckets, sample_size: 0 })
    }

    pub fn buckets(&self) -> &BTreeMap<usize, f64> {
        &self.buckets
    }

    pub fn mass(&self, count: usize) -> f64 {
        self.buckets.get(&count).copied().unwrap_or(0.0)
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn mean(&self) -> f64 {
        self.buckets.iter().map(|(k, m)| *k as f64 * m).sum()
    }
}

pub fn histogram(corpus: &[LabeledUtterance]) -> Result<TerminalHistogram, AugmentError> {
    if corpus.is_empty() {
        return Err(AugmentError::EmptyCorpus);
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for u in corpus {
        *counts.entry(terminal_count(u)).or_default() += 1;
    }
    let n = corpus.len() as f64;
    Ok(TerminalHistogram {
        buckets: counts.into_iter().map(|(k, c)| (k, c as f64 / n)).collect(),
        sample_size: corpus.len(),
    })
}

/// L1 distance over the union of bucket keys.
pub fn distribution_distance(a: &TerminalHistogram, b: &TerminalHistogram) -> f64 {
    let mut keys: Vec<usize> = a.buckets.keys().chain(b.buckets.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    keys.iter().map(|k| (a.mass(*k) - b.mass(*k)).abs()).sum()
}

/// Shuffled deck of bucket draws whose composition follows the target masses as
/// closely as integer counts allow (largest-remainder rounding).
fn quota_deck(target: &TerminalHistogram, terminals_left: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let size = ((terminals_left as f64 / target.mean()).round() as usize).max(1);
    let raw: Vec<(usize, f64)> =
        target.buckets.iter().map(|(k, m)| (*k, m * size as f64)).collect();
    let mut counts: Vec<usize> = raw.iter().map(|(_, r)| r.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut by_remainder: Vec<usize> = (0..raw.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = raw[a].1 - raw[a].1.floor();
        let rb = raw[b].1 - raw[b].1.floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in by_remainder.iter().take(size.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    let mut deck: Vec<usize> = raw
        .iter()
        .zip(&counts)
        .flat_map(|((k, _), c)| std::iter::repeat(*k).take(*c))
        .collect();
    deck.shuffle(rng);
    deck
}

/// Concatenates shuffled source utterances so the output terminator histogram
/// approaches `target`.
///
/// The source is shuffled with `seed`; then a target count `m` is drawn and source
/// utterances are taken in order until their terminators reach `m`, or until the
/// next one would push the concatenation past `max_tokens`. Every source utterance
/// lands in exactly one output. The last output may fall short of its draw.
///
/// Draws come from a seeded quota deck sized to the remaining terminators, so each
/// bucket is hit in proportion to its mass without multinomial noise.
pub fn augment_to_distribution(
    source: &[LabeledUtterance],
    target: &TerminalHistogram,
    seed: u64,
    max_tokens: usize,
) -> Result<Vec<LabeledUtterance>, AugmentError> {
    if target.buckets.is_empty() || target.mass(0) > 0.0 {
        return Err(AugmentError::BadTarget);
    }
    let terminals: Vec<usize> = source.iter().map(terminal_count).collect();
    if let Some(index) = terminals.iter().position(|&t| t == 0) {
        return Err(AugmentError::ZeroTerminalSource { index });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..source.len()).collect();
    order.shuffle(&mut rng);

    let mut terminals_left: usize = terminals.iter().sum();
    let mut deck: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    while next < order.len() {
        if deck.is_empty() {
            deck = quota_deck(target, terminals_left, &mut rng);
        }
        let want = deck.pop().expect("deck is never empty here");

        let mut acc = source[order[next]].clone();
        let mut got = terminals[order[next]];
        next += 1;
        while got < want && next < order.len() {
            let cand = &source[order[next]];
            if acc.len() + cand.len() > max_tokens {
                break;
            }
            acc.append(cand);
            got += terminals[order[next]];
            next += 1;
        }
        terminals_left -= got;
        out.push(acc);
    }
    Ok(out)
}

/// Two-column-per-histogram TSV comparing masses bucket by bucket.
pub fn histogram_report(named: &[(&str, &TerminalHistogram)]) -> String {
    let mut keys: Vec<usize> = named.iter().flat_map(|(_, h)| h.buckets.keys().copied()).collect();
    keys.sort_unstable();
    keys.dedup();
    let mut out = String::from("terminals");
    for (name, _) in named {
        let _ = write!(out, "\t{name}");
    }
    out.push('\n');
    for k in keys {
        let _ = write!(out, "{k}");
        for (_, h) in named {
            let _ = write!(out, "\t{:.6}", h.mass(k));
        }
        out.push('\n');
    }
    out
}
