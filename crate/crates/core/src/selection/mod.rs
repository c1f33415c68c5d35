//! Perplexity-based data selection against an in-domain n-gram model.

mod ngram;

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

pub use ngram::{lm_tokens, train_ngram, LmOptions, NGramModel, TokenId};

use crate::corpus::RawUtterance;

#[derive(Debug, thiserror::Error)]
pub enum SelectionError {
    #[error("language model corpus is empty")]
    EmptyCorpus,
    #[error("n-gram order must be at least 1")]
    BadOrder,
    #[error("cannot select {k} utterances from a pool of {pool}")]
    KTooLarge { k: usize, pool: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Outcome of a selection run.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Selected utterances in pool order.
    pub selected: Vec<RawUtterance>,
    /// Pool indices of `selected`, ascending.
    pub indices: Vec<usize>,
    /// Perplexity of every pool utterance, by pool index.
    pub scores: Vec<f64>,
}

/// Scores every pool utterance (in parallel) and keeps the `k` with the lowest
/// perplexity. Ties go to the earlier pool index.
pub fn select_lowest_perplexity(
    model: &NGramModel,
    pool: &[RawUtterance],
    k: usize,
) -> Result<Selection, SelectionError> {
    if k > pool.len() {
        return Err(SelectionError::KTooLarge { k, pool: pool.len() });
    }
    let scores: Vec<f64> = pool.par_iter().map(|u| model.perplexity(u)).collect();
    let indices = lowest_k(&scores, k);
    let selected = indices.iter().map(|&i| pool[i].clone()).collect();
    Ok(Selection { selected, indices, scores })
}

/// Indices of the `k` smallest scores, returned in ascending index order.
pub fn lowest_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    let mut chosen = order[..k.min(order.len())].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Formats `x` with nine significant digits in positional notation.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// TSV with columns `pool_index` and `perplexity`.
pub fn score_report(scores: &[f64]) -> String {
    let mut out = String::from("pool_index\tperplexity\n");
    for (i, s) in scores.iter().enumerate() {
        let _ = writeln!(out, "{i}\t{}", format_sig9(*s));
    }
    out
}

pub fn write_score_report(scores: &[f64], path: impl AsRef<Path>) -> Result<(), SelectionError> {
    std::fs::write(path, score_report(scores))?;
    Ok(())
}
