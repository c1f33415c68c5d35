use std::collections::HashMap;

use crate::corpus::RawUtterance;

use super::SelectionError;

/// Interned token. `UNK`, `EOS` and `BOS` are reserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenId(u32);

impl TokenId {
    pub const UNK: TokenId = TokenId(0);
    pub const EOS: TokenId = TokenId(1);
    pub const BOS: TokenId = TokenId(2);
    const FIRST_WORD: u32 = 3;
}

/// Text preparation and vocabulary options for the language model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LmOptions {
    pub order: usize,
    pub lowercase: bool,
    /// Trim non-alphanumeric characters from token ends; tokens left empty are dropped.
    pub strip_punctuation: bool,
    /// Training tokens seen this many times or fewer map to `UNK`.
    pub unk_threshold: u64,
}

impl LmOptions {
    pub fn with_order(order: usize) -> Self {
        LmOptions { order, ..LmOptions::default() }
    }
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { order: 4, lowercase: true, strip_punctuation: true, unk_threshold: 1 }
    }
}

/// Splits `text` into language-model tokens according to `opts`.
pub fn lm_tokens(text: &str, opts: &LmOptions) -> Vec<String> {
    text.split_whitespace()
        .map(|w| if opts.lowercase { w.to_lowercase() } else { w.to_string() })
        .map(|w| {
            if opts.strip_punctuation {
                w.trim_matches(|c: char| !c.is_alphanumeric()).to_string()
            } else {
                w
            }
        })
        .filter(|w| !w.is_empty())
        .collect()
}

#[derive(Debug, Clone, Default)]
struct ContextStats {
    total: u64,
    next: HashMap<TokenId, u64>,
}

/// N-gram language model with interpolated Witten-Bell smoothing.
///
/// `P(w | h) = (c(h, w) + T(h) · P(w | h')) / (c(h) + T(h))`, where `T(h)` is the number
/// of distinct words seen after `h` and `h'` drops the oldest word of `h`. The recursion
/// bottoms out in a uniform distribution over the vocabulary (known words, `UNK`, `EOS`).
/// Contexts never seen in training fall through to the shorter context.
#[derive(Debug, Clone)]
pub struct NGramModel {
    opts: LmOptions,
    vocab: HashMap<String, TokenId>,
    /// Indexed by context length, `0..order`.
    contexts: Vec<HashMap<Vec<TokenId>, ContextStats>>,
}

impl NGramModel {
    pub fn train(corpus: &[RawUtterance], opts: &LmOptions) -> Result<NGramModel, SelectionError> {
        if corpus.is_empty() {
            return Err(SelectionError::EmptyCorpus);
        }
        if opts.order == 0 {
            return Err(SelectionError::BadOrder);
        }
        let sentences: Vec<Vec<String>> = corpus.iter().map(|u| lm_tokens(&u.text, opts)).collect();

        let mut freq: HashMap<&str, u64> = HashMap::new();
        for s in &sentences {
            for w in s {
                *freq.entry(w.as_str()).or_default() += 1;
            }
        }
        let mut kept: Vec<&str> =
            freq.iter().filter(|(_, &c)| c > opts.unk_threshold).map(|(w, _)| *w).collect();
        kept.sort_unstable();
        let vocab: HashMap<String, TokenId> = kept
            .into_iter()
            .enumerate()
            .map(|(i, w)| (w.to_string(), TokenId(TokenId::FIRST_WORD + i as u32)))
            .collect();

        let mut model = NGramModel {
            opts: opts.clone(),
            vocab,
            contexts: vec![HashMap::new(); opts.order],
        };
        for s in &sentences {
            let ids = model.encode_sentence(s);
            for (i, &w) in ids.iter().enumerate().skip(opts.order - 1) {
                for k in 0..opts.order {
                    let ctx = ids[i - k..i].to_vec();
                    let stats = model.contexts[k].entry(ctx).or_default();
                    stats.total += 1;
                    *stats.next.entry(w).or_default() += 1;
                }
            }
        }
        Ok(model)
    }

    pub fn order(&self) -> usize {
        self.opts.order
    }

    pub fn options(&self) -> &LmOptions {
        &self.opts
    }

    pub fn encode(&self, word: &str) -> TokenId {
        self.vocab.get(word).copied().unwrap_or(TokenId::UNK)
    }

    /// BOS padding, the words, then EOS.
    fn encode_sentence(&self, words: &[String]) -> Vec<TokenId> {
        let mut ids = vec![TokenId::BOS; self.opts.order - 1];
        ids.extend(words.iter().map(|w| self.encode(w)));
        ids.push(TokenId::EOS);
        ids
    }

    /// Every token the model assigns probability to.
    pub fn predictable(&self) -> Vec<TokenId> {
        let mut v: Vec<TokenId> = self.vocab.values().copied().collect();
        v.push(TokenId::UNK);
        v.push(TokenId::EOS);
        v.sort_unstable();
        v
    }

    /// Contexts of length `k` observed in training.
    pub fn contexts(&self, k: usize) -> Vec<Vec<TokenId>> {
        let mut v: Vec<Vec<TokenId>> =
            self.contexts.get(k).map(|m| m.keys().cloned().collect()).unwrap_or_default();
        v.sort_unstable();
        v
    }

    /// `P(word | history)`; only the last `order - 1` entries of `history` are used.
    pub fn prob(&self, history: &[TokenId], word: TokenId) -> f64 {
        let mut p = 1.0 / (self.vocab.len() + 2) as f64;
        let max_k = history.len().min(self.opts.order - 1);
        for k in 0..=max_k {
            let ctx = &history[history.len() - k..];
            match self.contexts[k].get(ctx) {
                Some(stats) => {
                    let distinct = stats.next.len() as f64;
                    let c = stats.next.get(&word).copied().unwrap_or(0) as f64;
                    p = (c + distinct * p) / (stats.total as f64 + distinct);
                }
                None => break,
            }
        }
        p
    }

    /// Per-token perplexity of one utterance, counting EOS as a token.
    pub fn perplexity(&self, utterance: &RawUtterance) -> f64 {
        self.perplexity_of_text(&utterance.text)
    }

    pub fn perplexity_of_text(&self, text: &str) -> f64 {
        let ids = self.encode_sentence(&lm_tokens(text, &self.opts));
        let start = self.opts.order - 1;
        let log_sum: f64 =
            (start..ids.len()).map(|i| self.prob(&ids[i - start..i], ids[i]).ln()).sum();
        let n = (ids.len() - start) as f64;
        (-log_sum / n).exp()
    }
}

/// Trains with default text preparation at the given order.
pub fn train_ngram(corpus: &[RawUtterance], order: usize) -> Result<NGramModel, SelectionError> {
    NGramModel::train(corpus, &LmOptions::with_order(order))
}
