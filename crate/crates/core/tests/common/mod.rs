//! Helpers shared by the integration tests: random generators and an independent
//! Witten-Bell reference model written directly from the textbook recursion.

#![allow(dead_code)]

use std::collections::HashMap;

use punct_restore::corpus::{LabeledUtterance, PunctClass};
use rand::Rng;

pub const ALPHABET: &[char] = &[
    'a', 'b', 'e', 'o', 's', 'n', 'ñ', 'á', 'é', 'ú', 'ü', 'Q', 'Z', '3', '7', '0',
];
/// May appear inside a token but never at its ends (except `-`).
pub const INNER: &[char] = &['-', ',', '.', '\'', '?', '¡', '%', '@', '/'];

/// A token that extraction could have produced.
pub fn random_token<R: Rng>(rng: &mut R) -> String {
    let len = rng.gen_range(1..=7);
    let mut chars: Vec<char> = (0..len).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())]).collect();
    if len >= 3 && rng.gen_bool(0.2) {
        let at = rng.gen_range(1..len - 1);
        chars[at] = INNER[rng.gen_range(0..INNER.len())];
    }
    if rng.gen_bool(0.03) {
        chars.push('-');
    }
    chars.into_iter().collect()
}

pub fn random_label<R: Rng>(rng: &mut R) -> PunctClass {
    if rng.gen_bool(0.5) {
        PunctClass::None
    } else {
        PunctClass::ALL[rng.gen_range(0..PunctClass::COUNT)]
    }
}

pub fn random_utterance<R: Rng>(rng: &mut R, max_len: usize) -> LabeledUtterance {
    let n = rng.gen_range(1..=max_len);
    let tokens = (0..n).map(|_| random_token(rng)).collect();
    let labels = (0..n).map(|_| random_label(rng)).collect();
    LabeledUtterance::new(tokens, labels).unwrap()
}

/// English-convention labels: no opening or full marks.
pub fn random_english_labels<R: Rng>(rng: &mut R, max_len: usize) -> Vec<PunctClass> {
    use PunctClass::*;
    let choices = [None, None, None, None, Comma, Period, CloseQuestion, CloseExclamation];
    (0..rng.gen_range(1..=max_len)).map(|_| choices[rng.gen_range(0..choices.len())]).collect()
}

const BOS: &str = "<s>";
const EOS: &str = "</s>";
const UNK: &str = "<unk>";

/// Reference interpolated Witten-Bell model over string n-grams.
pub struct WittenBell {
    order: usize,
    vocab: Vec<String>,
    /// n-gram (history.., word) → count, for every history length below `order`.
    counts: HashMap<Vec<String>, u64>,
    /// history → (total continuations, distinct continuations)
    history: HashMap<Vec<String>, (u64, u64)>,
}

fn words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.to_lowercase().trim_matches(|c: char| !c.is_alphanumeric()).to_string())
        .filter(|w| !w.is_empty())
        .collect()
}

impl WittenBell {
    pub fn train(lines: &[String], order: usize) -> WittenBell {
        let mut freq: HashMap<String, u64> = HashMap::new();
        for l in lines {
            for w in words(l) {
                *freq.entry(w).or_default() += 1;
            }
        }
        let mut vocab: Vec<String> = freq.iter().filter(|(_, c)| **c > 1).map(|(w, _)| w.clone()).collect();
        vocab.sort();
        let mut m = WittenBell { order, vocab, counts: HashMap::new(), history: HashMap::new() };
        for l in lines {
            let padded = m.pad(l);
            for i in order - 1..padded.len() {
                for k in 0..order {
                    let gram = padded[i - k..=i].to_vec();
                    *m.counts.entry(gram).or_default() += 1;
                }
            }
        }
        let mut distinct: HashMap<Vec<String>, (u64, u64)> = HashMap::new();
        for (gram, c) in &m.counts {
            let h = gram[..gram.len() - 1].to_vec();
            let e = distinct.entry(h).or_default();
            e.0 += c;
            e.1 += 1;
        }
        m.history = distinct;
        m
    }

    fn pad(&self, line: &str) -> Vec<String> {
        let mut v = vec![BOS.to_string(); self.order - 1];
        for w in words(line) {
            v.push(if self.vocab.binary_search(&w).is_ok() { w } else { UNK.to_string() });
        }
        v.push(EOS.to_string());
        v
    }

    /// Number of outcomes: known words, unknown, end of sentence.
    pub fn outcomes(&self) -> usize {
        self.vocab.len() + 2
    }

    pub fn prob(&self, history: &[String], word: &str) -> f64 {
        match history.split_first() {
            None => match self.history.get(&Vec::new()) {
                Some(&(total, types)) => {
                    let c = self.counts.get(&vec![word.to_string()]).copied().unwrap_or(0);
                    (c as f64 + types as f64 / self.outcomes() as f64) / (total + types) as f64
                }
                None => 1.0 / self.outcomes() as f64,
            },
            Some((_, shorter)) => {
                let lower = self.prob(shorter, word);
                match self.history.get(history) {
                    Some(&(total, types)) => {
                        let mut gram = history.to_vec();
                        gram.push(word.to_string());
                        let c = self.counts.get(&gram).copied().unwrap_or(0);
                        (c as f64 + types as f64 * lower) / (total + types) as f64
                    }
                    None => lower,
                }
            }
        }
    }

    pub fn perplexity(&self, line: &str) -> f64 {
        let padded = self.pad(line);
        let h = self.order - 1;
        let mut log = 0.0;
        for i in h..padded.len() {
            log += self.prob(&padded[i - h..i], &padded[i]).ln();
        }
        (-log / (padded.len() - h) as f64).exp()
    }
}

/// Stable brute-force ranking: indices of the `k` lowest scores, in pool order.
pub fn brute_force_select(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    // insertion sort keeps equal scores in pool order
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && scores[idx[j - 1]] > scores[idx[j]] {
            idx.swap(j - 1, j);
            j -= 1;
        }
    }
    let mut chosen = idx[..k].to_vec();
    chosen.sort_unstable();
    chosen
}
