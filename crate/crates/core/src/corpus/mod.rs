//! Utterance types, punctuation normalization and the text/label conversions.

mod class;
mod jsonl;
mod labels;
mod normalize;
mod utterance;

pub use class::{PairKind, PunctClass, UnknownClass};
pub use jsonl::{parse_jsonl, read_jsonl, write_jsonl};
pub use labels::{extract_labels, render};
pub use normalize::normalize_punctuation;
pub use utterance::{LabeledUtterance, Lang, RawUtterance};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("utterance text is empty")]
    EmptyText,
    #[error("utterance has no tokens")]
    EmptyUtterance,
    #[error("{tokens} tokens but {labels} labels")]
    LengthMismatch { tokens: usize, labels: usize },
    #[error("invalid token `{0}`")]
    InvalidToken(String),
    #[error("unsupported punctuation `{mark}` in `{token}`")]
    UnsupportedPunctuation { token: String, mark: char },
    #[error("conflicting marks on `{token}`")]
    ConflictingMarks { token: String },
    #[error("malformed record on line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Normalizes and labels a raw utterance, carrying its tags over.
pub fn label_raw(raw: &RawUtterance) -> Result<LabeledUtterance, CorpusError> {
    let mut u = extract_labels(&normalize_punctuation(&raw.text))?;
    u.source = raw.source.clone();
    u.lang = raw.lang;
    Ok(u)
}

/// Splits unpunctuated input into tokens, dropping any punctuation at token
/// boundaries. Used on the serving path, where input is raw ASR output.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(utterance::is_boundary_mark))
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}
