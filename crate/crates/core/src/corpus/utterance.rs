use std::fmt;

use serde::{Deserialize, Serialize};

use super::class::PunctClass;
use super::CorpusError;

/// Corpus language tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    Es,
    En,
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lang::Es => "es",
            Lang::En => "en",
        })
    }
}

/// One endpointed utterance of raw (possibly punctuated) text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRecord")]
pub struct RawUtterance {
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lang: Option<Lang>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    text: String,
    source: Option<String>,
    lang: Option<Lang>,
}

impl TryFrom<RawRecord> for RawUtterance {
    type Error = CorpusError;

    fn try_from(r: RawRecord) -> Result<Self, Self::Error> {
        let mut u = RawUtterance::new(r.text)?;
        u.source = r.source;
        u.lang = r.lang;
        Ok(u)
    }
}

impl RawUtterance {
    pub fn new(text: impl Into<String>) -> Result<Self, CorpusError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(CorpusError::EmptyText);
        }
        Ok(RawUtterance { text, source: None, lang: None })
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn with_lang(mut self, lang: Lang) -> Self {
        self.lang = Some(lang);
        self
    }
}

/// Marks that become labels.
pub(crate) const SUPPORTED_MARKS: [char; 6] = ['¿', '?', '¡', '!', ',', '.'];

/// Punctuation rejected at a token boundary. Hyphens are allowed (disfluencies like
/// `que-`); other symbols such as `%`, `$` or `@` are ordinary token text.
pub(crate) const REJECTED_AT_BOUNDARY: &[char] = &[
    '(', ')', '[', ']', '{', '}', ':', ';', '"', '\'', '«', '»', '“', '”', '‘', '’', '…', '–',
    '—',
];

/// Characters that may never sit at either end of a token.
pub(crate) fn is_boundary_mark(c: char) -> bool {
    SUPPORTED_MARKS.contains(&c) || REJECTED_AT_BOUNDARY.contains(&c)
}

pub(crate) fn check_token(token: &str) -> Result<(), CorpusError> {
    let (Some(first), Some(last)) = (token.chars().next(), token.chars().last()) else {
        return Err(CorpusError::InvalidToken(token.to_string()));
    };
    if token.chars().any(char::is_whitespace)
        || is_boundary_mark(first)
        || is_boundary_mark(last)
    {
        return Err(CorpusError::InvalidToken(token.to_string()));
    }
    Ok(())
}

/// Token sequence with one punctuation label per token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LabeledRecord")]
pub struct LabeledUtterance {
    tokens: Vec<String>,
    labels: Vec<PunctClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lang: Option<Lang>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LabeledRecord {
    tokens: Vec<String>,
    labels: Vec<PunctClass>,
    source: Option<String>,
    lang: Option<Lang>,
}

impl TryFrom<LabeledRecord> for LabeledUtterance {
    type Error = CorpusError;

    fn try_from(r: LabeledRecord) -> Result<Self, Self::Error> {
        let mut u = LabeledUtterance::new(r.tokens, r.labels)?;
        u.source = r.source;
        u.lang = r.lang;
        Ok(u)
    }
}

impl LabeledUtterance {
    /// Validates lengths and token shape.
    pub fn new(tokens: Vec<String>, labels: Vec<PunctClass>) -> Result<Self, CorpusError> {
        if tokens.len() != labels.len() {
            return Err(CorpusError::LengthMismatch { tokens: tokens.len(), labels: labels.len() });
        }
        if tokens.is_empty() {
            return Err(CorpusError::EmptyUtterance);
        }
        for t in &tokens {
            check_token(t)?;
        }
        Ok(LabeledUtterance { tokens, labels, source: None, lang: None })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn labels(&self) -> &[PunctClass] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Replaces the labels, keeping tokens and tags.
    pub fn with_labels(&self, labels: Vec<PunctClass>) -> Result<Self, CorpusError> {
        if labels.len() != self.tokens.len() {
            return Err(CorpusError::LengthMismatch {
                tokens: self.tokens.len(),
                labels: labels.len(),
            });
        }
        Ok(LabeledUtterance { labels, ..self.clone() })
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn with_lang(mut self, lang: Lang) -> Self {
        self.lang = Some(lang);
        self
    }

    /// Appends `other`'s tokens and labels. Tags of `self` are kept.
    pub fn append(&mut self, other: &LabeledUtterance) {
        self.tokens.extend_from_slice(&other.tokens);
        self.labels.extend_from_slice(&other.labels);
    }

    /// Lowercases every token, as ASR output carries no case.
    pub fn lowercased(mut self) -> Self {
        for t in &mut self.tokens {
            *t = t.to_lowercase();
        }
        self
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<PunctClass>) {
        (self.tokens, self.labels)
    }
}
