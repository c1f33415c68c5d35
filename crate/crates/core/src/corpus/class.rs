use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The two kinds of Spanish paired marks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairKind {
    Question,
    Exclamation,
}

impl PairKind {
    pub fn opening_mark(self) -> char {
        match self {
            PairKind::Question => '¿',
            PairKind::Exclamation => '¡',
        }
    }

    pub fn closing_mark(self) -> char {
        match self {
            PairKind::Question => '?',
            PairKind::Exclamation => '!',
        }
    }
}

/// Per-token punctuation label.
///
/// The declaration order is the canonical label-set order used by the tagger,
/// so `None` comes first and wins argmax ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PunctClass {
    #[default]
    None,
    Comma,
    Period,
    OpenQuestion,
    CloseQuestion,
    FullQuestion,
    OpenExclamation,
    CloseExclamation,
    FullExclamation,
}

impl PunctClass {
    pub const COUNT: usize = 9;

    pub const ALL: [PunctClass; PunctClass::COUNT] = [
        PunctClass::None,
        PunctClass::Comma,
        PunctClass::Period,
        PunctClass::OpenQuestion,
        PunctClass::CloseQuestion,
        PunctClass::FullQuestion,
        PunctClass::OpenExclamation,
        PunctClass::CloseExclamation,
        PunctClass::FullExclamation,
    ];

    /// Position in [`PunctClass::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<PunctClass> {
        PunctClass::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            PunctClass::None => "NONE",
            PunctClass::Comma => "COMMA",
            PunctClass::Period => "PERIOD",
            PunctClass::OpenQuestion => "OPEN_QUESTION",
            PunctClass::CloseQuestion => "CLOSE_QUESTION",
            PunctClass::FullQuestion => "FULL_QUESTION",
            PunctClass::OpenExclamation => "OPEN_EXCLAMATION",
            PunctClass::CloseExclamation => "CLOSE_EXCLAMATION",
            PunctClass::FullExclamation => "FULL_EXCLAMATION",
        }
    }

    pub fn open(kind: PairKind) -> PunctClass {
        match kind {
            PairKind::Question => PunctClass::OpenQuestion,
            PairKind::Exclamation => PunctClass::OpenExclamation,
        }
    }

    pub fn close(kind: PairKind) -> PunctClass {
        match kind {
            PairKind::Question => PunctClass::CloseQuestion,
            PairKind::Exclamation => PunctClass::CloseExclamation,
        }
    }

    pub fn full(kind: PairKind) -> PunctClass {
        match kind {
            PairKind::Question => PunctClass::FullQuestion,
            PairKind::Exclamation => PunctClass::FullExclamation,
        }
    }

    /// The paired-mark kind this label takes part in, if any.
    pub fn pair_kind(self) -> Option<PairKind> {
        match self {
            PunctClass::OpenQuestion | PunctClass::CloseQuestion | PunctClass::FullQuestion => {
                Some(PairKind::Question)
            }
            PunctClass::OpenExclamation
            | PunctClass::CloseExclamation
            | PunctClass::FullExclamation => Some(PairKind::Exclamation),
            _ => None,
        }
    }

    pub fn is_opening(self) -> bool {
        matches!(self, PunctClass::OpenQuestion | PunctClass::OpenExclamation)
    }

    pub fn is_closing(self) -> bool {
        matches!(self, PunctClass::CloseQuestion | PunctClass::CloseExclamation)
    }

    pub fn is_full(self) -> bool {
        matches!(self, PunctClass::FullQuestion | PunctClass::FullExclamation)
    }

    /// Period, closing and full marks: the labels that end a sentence.
    pub fn is_terminating(self) -> bool {
        self == PunctClass::Period || self.is_closing() || self.is_full()
    }

    /// Mark written before the token.
    pub fn leading_mark(self) -> Option<char> {
        match self {
            PunctClass::OpenQuestion | PunctClass::FullQuestion => Some('¿'),
            PunctClass::OpenExclamation | PunctClass::FullExclamation => Some('¡'),
            _ => None,
        }
    }

    /// Mark written after the token.
    pub fn trailing_mark(self) -> Option<char> {
        match self {
            PunctClass::Comma => Some(','),
            PunctClass::Period => Some('.'),
            PunctClass::CloseQuestion | PunctClass::FullQuestion => Some('?'),
            PunctClass::CloseExclamation | PunctClass::FullExclamation => Some('!'),
            _ => None,
        }
    }
}

impl fmt::Display for PunctClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown punctuation class `{0}`")]
pub struct UnknownClass(pub String);

impl FromStr for PunctClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PunctClass::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| UnknownClass(s.to_string()))
    }
}
