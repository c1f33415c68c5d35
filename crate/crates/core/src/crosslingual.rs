//! Rewriting English-convention labels into Spanish conventions.
//!
//! English marks a question or exclamation only at its end. Spanish also opens it
//! with `¿` / `¡` at the start of the clause. The clause ("word chunk") is the run of
//! unpunctuated tokens leading up to the closing mark.

use crate::corpus::{LabeledUtterance, PunctClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConvertError {
    #[error("label {index} is already an opening or full mark")]
    AlreadySpanishConvention { index: usize },
}

/// Start of the chunk ending at `i`: one past the nearest earlier token carrying any
/// label other than NONE, or 0.
pub fn chunk_start(labels: &[PunctClass], i: usize) -> usize {
    labels[..i]
        .iter()
        .rposition(|l| *l != PunctClass::None)
        .map_or(0, |j| j + 1)
}

/// Adds the opening mark for every closing question/exclamation mark, in place.
pub fn open_chunks(labels: &mut [PunctClass]) {
    for i in 0..labels.len() {
        let Some(kind) = labels[i].pair_kind().filter(|_| labels[i].is_closing()) else {
            continue;
        };
        let j = chunk_start(labels, i);
        if j == i {
            labels[i] = PunctClass::full(kind);
        } else {
            labels[j] = PunctClass::open(kind);
        }
    }
}

/// Converts an English-convention labeled utterance to Spanish conventions.
pub fn anglicize_to_spanish_conventions(
    u: &LabeledUtterance,
) -> Result<LabeledUtterance, ConvertError> {
    if let Some(index) = u.labels().iter().position(|l| l.is_opening() || l.is_full()) {
        return Err(ConvertError::AlreadySpanishConvention { index });
    }
    let mut labels = u.labels().to_vec();
    open_chunks(&mut labels);
    Ok(u.with_labels(labels).expect("length unchanged"))
}

/// Drops opening marks and demotes full marks to closing ones.
pub fn strip_opening_marks(labels: &[PunctClass]) -> Vec<PunctClass> {
    labels
        .iter()
        .map(|l| match l {
            PunctClass::OpenQuestion | PunctClass::OpenExclamation => PunctClass::None,
            PunctClass::FullQuestion => PunctClass::CloseQuestion,
            PunctClass::FullExclamation => PunctClass::CloseExclamation,
            other => *other,
        })
        .collect()
}
