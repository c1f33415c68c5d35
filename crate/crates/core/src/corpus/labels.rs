//! Conversion between punctuated text and labeled token sequences.

use super::class::PunctClass;
use super::utterance::{is_boundary_mark, LabeledUtterance};
use super::CorpusError;

const LEADING: [char; 2] = ['¿', '¡'];
const TRAILING: [char; 4] = ['?', '!', ',', '.'];

fn combine(token: &str, leading: Option<char>, trailing: Option<char>) -> Result<PunctClass, CorpusError> {
    let class = match (leading, trailing) {
        (None, None) => PunctClass::None,
        (None, Some(',')) => PunctClass::Comma,
        (None, Some('.')) => PunctClass::Period,
        (None, Some('?')) => PunctClass::CloseQuestion,
        (None, Some('!')) => PunctClass::CloseExclamation,
        (Some('¿'), None) => PunctClass::OpenQuestion,
        (Some('¿'), Some('?')) => PunctClass::FullQuestion,
        (Some('¡'), None) => PunctClass::OpenExclamation,
        (Some('¡'), Some('!')) => PunctClass::FullExclamation,
        _ => return Err(CorpusError::ConflictingMarks { token: token.to_string() }),
    };
    Ok(class)
}

struct Piece<'a> {
    leading: Vec<char>,
    core: &'a str,
    trailing: Vec<char>,
}

fn split_piece(piece: &str) -> Piece<'_> {
    let core_start = piece
        .char_indices()
        .find(|(_, c)| !LEADING.contains(c))
        .map_or(piece.len(), |(i, _)| i);
    let leading: Vec<char> = piece[..core_start].chars().collect();
    let rest = &piece[core_start..];
    let core_end = rest
        .char_indices()
        .rev()
        .find(|(_, c)| !TRAILING.contains(c))
        .map_or(0, |(i, c)| i + c.len_utf8());
    Piece { leading, core: &rest[..core_end], trailing: rest[core_end..].chars().collect() }
}

fn single(token: &str, marks: &[char]) -> Result<Option<char>, CorpusError> {
    match marks {
        [] => Ok(None),
        [c] => Ok(Some(*c)),
        _ => Err(CorpusError::ConflictingMarks { token: token.to_string() }),
    }
}

fn check_core(piece: &str, core: &str) -> Result<(), CorpusError> {
    for c in [core.chars().next(), core.chars().last()].into_iter().flatten() {
        if is_boundary_mark(c) {
            return Err(CorpusError::UnsupportedPunctuation { token: piece.to_string(), mark: c });
        }
    }
    Ok(())
}

/// Splits normalized punctuated text on whitespace and turns the marks attached to
/// each word into its label.
///
/// A mark written as its own whitespace-separated piece (`hola ,`) attaches to the
/// neighbouring word: trailing marks to the previous word, opening marks to the next.
pub fn extract_labels(text: &str) -> Result<LabeledUtterance, CorpusError> {
    let mut tokens: Vec<String> = Vec::new();
    // (leading, trailing) per token, resolved at the end.
    let mut marks: Vec<(Option<char>, Option<char>)> = Vec::new();
    let mut pending_leading: Option<char> = None;

    for piece in text.split_whitespace() {
        let Piece { leading, core, trailing } = split_piece(piece);
        let lead = single(piece, &leading)?;
        let trail = single(piece, &trailing)?;

        if core.is_empty() {
            match (lead, trail) {
                (Some(l), None) => {
                    if pending_leading.replace(l).is_some() {
                        return Err(CorpusError::ConflictingMarks { token: piece.to_string() });
                    }
                }
                (None, Some(t)) => {
                    let Some(last) = marks.last_mut() else {
                        return Err(CorpusError::UnsupportedPunctuation {
                            token: piece.to_string(),
                            mark: t,
                        });
                    };
                    if pending_leading.is_some() || last.1.replace(t).is_some() {
                        return Err(CorpusError::ConflictingMarks { token: piece.to_string() });
                    }
                }
                _ => return Err(CorpusError::ConflictingMarks { token: piece.to_string() }),
            }
            continue;
        }

        check_core(piece, core)?;
        let lead = match (pending_leading.take(), lead) {
            (Some(_), Some(_)) => {
                return Err(CorpusError::ConflictingMarks { token: piece.to_string() })
            }
            (a, b) => a.or(b),
        };
        tokens.push(core.to_string());
        marks.push((lead, trail));
    }

    if let Some(l) = pending_leading {
        return Err(CorpusError::UnsupportedPunctuation { token: l.to_string(), mark: l });
    }
    if tokens.is_empty() {
        return Err(CorpusError::EmptyUtterance);
    }
    let labels = tokens
        .iter()
        .zip(&marks)
        .map(|(t, (l, r))| combine(t, *l, *r))
        .collect::<Result<Vec<_>, _>>()?;
    LabeledUtterance::new(tokens, labels)
}

fn capitalize_first(token: &str) -> String {
    let mut chars = token.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Writes the utterance back as text, attaching marks per label and joining tokens
/// with single spaces. With `capitalize`, the first word and every word after a
/// sentence-ending label get an uppercase initial.
pub fn render(u: &LabeledUtterance, capitalize: bool) -> String {
    let mut out = String::new();
    let mut sentence_start = true;
    for (i, (token, label)) in u.tokens().iter().zip(u.labels()).enumerate() {
        if i > 0 {
            out.push(' ');
        }
        if let Some(m) = label.leading_mark() {
            out.push(m);
        }
        if capitalize && sentence_start {
            out.push_str(&capitalize_first(token));
        } else {
            out.push_str(token);
        }
        if let Some(m) = label.trailing_mark() {
            out.push(m);
        }
        sentence_start = label.is_terminating();
    }
    out
}
