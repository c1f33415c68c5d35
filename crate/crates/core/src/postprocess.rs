//! Repair of unmatched paired marks in predicted label sequences.

use serde::{Deserialize, Serialize};

use crate::corpus::{PairKind, PunctClass};
use crate::crosslingual::chunk_start;

/// What to do with unmatched opening and closing marks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RepairPolicy {
    /// Unmatched openers become NONE; unmatched closers get an opener at the start
    /// of their chunk (or become FULL for a one-token chunk).
    #[default]
    DropOpenInsertOpen,
    /// Unmatched openers become NONE; unmatched closers become PERIOD.
    DropBoth,
}

/// True when every opener is closed by the same kind before any other paired mark,
/// every closer has its opener, and nothing nests.
pub fn validate_pairing(labels: &[PunctClass]) -> bool {
    let mut open: Option<PairKind> = None;
    for l in labels {
        let Some(kind) = l.pair_kind() else { continue };
        if l.is_opening() {
            if open.is_some() {
                return false;
            }
            open = Some(kind);
        } else if l.is_closing() {
            if open != Some(kind) {
                return false;
            }
            open = None;
        } else if open.is_some() {
            // full mark inside an open pair
            return false;
        }
    }
    open.is_none()
}

pub fn repair_pairing(labels: &[PunctClass], policy: RepairPolicy) -> Vec<PunctClass> {
    let mut out = labels.to_vec();
    let mut open: Option<(PairKind, usize)> = None;
    for i in 0..out.len() {
        let label = out[i];
        let Some(kind) = label.pair_kind() else { continue };
        if label.is_opening() {
            if let Some((_, j)) = open {
                out[j] = PunctClass::None;
            }
            open = Some((kind, i));
        } else if label.is_closing() {
            match open.take() {
                Some((k, _)) if k == kind => {}
                stale => {
                    if let Some((_, j)) = stale {
                        out[j] = PunctClass::None;
                    }
                    match policy {
                        RepairPolicy::DropOpenInsertOpen => {
                            let j = chunk_start(&out, i);
                            if j == i {
                                out[i] = PunctClass::full(kind);
                            } else {
                                out[j] = PunctClass::open(kind);
                            }
                        }
                        RepairPolicy::DropBoth => out[i] = PunctClass::Period,
                    }
                }
            }
        } else if let Some((_, j)) = open.take() {
            out[j] = PunctClass::None;
        }
    }
    if let Some((_, j)) = open {
        out[j] = PunctClass::None;
    }
    out
}
