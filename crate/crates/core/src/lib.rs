//! Spanish punctuation restoration for ASR transcripts.
//!
//! The crate covers the whole data pipeline around a per-token punctuation tagger:
//!
//! - [`corpus`]: the nine-way label scheme, normalization and text/label conversion
//! - [`selection`]: an interpolated Witten-Bell n-gram model and lowest-perplexity selection
//! - [`augment`]: terminating-punctuation histograms and concatenation augmentation
//! - [`crosslingual`]: English-to-Spanish punctuation convention conversion
//! - [`tagger`]: an averaged-perceptron tagger and the training strategies
//! - [`postprocess`]: repair of unmatched `¿ ?` / `¡ !` pairs
//! - [`evaluate`]: splits, per-class metrics and confusion matrices
//! - [`pipeline`]: experiment runner and the newline-delimited JSON service
//! - [`synthetic`]: rule-generated corpora for tests, examples and benchmarks

pub mod augment;
pub mod corpus;
pub mod crosslingual;
pub mod evaluate;
pub mod pipeline;
pub mod postprocess;
pub mod selection;
pub mod synthetic;
pub mod tagger;

pub use corpus::{LabeledUtterance, Lang, PunctClass, RawUtterance};
