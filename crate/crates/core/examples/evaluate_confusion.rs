//! Full evaluation report plus a question-mark slice of the confusion matrix.
//!
//!     cargo run --release --example evaluate_confusion

use punct_restore::evaluate::{confusion_slice, evaluate, split_corpus, DEFAULT_FRACTIONS};
use punct_restore::synthetic::rule_corpus;
use punct_restore::tagger::{train, TrainConfig};
use punct_restore::PunctClass;

fn main() {
    let corpus = rule_corpus(2000, 1);
    let split = split_corpus(&corpus, DEFAULT_FRACTIONS, 1).unwrap();
    let model = train(&split.train, "rules", &TrainConfig::default()).unwrap();
    let report = evaluate(&model, &split.test, true).unwrap();
    print!("{report}");
    let classes = [PunctClass::OpenQuestion, PunctClass::CloseQuestion, PunctClass::FullQuestion, PunctClass::Period];
    print!("\n{}", confusion_slice(&report, &classes));
}
