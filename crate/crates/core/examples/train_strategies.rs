//! Trains the four Spanish/English combinations on the synthetic benchmark and
//! compares them on held-out Spanish.
//!
//!     cargo run --release --example train_strategies

use punct_restore::corpus::label_raw;
use punct_restore::crosslingual::anglicize_to_spanish_conventions;
use punct_restore::evaluate::{evaluate, split_corpus, DEFAULT_FRACTIONS};
use punct_restore::synthetic::{BenchmarkSize, BilingualBenchmark};
use punct_restore::tagger::{run_strategy, Perceptron, Strategy, TrainConfig};
use punct_restore::{LabeledUtterance, RawUtterance};

fn labeled(raw: &[RawUtterance]) -> Vec<LabeledUtterance> {
    raw.iter().filter_map(|r| label_raw(r).ok()).map(LabeledUtterance::lowercased).collect()
}

fn main() {
    let b = BilingualBenchmark::generate(BenchmarkSize::default(), 5);
    let es = labeled(&b.es_indomain);
    let en: Vec<LabeledUtterance> =
        labeled(&b.en_indomain).iter().map(|u| anglicize_to_spanish_conventions(u).unwrap()).collect();
    let split = split_corpus(&es, DEFAULT_FRACTIONS, 5).unwrap();
    let config = TrainConfig { epochs: 5, seed: 5, shuffle: true };

    for strategy in Strategy::ALL {
        let model = run_strategy(&Perceptron, strategy, &split.train, &en, &config).unwrap();
        let report = evaluate(&model, &split.test, true).unwrap();
        println!("{:<12} micro-F1 {:.1}", strategy.display_label(), 100.0 * report.micro_f1_non_none);
    }
}
