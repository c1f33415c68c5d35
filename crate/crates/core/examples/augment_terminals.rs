//! Concatenates single-sentence utterances until their terminator histogram matches a
//! multi-sentence target corpus.
//!
//!     cargo run --example augment_terminals

use punct_restore::augment::{augment_to_distribution, histogram, histogram_report, DEFAULT_MAX_TOKENS};
use punct_restore::corpus::label_raw;
use punct_restore::synthetic::{BenchmarkSize, BilingualBenchmark};

fn main() {
    let b = BilingualBenchmark::generate(BenchmarkSize::default(), 3);
    let labeled = |raw: &[punct_restore::RawUtterance]| raw.iter().filter_map(|r| label_raw(r).ok()).collect::<Vec<_>>();
    let target = labeled(&b.es_indomain);
    let source = labeled(&b.ldc);

    let target_hist = histogram(&target).unwrap();
    let augmented = augment_to_distribution(&source, &target_hist, 17, DEFAULT_MAX_TOKENS).unwrap();
    print!(
        "{}",
        histogram_report(&[
            ("source", &histogram(&source).unwrap()),
            ("target", &target_hist),
            ("augmented", &histogram(&augmented).unwrap()),
        ])
    );
    println!("{} utterances became {}", source.len(), augmented.len());
}
