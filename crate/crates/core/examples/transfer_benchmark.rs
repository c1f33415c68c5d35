//! Runs the synthetic bilingual benchmark in memory and prints both comparison tables.
//!
//!     cargo run --release --example transfer_benchmark -- [seed]

use punct_restore::pipeline::{results_markdown, run_in_memory, DataPaths, ExperimentConfig, RawCorpora};
use punct_restore::synthetic::{BenchmarkSize, BilingualBenchmark};

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let b = BilingualBenchmark::generate(BenchmarkSize::default(), seed);
    let raw = RawCorpora {
        es_indomain: b.es_indomain,
        ldc: b.ldc,
        opensubtitle_pool: b.opensubtitle_pool,
        en_indomain: b.en_indomain,
    };
    let paths = DataPaths {
        opensubtitle_pool: Some("opensubtitle.jsonl".into()),
        en_indomain: Some("en.jsonl".into()),
        ..Default::default()
    };
    let mut config = ExperimentConfig::new(paths, "out").with_seed(seed);
    config.selection.k = Some(1500);
    let t = std::time::Instant::now();
    let outcome = run_in_memory(&raw, &config).expect("benchmark runs");
    println!("{}", results_markdown(&outcome.results()));
    eprintln!("{:.1}s", t.elapsed().as_secs_f64());
}
