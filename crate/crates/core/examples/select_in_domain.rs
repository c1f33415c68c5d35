//! Ranks an out-of-domain pool by perplexity under an in-domain 4-gram model and keeps
//! the closest lines.
//!
//!     cargo run --release --example select_in_domain

use punct_restore::selection::{select_lowest_perplexity, LmOptions, NGramModel};
use punct_restore::synthetic::{BenchmarkSize, BilingualBenchmark};

fn main() {
    let b = BilingualBenchmark::generate(BenchmarkSize::default(), 8);
    let lm = NGramModel::train(&b.es_indomain, &LmOptions::with_order(4)).unwrap();
    let pool = &b.opensubtitle_pool;
    let selection = select_lowest_perplexity(&lm, pool, 1500).unwrap();

    let mut ranked: Vec<usize> = (0..pool.len()).collect();
    ranked.sort_by(|&a, &b| selection.scores[a].total_cmp(&selection.scores[b]));
    println!("kept {} of {}", selection.selected.len(), pool.len());
    println!("closest:");
    for &i in &ranked[..5] {
        println!("  {:>9.2}  {}", selection.scores[i], pool[i].text);
    }
    println!("farthest:");
    for &i in &ranked[ranked.len() - 5..] {
        println!("  {:>9.2}  {}", selection.scores[i], pool[i].text);
    }
}
