//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if any
//! criterion fails.
//!
//!     cargo test --release --test acceptance

mod common;

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use punct_restore::augment::{augment_to_distribution, distribution_distance, histogram, TerminalHistogram};
use punct_restore::corpus::{
    extract_labels, label_raw, normalize_punctuation, render, write_jsonl, LabeledUtterance, PunctClass,
};
use punct_restore::crosslingual::anglicize_to_spanish_conventions;
use punct_restore::evaluate::{evaluate, split_corpus, DEFAULT_FRACTIONS};
use punct_restore::pipeline::{
    run_experiment, serve_tcp, ExperimentConfig, RowKind,
};
use punct_restore::postprocess::{repair_pairing, validate_pairing, RepairPolicy};
use punct_restore::selection::{select_lowest_perplexity, LmOptions, NGramModel};
use punct_restore::synthetic::{rule_corpus, BenchmarkSize, BilingualBenchmark};
use punct_restore::tagger::{train, Strategy, TaggerModel, TrainConfig};
use punct_restore::RawUtterance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn same_up_to_whitespace(a: &str, b: &str) -> bool {
    a.split_whitespace().eq(b.split_whitespace())
}

fn round_trip_integrity() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    for _ in 0..10_000 {
        let u = random_utterance(&mut rng, 25);
        match extract_labels(&render(&u, false)) {
            Ok(back) if back == u => {}
            _ => failures += 1,
        }
    }

    let b = BilingualBenchmark::generate(
        BenchmarkSize { es_indomain: 400, ldc: 200, opensubtitle_pool: 400, en_indomain: 0, items_per_category: 60 },
        2,
    );
    let lines: Vec<String> = b
        .es_indomain
        .iter()
        .chain(&b.ldc)
        .chain(&b.opensubtitle_pool)
        .take(1000)
        .map(|r| normalize_punctuation(&r.text))
        .collect();
    let mut corpus_failures = 0;
    for s in &lines {
        match extract_labels(s) {
            Ok(u) if same_up_to_whitespace(&render(&u, false), s) => {}
            _ => corpus_failures += 1,
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        failures == 0 && corpus_failures == 0 && lines.len() == 1000 && secs < 10.0,
        format!("{failures}/10000 utterance failures, {corpus_failures}/{} corpus-line failures, {secs:.2}s (< 10s)", lines.len()),
    )
}

fn random_messy_string<R: Rng>(rng: &mut R) -> String {
    const POOL: &[&str] = &[
        "a", "ñ", "Sí", " ", " ", "  ", ".", "..", "...", "…", ":", ";", ",", "\"", "'", "«", "»", "“",
        "”", "‘", "’", "¿", "?", "¡", "!", "-", "(", ")", "3", "x",
    ];
    (0..rng.gen_range(0..40)).map(|_| POOL[rng.gen_range(0..POOL.len())]).collect()
}

fn normalization_conformance() -> Verdict {
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/normalization_golden.jsonl"))
        .expect("golden file");
    let mut cases = 0;
    let mut golden_failures = Vec::new();
    for line in golden.lines().filter(|l| !l.trim().is_empty()) {
        let v: Value = serde_json::from_str(line).unwrap();
        let (input, expected) = (v["input"].as_str().unwrap(), v["expected"].as_str().unwrap());
        cases += 1;
        if normalize_punctuation(input) != expected {
            golden_failures.push(input.to_string());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut idempotence_failures = 0;
    for _ in 0..10_000 {
        let s = random_messy_string(&mut rng);
        let once = normalize_punctuation(&s);
        if normalize_punctuation(&once) != once {
            idempotence_failures += 1;
        }
    }
    verdict(
        golden_failures.is_empty() && idempotence_failures == 0,
        format!(
            "{} of {cases} golden cases failed {:?}, {idempotence_failures}/10000 idempotence failures",
            golden_failures.len(),
            golden_failures
        ),
    )
}

fn cross_lingual_conversion() -> Verdict {
    let example = extract_labels("OK, how can I help you?").unwrap();
    let converted = render(&anglicize_to_spanish_conventions(&example).unwrap(), false);
    let example_ok = converted == "OK, ¿how can I help you?";

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    for _ in 0..10_000 {
        let labels = random_english_labels(&mut rng, 30);
        let tokens = (0..labels.len()).map(|i| format!("w{i}")).collect();
        let u = LabeledUtterance::new(tokens, labels.clone()).unwrap();
        let out = anglicize_to_spanish_conventions(&u).unwrap();
        let out = out.labels();
        let count = |ls: &[PunctClass], f: fn(&PunctClass) -> bool| ls.iter().filter(|l| f(l)).count();
        let closers_before = count(&labels, |l| l.is_closing());
        let closers_after = count(out, |l| l.is_closing() || l.is_full());
        let terminators_same = count(&labels, |l| l.is_terminating()) == count(out, |l| l.is_terminating());
        let commas_same = count(&labels, |l| *l == PunctClass::Comma) == count(out, |l| *l == PunctClass::Comma);
        if closers_before != closers_after || !terminators_same || !commas_same || !validate_pairing(out) {
            failures += 1;
        }
    }
    verdict(example_ok && failures == 0, format!("worked example -> `{converted}`, {failures}/10000 property failures"))
}

fn selection_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_rel = 0.0f64;
    let mut selection_mismatches = 0;
    let mut worst_sum = 0.0f64;
    let mut pools = 0;
    for (order, vocab_size, pool_size) in [(2, 8, 200), (3, 12, 600), (4, 20, 1000), (3, 20, 1000)] {
        let vocab: Vec<String> = (0..vocab_size).map(|i| format!("w{i}")).collect();
        let sentence = |rng: &mut ChaCha8Rng| -> String {
            let n = rng.gen_range(1..=8);
            (0..n).map(|_| vocab[rng.gen_range(0..vocab.len())].as_str()).collect::<Vec<_>>().join(" ")
        };
        let train_lines: Vec<String> = (0..300).map(|_| sentence(&mut rng)).collect();
        // one unseen word to exercise UNK
        let pool_lines: Vec<String> =
            (0..pool_size).map(|i| if i % 50 == 0 { format!("{} zzz", sentence(&mut rng)) } else { sentence(&mut rng) }).collect();

        let raw = |ls: &[String]| -> Vec<RawUtterance> { ls.iter().map(|l| RawUtterance::new(l.clone()).unwrap()).collect() };
        let model = NGramModel::train(&raw(&train_lines), &LmOptions::with_order(order)).unwrap();
        let oracle = WittenBell::train(&train_lines, order);
        let pool = raw(&pool_lines);

        let oracle_scores: Vec<f64> = pool_lines.iter().map(|l| oracle.perplexity(l)).collect();
        let full = select_lowest_perplexity(&model, &pool, pool.len()).unwrap();
        for (a, b) in full.scores.iter().zip(&oracle_scores) {
            worst_rel = worst_rel.max((a - b).abs() / b);
        }
        for k in 1..=pool.len() {
            let sel = select_lowest_perplexity(&model, &pool, k).unwrap();
            if sel.indices != brute_force_select(&oracle_scores, k) {
                selection_mismatches += 1;
            }
        }

        for k in 0..order {
            let mut contexts = model.contexts(k);
            contexts.push(vec![punct_restore::selection::TokenId::BOS; k]);
            for ctx in contexts {
                let sum: f64 = model.predictable().iter().map(|w| model.prob(&ctx, *w)).sum();
                worst_sum = worst_sum.max((sum - 1.0).abs());
            }
        }
        pools += 1;
    }
    verdict(
        worst_rel < 1e-9 && selection_mismatches == 0 && worst_sum < 1e-9,
        format!(
            "{pools} pools: max relative perplexity gap {worst_rel:.1e}, {selection_mismatches} k-values disagree, max |sum-1| {worst_sum:.1e} (< 1e-9)"
        ),
    )
}

fn single_terminator_corpus(n: usize, seed: u64) -> Vec<LabeledUtterance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ends = [PunctClass::Period, PunctClass::CloseQuestion, PunctClass::CloseExclamation];
    (0..n)
        .map(|_| {
            let len = rng.gen_range(2..=12);
            let tokens: Vec<String> = (0..len).map(|_| random_token(&mut rng)).collect();
            let mut labels = vec![PunctClass::None; len];
            if rng.gen_bool(0.3) {
                labels[rng.gen_range(0..len - 1)] = PunctClass::Comma;
            }
            labels[len - 1] = ends[rng.gen_range(0..ends.len())];
            LabeledUtterance::new(tokens, labels).unwrap()
        })
        .collect()
}

fn pairs(corpus: &[LabeledUtterance]) -> Vec<(String, PunctClass)> {
    let mut v: Vec<(String, PunctClass)> = corpus
        .iter()
        .flat_map(|u| u.tokens().iter().cloned().zip(u.labels().iter().copied()))
        .collect();
    v.sort();
    v
}

fn augmentation_convergence() -> Verdict {
    let start = Instant::now();
    let source = single_terminator_corpus(5000, 5);
    let target = TerminalHistogram::from_masses([(1, 0.35), (2, 0.25), (3, 0.2), (4, 0.12), (5, 0.08)]).unwrap();
    let source_pairs = pairs(&source);
    let source_tokens: usize = source.iter().map(LabeledUtterance::len).sum();
    let mut within = 0;
    let mut conserved = 0;
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let out = augment_to_distribution(&source, &target, seed, 200).unwrap();
        let d = distribution_distance(&histogram(&out).unwrap(), &target);
        worst = worst.max(d);
        if d < 0.05 {
            within += 1;
        }
        let tokens: usize = out.iter().map(LabeledUtterance::len).sum();
        if tokens == source_tokens && pairs(&out) == source_pairs {
            conserved += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        within >= 99 && conserved == 100 && secs < 30.0,
        format!("{within}/100 seeds with L1 < 0.05 (worst {worst:.4}), {conserved}/100 conserve tokens and labels, {secs:.1}s (< 30s)"),
    )
}

fn pairing_repair() -> Verdict {
    use PunctClass::*;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0;
    for _ in 0..100_000 {
        let n = rng.gen_range(1..=30);
        let labels: Vec<PunctClass> = (0..n).map(|_| random_label(&mut rng)).collect();
        for policy in [RepairPolicy::DropOpenInsertOpen, RepairPolicy::DropBoth] {
            let fixed = repair_pairing(&labels, policy);
            if fixed.len() != labels.len() || !validate_pairing(&fixed) {
                failures += 1;
            }
        }
    }
    let stated = repair_pairing(&[OpenQuestion, None, None], RepairPolicy::DropOpenInsertOpen) == [None, None, None];
    verdict(
        failures == 0 && stated,
        format!("{failures}/200000 invalid repairs, unmatched OPEN -> NONE case {}", if stated { "reproduced" } else { "differs" }),
    )
}

fn tagger_learnability() -> Verdict {
    let start = Instant::now();
    let corpus = rule_corpus(5000, 7);
    let split = split_corpus(&corpus, DEFAULT_FRACTIONS, 7).unwrap();
    let config = TrainConfig { epochs: 5, seed: 7, shuffle: true };
    let model = train(&split.train, "rules", &config).unwrap();
    let again = train(&split.train, "rules", &config).unwrap();
    let report = evaluate(&model, &split.test, false).unwrap();
    let deterministic = model.to_json() == again.to_json();
    let f1 = report.micro_f1_non_none;
    let secs = start.elapsed().as_secs_f64();
    verdict(
        f1 >= 0.95 && deterministic && secs < 60.0,
        format!(
            "micro-F1 {f1:.4} (>= 0.95) on {} held-out utterances after 5 epochs, identical retrain: {deterministic}, {secs:.1}s (< 60s)",
            split.test.len()
        ),
    )
}

fn write_benchmark(dir: &Path, seed: u64) -> ExperimentConfig {
    let b = BilingualBenchmark::generate(BenchmarkSize::default(), seed);
    write_jsonl(&b.es_indomain, dir.join("es_indomain.jsonl")).unwrap();
    write_jsonl(&b.ldc, dir.join("ldc.jsonl")).unwrap();
    write_jsonl(&b.opensubtitle_pool, dir.join("opensubtitle.jsonl")).unwrap();
    write_jsonl(&b.en_indomain, dir.join("en_indomain.jsonl")).unwrap();
    let config = serde_json::json!({
        "schema_version": 1,
        "data": {
            "es_indomain": "es_indomain.jsonl",
            "ldc": "ldc.jsonl",
            "opensubtitle_pool": "opensubtitle.jsonl",
            "en_indomain": "en_indomain.jsonl"
        },
        "selection": {"k": 1500},
        "augmentation": {"seed": seed, "max_tokens": 200},
        "tagger": {"epochs": 5, "seed": seed, "shuffle": true},
        "eval": {"repair": "DROP_OPEN_INSERT_OPEN", "seed": seed},
        "output_dir": "out"
    });
    let path = dir.join("experiment.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    ExperimentConfig::load(&path).unwrap()
}

fn directional_transfer() -> Verdict {
    let seeds = [1u64, 2, 3, 4, 5];
    let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
    for &seed in &seeds {
        let dir = tempfile::tempdir().unwrap();
        let config = write_benchmark(dir.path(), seed);
        let outcome = run_experiment(&config).unwrap();
        for row in &outcome.rows {
            *sums.entry(row.kind.id()).or_default() += 100.0 * row.result.test_micro_f1;
        }
    }
    let mean = |id: &str| sums[id] / seeds.len() as f64;
    let unaugmented = mean(RowKind::Data(punct_restore::pipeline::DataRow::LdcSelected).id());
    let augmented = mean("augmented");
    let es = mean(RowKind::Strategy(Strategy::EsOnly).id());
    let joint = mean("joint");
    let en_es = mean("en_then_es");
    let es_en = mean("es_then_en");
    let margins = [
        ("augmented - unaugmented", augmented - unaugmented),
        ("JOINT - ES_ONLY", joint - es),
        ("EN_THEN_ES - ES_ONLY", en_es - es),
        ("ES_ONLY - ES_THEN_EN", es - es_en),
    ];
    let pass = margins.iter().all(|(_, m)| *m >= 1.0);
    let detail = margins.iter().map(|(n, m)| format!("{n} = {m:+.2}")).collect::<Vec<_>>().join(", ");
    verdict(
        pass,
        format!(
            "mean micro-F1 over seeds {seeds:?}: LDC+sel {unaugmented:.1}, aug {augmented:.1}, ES {es:.1}, ES->EN {es_en:.1}, EN->ES {en_es:.1}, joint {joint:.1}; {detail} (each >= 1.0)"
        ),
    )
}

fn snapshot(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn end_to_end_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let config = write_benchmark(dir.path(), 9);
    run_experiment(&config).unwrap();
    let first = snapshot(&config.output_dir);
    std::fs::remove_dir_all(&config.output_dir).unwrap();
    run_experiment(&config).unwrap();
    let second = snapshot(&config.output_dir);
    let differing: Vec<&String> = first.keys().filter(|k| first.get(*k) != second.get(*k)).collect();
    let kinds = ["corpora/", "models/", "reports/"].iter().all(|p| first.keys().any(|k| k.starts_with(p)));
    verdict(
        differing.is_empty() && first.len() == second.len() && kinds,
        format!("{} files compared (corpora, models, reports, tables, manifest), {} differ {:?}", first.len(), differing.len(), differing),
    )
}

/// The batch composition the service must agree with, written out step by step.
fn batch_punctuate(model: &TaggerModel, text: &str) -> (String, Vec<PunctClass>) {
    let tokens = punct_restore::corpus::tokenize(text);
    let lowered: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let labels = repair_pairing(&model.predict(&lowered), RepairPolicy::default());
    let u = LabeledUtterance::new(tokens, labels.clone()).unwrap();
    (render(&u, true), labels)
}

fn serving_parity_and_latency() -> Verdict {
    let b = BilingualBenchmark::generate(BenchmarkSize { en_indomain: 0, ..BenchmarkSize::default() }, 10);
    let labeled: Vec<LabeledUtterance> = b.es_indomain.iter().chain(&b.ldc).filter_map(|r| label_raw(r).ok()).map(|u| u.lowercased()).collect();
    let split = split_corpus(&labeled, DEFAULT_FRACTIONS, 10).unwrap();
    let model = train(&split.train, "es", &TrainConfig::default()).unwrap();

    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let shared = Arc::new(model.clone());
    std::thread::spawn(move || serve_tcp(shared, RepairPolicy::default(), listener));
    let stream = TcpStream::connect(addr).unwrap();
    stream.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    stream.set_nodelay(true).unwrap();
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut writer = stream;
    let mut ask = |id: usize, text: &str| -> (Value, f64) {
        let req = serde_json::json!({"id": id.to_string(), "text": text}).to_string();
        let t = Instant::now();
        writer.write_all(req.as_bytes()).unwrap();
        writer.write_all(b"\n").unwrap();
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        (serde_json::from_str(&line).unwrap(), t.elapsed().as_secs_f64() * 1000.0)
    };

    let probes: Vec<String> = split.test.iter().take(500).map(|u| u.tokens().join(" ")).collect();
    let mut mismatches = 0;
    for (i, text) in probes.iter().enumerate() {
        let (resp, _) = ask(i, text);
        let (expected_text, expected_labels) = batch_punctuate(&model, text);
        let labels: Vec<PunctClass> = serde_json::from_value(resp["labels"].clone()).unwrap();
        if resp["id"] != i.to_string() || resp["text"] != expected_text || labels != expected_labels {
            mismatches += 1;
        }
    }

    // 1,000 sequential requests of up to 100 tokens
    let words: Vec<&String> = split.test.iter().flat_map(|u| u.tokens()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut latencies = Vec::with_capacity(1000);
    let mut longest = 0;
    for i in 0..1000 {
        let n = rng.gen_range(1..=100);
        let at = rng.gen_range(0..words.len() - n);
        let text = words[at..at + n].iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" ");
        longest = longest.max(n);
        let (resp, ms) = ask(10_000 + i, &text);
        assert!(resp.get("text").is_some());
        latencies.push(ms);
    }
    latencies.sort_by(f64::total_cmp);
    let p99 = latencies[(latencies.len() * 99).div_ceil(100) - 1];
    verdict(
        probes.len() == 500 && mismatches == 0 && p99 < 50.0,
        format!(
            "{mismatches}/{} responses differ from batch predict+repair+render; p99 round trip {p99:.2} ms (< 50 ms) over 1000 requests of <= {longest} tokens",
            probes.len()
        ),
    )
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; only a name filter matters.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [(&str, &str, fn() -> Verdict); 10] = [
        ("1", "round-trip integrity", round_trip_integrity),
        ("2", "normalization conformance", normalization_conformance),
        ("3", "cross-lingual conversion", cross_lingual_conversion),
        ("4", "selection oracle equivalence", selection_oracle),
        ("5", "augmentation convergence", augmentation_convergence),
        ("6", "pairing repair", pairing_repair),
        ("7", "tagger learnability", tagger_learnability),
        ("8", "directional transfer replication", directional_transfer),
        ("9", "end-to-end determinism", end_to_end_determinism),
        ("10", "serving parity and latency", serving_parity_and_latency),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        if filter.as_deref().is_some_and(|f| !name.contains(f) && f != id) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {id:>2} {name}: {} [{:.1}s]", v.detail, start.elapsed().as_secs_f64());
        if !v.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
