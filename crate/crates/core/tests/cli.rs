use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use punct_restore::corpus::write_jsonl;
use punct_restore::synthetic::{BenchmarkSize, BilingualBenchmark};

fn punct(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_punct"))
        .args(args)
        .current_dir(dir)
        .env_remove("PUNCT_SEED")
        .output()
        .unwrap()
}

fn with_stdin(args: &[&str], dir: &Path, input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_punct"))
        .args(args)
        .current_dir(dir)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn small_benchmark(dir: &Path) {
    let size = BenchmarkSize { es_indomain: 300, ldc: 300, opensubtitle_pool: 400, en_indomain: 300, items_per_category: 30 };
    let b = BilingualBenchmark::generate(size, 4);
    write_jsonl(&b.es_indomain, dir.join("es.jsonl")).unwrap();
    write_jsonl(&b.ldc, dir.join("ldc.jsonl")).unwrap();
    write_jsonl(&b.opensubtitle_pool, dir.join("os.jsonl")).unwrap();
    write_jsonl(&b.en_indomain, dir.join("en.jsonl")).unwrap();
}

#[test]
fn normalize_and_extract_through_pipes() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_stdin(&["normalize"], dir.path(), "{\"text\": \"Dijo: «hola»...\"}\n");
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), r#"{"text":"Dijo, hola."}"#);

    let out = with_stdin(&["extract", "--lowercase"], dir.path(), "{\"text\": \"¿Qué tal? Bien.\"}\n{\"text\": \"¿¿mal\"}\n");
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.contains("\"qué\""));
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped 1 of 2"));

    let strict = with_stdin(&["extract", "--strict"], dir.path(), "{\"text\": \"¿¿mal\"}\n");
    assert_eq!(strict.status.code(), Some(3));
}

#[test]
fn convert_adds_opening_marks() {
    let dir = tempfile::tempdir().unwrap();
    let input = r#"{"tokens":["OK","how","can","I","help","you"],"labels":["COMMA","NONE","NONE","NONE","NONE","CLOSE_QUESTION"]}"#;
    let out = with_stdin(&["convert"], dir.path(), input);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains(r#"["COMMA","OPEN_QUESTION","NONE","NONE","NONE","CLOSE_QUESTION"]"#));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // missing config file and unknown config keys are configuration errors
    assert_eq!(punct(&["experiment", "--config", "nope.json"], d).status.code(), Some(2));
    std::fs::write(d.join("bad.json"), r#"{"schema_version": 1, "surprise": true}"#).unwrap();
    assert_eq!(punct(&["experiment", "--config", "bad.json"], d).status.code(), Some(2));
    // unparseable corpus is a data error
    std::fs::write(d.join("broken.jsonl"), "{\"tokens\": [\"a\"]\n").unwrap();
    assert_eq!(punct(&["train", "--es", "broken.jsonl", "--out", "m.json"], d).status.code(), Some(3));
    // a bad seed in the environment is a configuration error
    std::fs::write(d.join("ok.jsonl"), "{\"tokens\": [\"sí\"], \"labels\": [\"PERIOD\"]}\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_punct"))
        .args(["train", "--es", "ok.jsonl", "--out", "m.json"])
        .current_dir(d)
        .env("PUNCT_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // usage errors come from clap with code 2
    assert_eq!(punct(&["train"], d).status.code(), Some(2));
}

#[test]
fn train_predict_serve_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_benchmark(d);
    let extracted = punct(&["extract", "--in", "es.jsonl", "--out", "es_labeled.jsonl", "--lowercase"], d);
    assert!(extracted.status.success());
    let trained = punct(&["train", "--es", "es_labeled.jsonl", "--out", "m.json", "--epochs", "3"], d);
    assert!(trained.status.success(), "{}", String::from_utf8_lossy(&trained.stderr));

    let text = "qué precio tiene el plan";
    let predicted = punct(&["predict", "--model", "m.json", "--text", text], d);
    assert!(predicted.status.success());
    let predicted = String::from_utf8_lossy(&predicted.stdout).trim().to_string();

    let served = with_stdin(&["serve", "--model", "m.json"], d, &format!("{{\"id\":\"1\",\"text\":\"{text}\"}}\n"));
    assert!(served.status.success());
    let v: serde_json::Value = serde_json::from_slice(&served.stdout).unwrap();
    assert_eq!(v["text"], predicted.as_str());

    let eval = punct(&["eval", "--model", "m.json", "--test", "es_labeled.jsonl", "--slice", "OPEN_QUESTION,CLOSE_QUESTION"], d);
    assert!(eval.status.success(), "{}", String::from_utf8_lossy(&eval.stderr));
}

#[test]
fn experiment_is_reproducible_under_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_benchmark(d);
    let config = r#"{
        "schema_version": 1,
        "data": {"es_indomain": "es.jsonl", "ldc": "ldc.jsonl", "opensubtitle_pool": "os.jsonl", "en_indomain": "en.jsonl"},
        "selection": {"k": 100},
        "tagger": {"epochs": 2, "seed": 0, "shuffle": true},
        "output_dir": "out"
    }"#;
    std::fs::write(d.join("exp.json"), config).unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_punct"))
            .args(["experiment", "--config", "exp.json"])
            .current_dir(d)
            .env("PUNCT_SEED", "11")
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let manifest = std::fs::read(d.join("out/manifest.json")).unwrap();
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(manifest, std::fs::read(d.join("out/manifest.json")).unwrap());
    assert!(String::from_utf8_lossy(&first.stdout).contains("Joint EN,ES"));
}
