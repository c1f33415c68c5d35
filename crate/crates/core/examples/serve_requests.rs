//! Trains a small model and answers newline-delimited JSON requests against it, the same
//! way `punct serve` does on stdin.
//!
//!     cargo run --release --example serve_requests

use punct_restore::pipeline::{serve_stream, ServeStats};
use punct_restore::postprocess::RepairPolicy;
use punct_restore::synthetic::rule_corpus;
use punct_restore::tagger::{train, TrainConfig};

fn main() {
    let model = train(&rule_corpus(2000, 2), "rules", &TrainConfig::default()).unwrap();
    let requests = [
        r#"{"id": "1", "text": "hola buenas tardes qué tal"}"#,
        r#"{"id": "2", "text": "me pide el pin otra vez"}"#,
        r#"{"id": "3", "text": ""}"#,
        r#"{"text": "no id"}"#,
    ]
    .join("\n");
    let mut out = Vec::new();
    let ServeStats { requests, errors } =
        serve_stream(&model, RepairPolicy::default(), requests.as_bytes(), &mut out).unwrap();
    print!("{}", String::from_utf8(out).unwrap());
    println!("{requests} requests, {errors} errors");
}
