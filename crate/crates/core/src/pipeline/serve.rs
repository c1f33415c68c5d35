use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::TcpListener;
use std::path::Path;
use std::sync::Arc;
use std::thread;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::{render, tokenize, LabeledUtterance, PunctClass};
use crate::postprocess::{repair_pairing, RepairPolicy};
use crate::tagger::{Tagger, TaggerModel};

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot load model {path}: {reason}")]
    ModelLoad { path: String, reason: String },
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TaggerModel, ServeError> {
    let path = path.as_ref();
    TaggerModel::load(path)
        .map_err(|e| ServeError::ModelLoad { path: path.display().to_string(), reason: e.to_string() })
}

/// Tokens, repaired labels and rendered text for one input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Punctuated {
    pub tokens: Vec<String>,
    pub labels: Vec<PunctClass>,
    pub text: String,
}

/// Tokenizes raw ASR text, predicts on the lowercased tokens, repairs pairing and
/// renders with capitalized sentence starts. The original token spelling is kept in
/// the output. `None` when the text has no tokens.
pub fn punctuate<T: Tagger + ?Sized>(model: &T, text: &str, policy: RepairPolicy) -> Option<Punctuated> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return None;
    }
    let lowered: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let labels = repair_pairing(&model.predict(&lowered), policy);
    let u = LabeledUtterance::new(tokens, labels).expect("tokenize yields valid tokens");
    let text = render(&u, true);
    let (tokens, labels) = u.into_parts();
    Some(Punctuated { tokens, labels, text })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Request {
    id: String,
    text: String,
}

#[derive(Serialize)]
struct Response<'a> {
    id: &'a str,
    text: &'a str,
    labels: &'a [PunctClass],
    latency_ms: f64,
}

#[derive(Serialize)]
struct ErrorResponse {
    id: Value,
    error: ErrorBody,
}

#[derive(Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
}

fn malformed(id: Value, message: impl std::fmt::Display) -> Result<String, String> {
    let body = ErrorBody { kind: "MalformedRequest", message: message.to_string() };
    Err(serde_json::to_string(&ErrorResponse { id, error: body }).expect("serializable"))
}

/// Answers one NDJSON request line with one response line (without the newline).
/// Problems with the request produce a `MalformedRequest` error object.
pub fn handle_request<T: Tagger + ?Sized>(model: &T, policy: RepairPolicy, line: &str) -> String {
    respond(model, policy, line).unwrap_or_else(|e| e)
}

fn respond<T: Tagger + ?Sized>(model: &T, policy: RepairPolicy, line: &str) -> Result<String, String> {
    let start = Instant::now();
    let req: Request = match serde_json::from_str(line) {
        Ok(r) => r,
        Err(e) => {
            // echo the id back when there is one to echo
            let id = serde_json::from_str::<Value>(line)
                .ok()
                .and_then(|v| v.get("id").cloned())
                .unwrap_or(Value::Null);
            return malformed(id, e);
        }
    };
    let Some(out) = punctuate(model, &req.text, policy) else {
        return malformed(Value::String(req.id), "text has no words");
    };
    let latency_ms = start.elapsed().as_secs_f64() * 1000.0;
    let resp = Response { id: &req.id, text: &out.text, labels: &out.labels, latency_ms };
    Ok(serde_json::to_string(&resp).expect("serializable"))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ServeStats {
    pub requests: usize,
    pub errors: usize,
}

/// Serves NDJSON requests from `input` until end of stream, flushing after every
/// response. Blank lines are ignored.
pub fn serve_stream<T, R, W>(model: &T, policy: RepairPolicy, input: R, output: W) -> io::Result<ServeStats>
where
    T: Tagger + ?Sized,
    R: BufRead,
    W: Write,
{
    let mut out = BufWriter::new(output);
    let mut stats = ServeStats::default();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        stats.requests += 1;
        let resp = respond(model, policy, &line).unwrap_or_else(|e| {
            stats.errors += 1;
            e
        });
        out.write_all(resp.as_bytes())?;
        out.write_all(b"\n")?;
        out.flush()?;
    }
    Ok(stats)
}

/// Accepts connections forever, one thread per connection, all sharing `model`.
pub fn serve_tcp(model: Arc<TaggerModel>, policy: RepairPolicy, listener: TcpListener) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let model = Arc::clone(&model);
        thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(s) => BufReader::new(s),
                Err(_) => return,
            };
            let _ = serve_stream(model.as_ref(), policy, reader, stream);
        });
    }
    Ok(())
}
