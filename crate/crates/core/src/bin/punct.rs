//! Command-line front end. Exit codes: 0 success, 2 configuration or usage error,
//! 3 bad or insufficient data, 1 anything else.

use std::fs;
use std::io::{self, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use punct_restore::augment::{augment_to_distribution, histogram, histogram_report, DEFAULT_MAX_TOKENS};
use punct_restore::corpus::{
    extract_labels, normalize_punctuation, parse_jsonl, write_jsonl, LabeledUtterance, RawUtterance,
};
use punct_restore::crosslingual::anglicize_to_spanish_conventions;
use punct_restore::evaluate::{confusion_slice_by_name, evaluate_with_predictions};
use punct_restore::pipeline::{self, load_model, punctuate, serve_stream, serve_tcp, ExperimentConfig};
use punct_restore::postprocess::RepairPolicy;
use punct_restore::selection::{select_lowest_perplexity, write_score_report, LmOptions, NGramModel};
use punct_restore::tagger::{run_strategy, Perceptron, Strategy, TrainConfig};

#[derive(Parser)]
#[command(name = "punct", version, about = "Spanish punctuation restoration for ASR transcripts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize punctuation of raw utterances (JSONL in, JSONL out)
    Normalize {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn punctuated utterances into tokens and labels, skipping lines that cannot be labeled
    Extract {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Normalize before extracting
        #[arg(long)]
        normalize: bool,
        /// Lowercase tokens, as ASR output has no case
        #[arg(long)]
        lowercase: bool,
        /// Fail on the first line that cannot be labeled
        #[arg(long)]
        strict: bool,
    },
    /// Keep the k pool utterances with the lowest perplexity under an in-domain LM
    Select {
        #[arg(long)]
        model_corpus: PathBuf,
        #[arg(long)]
        pool: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Concatenate utterances to match the terminator histogram of a target corpus
    Augment {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target_corpus: PathBuf,
        #[arg(long, default_value_t = 17)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_TOKENS)]
        max_tokens: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Add Spanish opening marks to English-convention labeled data
    Convert {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a tagger with one of the transfer strategies
    Train {
        #[arg(long, default_value = "ES_ONLY")]
        strategy: Strategy,
        #[arg(long)]
        es: PathBuf,
        #[arg(long)]
        en: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_shuffle: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a model on labeled test data
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Score raw model output, without pairing repair
        #[arg(long)]
        no_repair: bool,
        #[arg(long, value_parser = parse_policy, default_value = "DROP_OPEN_INSERT_OPEN")]
        repair_policy: RepairPolicy,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the confusion matrix restricted to these classes, comma separated
        #[arg(long, value_delimiter = ',')]
        slice: Vec<String>,
    },
    /// Run a full experiment from a JSON config
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Answer newline-delimited JSON requests on stdin, or on a TCP address
    Serve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        listen: Option<String>,
        #[arg(long, value_parser = parse_policy, default_value = "DROP_OPEN_INSERT_OPEN")]
        repair_policy: RepairPolicy,
    },
    /// Punctuate text given on the command line, or each line of stdin
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        text: Option<String>,
        #[arg(long, value_parser = parse_policy, default_value = "DROP_OPEN_INSERT_OPEN")]
        repair_policy: RepairPolicy,
    },
}

fn parse_policy(s: &str) -> Result<RepairPolicy, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_uppercase()))
        .map_err(|_| format!("unknown repair policy `{s}`"))
}

struct Failure {
    code: u8,
    message: String,
}

fn config_err(m: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: m.to_string() }
}

fn data_err(m: impl std::fmt::Display) -> Failure {
    Failure { code: 3, message: m.to_string() }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure { code: 1, message: format!("{}: {e}", path.display()) }
}

type Outcome = Result<(), Failure>;

fn read_records<T: serde::de::DeserializeOwned>(path: Option<&Path>) -> Result<Vec<T>, Failure> {
    let parsed = match path {
        Some(p) => {
            let f = fs::File::open(p).map_err(|e| data_err(format!("{}: {e}", p.display())))?;
            parse_jsonl(BufReader::new(f))
        }
        None => parse_jsonl(io::stdin().lock()),
    };
    parsed.map_err(|e| data_err(format!("{}: {e}", path.map_or("stdin".into(), |p| p.display().to_string()))))
}

fn write_records<T: serde::Serialize>(records: &[T], path: Option<&Path>) -> Outcome {
    match path {
        Some(p) => write_jsonl(records, p).map_err(|e| io_err(p, e)),
        None => {
            let mut out = io::stdout().lock();
            for r in records {
                let line = serde_json::to_string(r).expect("serializable");
                writeln!(out, "{line}").map_err(|e| io_err(Path::new("stdout"), e))?;
            }
            Ok(())
        }
    }
}

fn env_seed(seed: u64) -> Result<u64, Failure> {
    Ok(pipeline::seed_from_env().map_err(config_err)?.unwrap_or(seed))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Normalize { input, out } => {
            let raw: Vec<RawUtterance> = read_records(input.as_deref())?;
            let normalized: Vec<RawUtterance> = raw
                .into_iter()
                .map(|mut r| {
                    r.text = normalize_punctuation(&r.text);
                    r
                })
                .collect();
            write_records(&normalized, out.as_deref())
        }
        Command::Extract { input, out, normalize, lowercase: lower, strict } => {
            let raw: Vec<RawUtterance> = read_records(input.as_deref())?;
            let mut labeled = Vec::with_capacity(raw.len());
            let mut skipped = 0;
            for (i, r) in raw.iter().enumerate() {
                let text = if normalize { normalize_punctuation(&r.text) } else { r.text.clone() };
                match extract_labels(&text) {
                    Ok(mut u) => {
                        u.source = r.source.clone();
                        u.lang = r.lang;
                        labeled.push(if lower { u.lowercased() } else { u });
                    }
                    Err(e) if strict => return Err(data_err(format!("record {}: {e}", i + 1))),
                    Err(_) => skipped += 1,
                }
            }
            if skipped > 0 {
                eprintln!("skipped {skipped} of {} records", raw.len());
            }
            write_records(&labeled, out.as_deref())
        }
        Command::Select { model_corpus, pool, k, out, report, order } => {
            let in_domain: Vec<RawUtterance> = read_records(Some(&model_corpus))?;
            let pool: Vec<RawUtterance> = read_records(Some(&pool))?;
            let lm = NGramModel::train(&in_domain, &LmOptions::with_order(order)).map_err(data_err)?;
            let sel = select_lowest_perplexity(&lm, &pool, k).map_err(config_err)?;
            if let Some(r) = report {
                write_score_report(&sel.scores, &r).map_err(|e| io_err(&r, e))?;
            }
            write_records(&sel.selected, Some(&out))
        }
        Command::Augment { source, target_corpus, seed, max_tokens, out, report } => {
            let source: Vec<LabeledUtterance> = read_records(Some(&source))?;
            let target: Vec<LabeledUtterance> = read_records(Some(&target_corpus))?;
            let target_hist = histogram(&target).map_err(data_err)?;
            let augmented = augment_to_distribution(&source, &target_hist, env_seed(seed)?, max_tokens)
                .map_err(data_err)?;
            if let Some(r) = report {
                let src = histogram(&source).map_err(data_err)?;
                let aug = histogram(&augmented).map_err(data_err)?;
                let text = histogram_report(&[("source", &src), ("target", &target_hist), ("augmented", &aug)]);
                fs::write(&r, text).map_err(|e| io_err(&r, e))?;
            }
            write_records(&augmented, Some(&out))
        }
        Command::Convert { input, out } => {
            let en: Vec<LabeledUtterance> = read_records(input.as_deref())?;
            let converted = en
                .iter()
                .enumerate()
                .map(|(i, u)| anglicize_to_spanish_conventions(u).map_err(|e| data_err(format!("record {}: {e}", i + 1))))
                .collect::<Result<Vec<_>, _>>()?;
            write_records(&converted, out.as_deref())
        }
        Command::Train { strategy, es, en, epochs, seed, no_shuffle, out } => {
            let es: Vec<LabeledUtterance> = read_records(Some(&es))?;
            let en: Vec<LabeledUtterance> = match &en {
                Some(p) => read_records(Some(p))?,
                None => Vec::new(),
            };
            let config = TrainConfig { epochs, seed: env_seed(seed)?, shuffle: !no_shuffle };
            if epochs == 0 {
                return Err(config_err("--epochs must be at least 1"));
            }
            let model = run_strategy(&Perceptron, strategy, &es, &en, &config).map_err(data_err)?;
            model.save(&out).map_err(|e| io_err(&out, e))
        }
        Command::Eval { model, test, no_repair, repair_policy, out, slice } => {
            let m = load_model(&model).map_err(data_err)?;
            let test_set: Vec<LabeledUtterance> = read_records(Some(&test))?;
            let policy = (!no_repair).then_some(repair_policy);
            let dataset = test.file_stem().map_or("test".into(), |s| s.to_string_lossy().into_owned());
            let (report, _) = evaluate_with_predictions(&m, &test_set, policy, &dataset).map_err(data_err)?;
            print!("{report}");
            if !slice.is_empty() {
                let names: Vec<&str> = slice.iter().map(String::as_str).collect();
                let s = confusion_slice_by_name(&report, &names).map_err(config_err)?;
                print!("\n{s}");
            }
            if let Some(p) = out {
                let json = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
                fs::write(&p, json).map_err(|e| io_err(&p, e))?;
            }
            Ok(())
        }
        Command::Experiment { config } => {
            let c = ExperimentConfig::load(&config).and_then(|c| c.with_env_seed()).map_err(config_err)?;
            let outcome = pipeline::run_experiment(&c).map_err(|e| Failure {
                code: e.exit_code() as u8,
                message: e.to_string(),
            })?;
            print!("{}", pipeline::results_markdown(&outcome.results()));
            eprintln!("wrote {}", c.output_dir.display());
            Ok(())
        }
        Command::Serve { model, listen, repair_policy } => {
            let m = load_model(&model).map_err(data_err)?;
            match listen {
                Some(addr) => {
                    let listener = TcpListener::bind(&addr).map_err(|e| config_err(format!("{addr}: {e}")))?;
                    eprintln!("listening on {}", listener.local_addr().map_err(|e| io_err(Path::new(&addr), e))?);
                    serve_tcp(Arc::new(m), repair_policy, listener).map_err(|e| io_err(Path::new(&addr), e))
                }
                None => {
                    let stats = serve_stream(&m, repair_policy, io::stdin().lock(), io::stdout().lock())
                        .map_err(|e| io_err(Path::new("stdio"), e))?;
                    eprintln!("{} requests, {} errors", stats.requests, stats.errors);
                    Ok(())
                }
            }
        }
        Command::Predict { model, text, repair_policy } => {
            let m = load_model(&model).map_err(data_err)?;
            let lines: Vec<String> = match text {
                Some(t) => vec![t],
                None => {
                    let mut s = String::new();
                    io::stdin().lock().read_to_string(&mut s).map_err(|e| io_err(Path::new("stdin"), e))?;
                    s.lines().map(str::to_string).collect()
                }
            };
            let mut out = io::stdout().lock();
            for line in lines {
                let text = punctuate(&m, &line, repair_policy).map_or(String::new(), |p| p.text);
                writeln!(out, "{text}").map_err(|e| io_err(Path::new("stdout"), e))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
