//! Rule-generated corpora for tests, examples and benchmarks.
//!
//! Real in-domain transcripts are not redistributable, so the benchmark here builds
//! stand-ins with the properties that matter for the data-centric methods:
//!
//! - in-domain Spanish support calls: several sentences per utterance, many
//!   questions, and code-switched English product vocabulary;
//! - an LDC-like corpus of social telephone chat, one sentence per line;
//! - an OpenSubtitle-like pool of movie lines, a minority of which are close to the
//!   support domain;
//! - in-domain English support calls with English punctuation conventions.
//!
//! Some short Spanish frames ("¿tiene su pin?" / "tiene el router.") are
//! questions or statements depending only on the item being talked about: agents
//! ask for account identifiers, customers report broken devices. The item names are
//! shared with the English calls, which is where cross-lingual data helps.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{render, LabeledUtterance, Lang, PunctClass, RawUtterance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Statement,
    Question,
    Exclamation,
}

struct Sentence {
    marker: Vec<String>,
    body: Vec<String>,
    kind: Kind,
}

impl Sentence {
    fn labeled(&self) -> (Vec<String>, Vec<PunctClass>) {
        let mut tokens = Vec::new();
        let mut labels = Vec::new();
        if !self.marker.is_empty() {
            tokens.extend(self.marker.iter().cloned());
            labels.extend(std::iter::repeat(PunctClass::None).take(self.marker.len() - 1));
            labels.push(PunctClass::Comma);
        }
        let start = labels.len();
        tokens.extend(self.body.iter().cloned());
        labels.extend(std::iter::repeat(PunctClass::None).take(self.body.len()));
        let last = labels.len() - 1;
        match self.kind {
            Kind::Statement => labels[last] = PunctClass::Period,
            Kind::Question | Kind::Exclamation => {
                let kind = if self.kind == Kind::Question {
                    crate::corpus::PairKind::Question
                } else {
                    crate::corpus::PairKind::Exclamation
                };
                if start == last {
                    labels[last] = PunctClass::full(kind);
                } else {
                    labels[start] = PunctClass::open(kind);
                    labels[last] = PunctClass::close(kind);
                }
            }
        }
        (tokens, labels)
    }
}

fn pick<'a, R: Rng>(rng: &mut R, items: &[&'a str]) -> &'a str {
    items[rng.gen_range(0..items.len())]
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

/// Draws an index from unnormalized weights.
fn weighted<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

const SYLLABLES: [&str; 24] = [
    "zo", "ra", "ki", "lu", "ven", "tor", "mi", "sa", "dex", "no", "fi", "ga", "bri", "lo", "tex",
    "qua", "ri", "mon", "ze", "pa", "vol", "ti", "ny", "ska",
];

/// Product and account vocabulary shared by both languages.
pub struct SharedVocabulary {
    /// Items agents ask the caller for.
    pub ask_items: Vec<String>,
    /// Items callers report problems with.
    pub report_items: Vec<String>,
}

impl SharedVocabulary {
    pub fn generate(per_category: usize, seed: u64) -> SharedVocabulary {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0000);
        let base_ask = [
            "email", "username", "pin", "password", "zip", "voucher", "ticket", "id", "login",
            "token", "invoice", "receipt", "passcode", "order", "handle", "serial",
        ];
        let base_report = [
            "wifi", "router", "app", "modem", "laptop", "tablet", "bluetooth", "update", "chat",
            "streaming", "checkout", "website", "software", "printer", "smartwatch", "headset",
        ];
        let mut seen: std::collections::HashSet<String> = base_ask
            .iter()
            .chain(base_report.iter())
            .map(|s| s.to_string())
            .collect();
        let mut invent = |rng: &mut ChaCha8Rng| loop {
            let n = rng.gen_range(2..=3);
            let w: String = (0..n).map(|_| SYLLABLES[rng.gen_range(0..SYLLABLES.len())]).collect();
            if seen.insert(w.clone()) {
                return w;
            }
        };
        let mut ask_items: Vec<String> = base_ask.iter().map(|s| s.to_string()).collect();
        let mut report_items: Vec<String> = base_report.iter().map(|s| s.to_string()).collect();
        while ask_items.len() < per_category {
            ask_items.push(invent(&mut rng));
        }
        while report_items.len() < per_category {
            report_items.push(invent(&mut rng));
        }
        SharedVocabulary { ask_items, report_items }
    }
}

fn number<R: Rng>(rng: &mut R) -> String {
    rng.gen_range(1000..999_999).to_string()
}

/// Sizes of the generated benchmark corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchmarkSize {
    pub es_indomain: usize,
    pub ldc: usize,
    pub opensubtitle_pool: usize,
    pub en_indomain: usize,
    pub items_per_category: usize,
}

impl Default for BenchmarkSize {
    fn default() -> Self {
        BenchmarkSize {
            es_indomain: 600,
            ldc: 2000,
            opensubtitle_pool: 6000,
            en_indomain: 3000,
            items_per_category: 150,
        }
    }
}

/// Raw punctuated corpora for the transfer benchmark.
pub struct BilingualBenchmark {
    pub es_indomain: Vec<RawUtterance>,
    pub ldc: Vec<RawUtterance>,
    pub opensubtitle_pool: Vec<RawUtterance>,
    pub en_indomain: Vec<RawUtterance>,
}

const SENTENCES_PER_CALL: [f64; 5] = [0.30, 0.28, 0.22, 0.12, 0.08];

struct SpanishSupport<'a> {
    vocab: &'a SharedVocabulary,
}

impl SpanishSupport<'_> {
    const MARKERS: [&'static str; 12] = [
        "bueno", "mire", "pues", "oiga", "vale", "sí", "claro", "perfecto", "entonces", "a ver",
        "buenas tardes", "ok",
    ];
    const ARTICLES: [&'static str; 4] = ["el", "su", "mi", "la"];
    const AMBIGUOUS: [&'static str; 5] = ["tiene", "y", "también", "funciona", "revisamos"];
    const STATEMENTS: [&'static str; 21] = [
        "no me funciona {report}",
        "me sale un error con {report}",
        "no sé {ask}",
        "me pide {ask} otra vez",
        "me cobraron dos veces",
        "no me llegó {ask}",
        "quería cambiar {ask}",
        "tengo un problema con {report}",
        "ya reinicié {report}",
        "le llamo por {report}",
        "lo he intentado varias veces",
        "mi número de cuenta es {num}",
        "necesito ayuda con {report}",
        "se me olvidó {ask}",
        "no puedo entrar con {ask}",
        "ahora mismo lo reviso",
        "un momento por favor",
        "le envío {ask} ahora",
        "eso ya está solucionado",
        "se congela {report} cada rato",
        "le voy a transferir con soporte",
    ];
    const QUESTIONS: [&'static str; 13] = [
        "me escucha",
        "en qué le puedo ayudar",
        "me puede dar {ask}",
        "cuál es {ask}",
        "ya probó reiniciar {report}",
        "recibió {ask}",
        "puede revisar {report}",
        "algo más",
        "me confirma {ask}",
        "cómo le puedo ayudar",
        "le llegó {ask}",
        "desde cuándo falla {report}",
        "me repite {ask}",
    ];
    const EXCLAMATIONS: [&'static str; 6] =
        ["muchas gracias", "qué bien", "genial", "perfecto", "qué rápido", "estupendo"];

    fn fill<R: Rng>(&self, rng: &mut R, frame: &str) -> Vec<String> {
        let mut out = Vec::new();
        for w in frame.split_whitespace() {
            match w {
                "{ask}" => {
                    out.push(pick(rng, &Self::ARTICLES).to_string());
                    out.push(self.vocab.ask_items.choose(rng).unwrap().clone());
                }
                "{report}" => {
                    out.push(pick(rng, &Self::ARTICLES).to_string());
                    out.push(self.vocab.report_items.choose(rng).unwrap().clone());
                }
                "{num}" => out.push(number(rng)),
                _ => out.push(w.to_string()),
            }
        }
        out
    }

    fn sentence<R: Rng>(&self, rng: &mut R) -> Sentence {
        let marker = if rng.gen_bool(0.3) { words(pick(rng, &Self::MARKERS)) } else { Vec::new() };
        let (body, kind) = match weighted(rng, &[0.35, 0.3, 0.25, 0.1]) {
            0 => {
                // item decides: agents ask for identifiers, callers report devices
                let ask = rng.gen_bool(0.5);
                let item = if ask {
                    self.vocab.ask_items.choose(rng).unwrap()
                } else {
                    self.vocab.report_items.choose(rng).unwrap()
                };
                let body = vec![
                    pick(rng, &Self::AMBIGUOUS).to_string(),
                    pick(rng, &Self::ARTICLES).to_string(),
                    item.clone(),
                ];
                (body, if ask { Kind::Question } else { Kind::Statement })
            }
            1 => {
                let f = pick(rng, &Self::STATEMENTS);
                (self.fill(rng, f), Kind::Statement)
            }
            2 => {
                let f = pick(rng, &Self::QUESTIONS);
                (self.fill(rng, f), Kind::Question)
            }
            _ => (words(pick(rng, &Self::EXCLAMATIONS)), Kind::Exclamation),
        };
        Sentence { marker, body, kind }
    }
}

struct EnglishSupport<'a> {
    vocab: &'a SharedVocabulary,
}

impl EnglishSupport<'_> {
    const MARKERS: [&'static str; 14] = [
        "well", "so", "ok", "okay", "yes", "sure", "alright", "hi", "right", "look", "um", "yeah",
        "no", "no",
    ];
    const ARTICLES: [&'static str; 3] = ["the", "your", "my"];
    const AMBIGUOUS_ASK: [&'static str; 4] = ["and", "also", "do you have", "can i get"];
    const AMBIGUOUS_REPORT: [&'static str; 4] = ["and", "also", "i have", "it's"];
    const STATEMENTS: [&'static str; 20] = [
        "thanks for helping me",
        "nobody called me",
        "they charged me",
        "that works for me",
        "please call me",
        "you can email me",
        "{report} is not working",
        "i wanted to change {ask}",
        "i have a problem with {report}",
        "i already restarted {report}",
        "i am calling about {report}",
        "i tried several times",
        "my account number is {num}",
        "i need help with {report}",
        "i forgot {ask}",
        "i can't log in with {ask}",
        "let me check that for you",
        "one moment please",
        "i'll send you {ask} now",
        "that is fixed now",
    ];
    const QUESTIONS: [&'static str; 14] = [
        "can you text me",
        "could you transfer me",
        "can you help me",
        "can you hear me",
        "how can i help you",
        "can you give me {ask}",
        "what is {ask}",
        "did you try restarting {report}",
        "did you get {ask}",
        "can you check {report}",
        "anything else",
        "can you confirm {ask}",
        "is {report} working now",
        "could you repeat {ask}",
    ];
    const EXCLAMATIONS: [&'static str; 4] = ["thank you so much", "great", "awesome", "perfect"];

    fn fill<R: Rng>(&self, rng: &mut R, frame: &str) -> Vec<String> {
        let mut out = Vec::new();
        for w in frame.split_whitespace() {
            match w {
                "{ask}" => {
                    out.push(pick(rng, &Self::ARTICLES).to_string());
                    out.push(self.vocab.ask_items.choose(rng).unwrap().clone());
                }
                "{report}" => {
                    out.push(pick(rng, &Self::ARTICLES).to_string());
                    out.push(self.vocab.report_items.choose(rng).unwrap().clone());
                }
                "{num}" => out.push(number(rng)),
                _ => out.push(w.to_string()),
            }
        }
        out
    }

    fn sentence<R: Rng>(&self, rng: &mut R) -> Sentence {
        let marker = if rng.gen_bool(0.45) { words(pick(rng, &Self::MARKERS)) } else { Vec::new() };
        let (body, kind) = match weighted(rng, &[0.35, 0.33, 0.27, 0.05]) {
            0 => {
                let ask = rng.gen_bool(0.5);
                let (lead, item) = if ask {
                    (pick(rng, &Self::AMBIGUOUS_ASK), self.vocab.ask_items.choose(rng).unwrap())
                } else {
                    (pick(rng, &Self::AMBIGUOUS_REPORT), self.vocab.report_items.choose(rng).unwrap())
                };
                let mut body = words(lead);
                body.push(pick(rng, &Self::ARTICLES).to_string());
                body.push(item.clone());
                (body, if ask { Kind::Question } else { Kind::Statement })
            }
            1 => {
                let f = pick(rng, &Self::STATEMENTS);
                (self.fill(rng, f), Kind::Statement)
            }
            2 => {
                let f = pick(rng, &Self::QUESTIONS);
                (self.fill(rng, f), Kind::Question)
            }
            _ => (words(pick(rng, &Self::EXCLAMATIONS)), Kind::Exclamation),
        };
        Sentence { marker, body, kind }
    }
}

const LDC_MARKERS: [&str; 8] = ["bueno", "mira", "eh", "ah", "pues", "oye", "sí", "no"];
const LDC_STATEMENTS: [&str; 14] = [
    "yo vivo en {city} desde hace años",
    "mi familia es de {city}",
    "hace mucho calor aquí",
    "trabajo en {place} todos los días",
    "yo conozco mucho cubano pero más que todo en {city}",
    "mis papás llevan casados mucho tiempo",
    "no me gusta mucho {thing}",
    "ayer fuimos a {place} con los niños",
    "eso es lo que yo pienso",
    "me encanta {thing}",
    "mi hermano estudia en {city}",
    "no sé qué decirte",
    "la comida de {city} es muy rica",
    "tengo que llamar a mi mamá",
];
const LDC_QUESTIONS: [&str; 8] = [
    "cuántos años llevan casados",
    "dónde vives tú",
    "te gusta {thing}",
    "de dónde eres",
    "qué haces en {place}",
    "tienes hermanos",
    "cómo está el tiempo en {city}",
    "qué piensas de {thing}",
];
const LDC_EXCLAMATIONS: [&str; 3] = ["qué bueno", "qué interesante", "claro que sí"];

const MOVIE_STATEMENTS: [&str; 14] = [
    "sé que lo que estoy pidiéndote es difícil",
    "da un poco de tristeza",
    "no puedo creerlo",
    "tenemos que salir de aquí",
    "él nunca volvió a {city}",
    "te lo dije hace mucho tiempo",
    "la guerra cambió todo",
    "nadie sabe lo que pasó en {place}",
    "esta noche no dormiremos",
    "el capitán quiere verte",
    "todo va a salir bien",
    "ella sabe la verdad",
    "me voy a {city} mañana",
    "no hay tiempo que perder",
];
const MOVIE_QUESTIONS: [&str; 8] = [
    "qué está pasando",
    "dónde está {name}",
    "quién eres tú",
    "por qué lo hiciste",
    "me estás escuchando",
    "qué quieres de mí",
    "viste a {name}",
    "estás loco",
];
const MOVIE_EXCLAMATIONS: [&str; 8] =
    ["corre", "vámonos de aquí", "cuidado", "déjame en paz", "no", "ayuda", "silencio", "qué horror"];
const CITIES: [&str; 8] =
    ["filadelfia", "miami", "madrid", "bogotá", "lima", "caracas", "méxico", "quito"];
const PLACES: [&str; 6] = ["la oficina", "la escuela", "el hospital", "el mercado", "la playa", "el puerto"];
const THINGS: [&str; 6] = ["el fútbol", "la música", "el cine", "la política", "el béisbol", "la salsa"];
const NAMES: [&str; 6] = ["juan", "maría", "el doctor", "carlos", "ana", "el señor lópez"];

fn fill_general<R: Rng>(rng: &mut R, frame: &str) -> Vec<String> {
    let mut out = Vec::new();
    for w in frame.split_whitespace() {
        let slot = match w {
            "{city}" => pick(rng, &CITIES),
            "{place}" => pick(rng, &PLACES),
            "{thing}" => pick(rng, &THINGS),
            "{name}" => pick(rng, &NAMES),
            _ => {
                out.push(w.to_string());
                continue;
            }
        };
        out.extend(words(slot));
    }
    out
}

fn general_sentence<R: Rng>(
    rng: &mut R,
    markers: &[&str],
    marker_rate: f64,
    frames: [(&[&str], Kind); 3],
    weights: &[f64; 3],
) -> Sentence {
    let marker = if !markers.is_empty() && rng.gen_bool(marker_rate) {
        words(pick(rng, markers))
    } else {
        Vec::new()
    };
    let (list, kind) = frames[weighted(rng, weights)];
    let frame = pick(rng, list);
    Sentence { marker, body: fill_general(rng, frame), kind }
}

fn to_labeled(sentences: &[Sentence], english: bool) -> LabeledUtterance {
    let mut tokens = Vec::new();
    let mut labels = Vec::new();
    for s in sentences {
        let (t, l) = s.labeled();
        tokens.extend(t);
        labels.extend(l);
    }
    if english {
        labels = crate::crosslingual::strip_opening_marks(&labels);
    }
    LabeledUtterance::new(tokens, labels).expect("generated tokens are valid")
}

/// Renders as written text with some of the noise found in real corpora.
fn to_text<R: Rng>(u: &LabeledUtterance, rng: &mut R, subtitle_noise: bool) -> String {
    let mut text = render(u, true);
    if subtitle_noise {
        if rng.gen_bool(0.1) && text.ends_with('.') {
            text.pop();
            text.push_str("...");
        }
        if rng.gen_bool(0.1) {
            text = format!("\"{text}\"");
        }
    }
    text
}

fn sentence_count<R: Rng>(rng: &mut R, dist: &[f64]) -> usize {
    weighted(rng, dist) + 1
}

impl BilingualBenchmark {
    pub fn generate(size: BenchmarkSize, seed: u64) -> BilingualBenchmark {
        let vocab = SharedVocabulary::generate(size.items_per_category, seed);
        let es = SpanishSupport { vocab: &vocab };
        let en = EnglishSupport { vocab: &vocab };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let es_indomain = (0..size.es_indomain)
            .map(|_| {
                let n = sentence_count(&mut rng, &SENTENCES_PER_CALL);
                let s: Vec<Sentence> = (0..n).map(|_| es.sentence(&mut rng)).collect();
                let text = to_text(&to_labeled(&s, false), &mut rng, false);
                RawUtterance::new(text).unwrap().with_source("es_indomain").with_lang(Lang::Es)
            })
            .collect();

        let ldc = (0..size.ldc)
            .map(|_| {
                let n = sentence_count(&mut rng, &[0.9, 0.1]);
                let s: Vec<Sentence> = (0..n)
                    .map(|_| {
                        general_sentence(
                            &mut rng,
                            &LDC_MARKERS,
                            0.35,
                            [
                                (&LDC_STATEMENTS[..], Kind::Statement),
                                (&LDC_QUESTIONS[..], Kind::Question),
                                (&LDC_EXCLAMATIONS[..], Kind::Exclamation),
                            ],
                            &[0.7, 0.25, 0.05],
                        )
                    })
                    .collect();
                let text = to_text(&to_labeled(&s, false), &mut rng, false);
                RawUtterance::new(text).unwrap().with_source("ldc").with_lang(Lang::Es)
            })
            .collect();

        let opensubtitle_pool = (0..size.opensubtitle_pool)
            .map(|_| {
                let s = if rng.gen_bool(0.2) {
                    es.sentence(&mut rng)
                } else {
                    general_sentence(
                        &mut rng,
                        &[],
                        0.0,
                        [
                            (&MOVIE_STATEMENTS[..], Kind::Statement),
                            (&MOVIE_QUESTIONS[..], Kind::Question),
                            (&MOVIE_EXCLAMATIONS[..], Kind::Exclamation),
                        ],
                        &[0.55, 0.25, 0.2],
                    )
                };
                let text = to_text(&to_labeled(&[s], false), &mut rng, true);
                RawUtterance::new(text).unwrap().with_source("opensubtitle").with_lang(Lang::Es)
            })
            .collect();

        let en_indomain = (0..size.en_indomain)
            .map(|_| {
                let n = sentence_count(&mut rng, &SENTENCES_PER_CALL);
                let s: Vec<Sentence> = (0..n).map(|_| en.sentence(&mut rng)).collect();
                let text = to_text(&to_labeled(&s, true), &mut rng, false);
                RawUtterance::new(text).unwrap().with_source("en_indomain").with_lang(Lang::En)
            })
            .collect();

        BilingualBenchmark { es_indomain, ldc, opensubtitle_pool, en_indomain }
    }
}

/// Lowercased Spanish support-call utterances whose punctuation follows from the
/// words: markers take a comma, frames fix the sentence type, and items fix it for
/// the short item-only frames.
pub fn rule_corpus(n: usize, seed: u64) -> Vec<LabeledUtterance> {
    let vocab = SharedVocabulary::generate(40, seed);
    let es = SpanishSupport { vocab: &vocab };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let k = sentence_count(&mut rng, &SENTENCES_PER_CALL);
            let s: Vec<Sentence> = (0..k).map(|_| es.sentence(&mut rng)).collect();
            to_labeled(&s, false).with_lang(Lang::Es)
        })
        .collect()
}
