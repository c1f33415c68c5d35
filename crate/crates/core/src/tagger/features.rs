use crate::corpus::PunctClass;

/// Template identifiers, in emission order.
pub const FEATURE_TEMPLATES: [&str; 18] = [
    "bias", "w-2", "w-1", "w0", "w+1", "w+2", "p1", "p2", "p3", "s1", "s2", "s3", "first", "last",
    "prev", "shape", "w-1|w0", "w0|w+1",
];

/// Upper bound on features emitted for one position.
pub const MAX_FEATURES: usize = FEATURE_TEMPLATES.len();

const BOS: &str = "<s>";
const EOS: &str = "</s>";

fn word_at(lowered: &[String], i: usize, offset: isize) -> &str {
    let j = i as isize + offset;
    if j < 0 {
        BOS
    } else if j as usize >= lowered.len() {
        EOS
    } else {
        &lowered[j as usize]
    }
}

/// Capitalization/digit pattern with repeats collapsed: `Hola` → `Xx`, `3,5` → `d,d`.
pub fn word_shape(word: &str) -> String {
    let mut shape = String::new();
    let mut last = None;
    for c in word.chars() {
        let s = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_numeric() {
            'd'
        } else {
            c
        };
        if last != Some(s) {
            shape.push(s);
            last = Some(s);
        }
    }
    shape
}

fn prefix(word: &str, n: usize) -> &str {
    word.char_indices().nth(n).map_or(word, |(i, _)| &word[..i])
}

fn suffix(word: &str, n: usize) -> &str {
    let count = word.chars().count();
    if count <= n {
        return word;
    }
    word.char_indices().nth(count - n).map_or(word, |(i, _)| &word[i..])
}

/// Lowercases a token sequence once so that [`featurize_lowered`] can be called per
/// position without repeating the work.
pub fn lowercase_tokens(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| t.to_lowercase()).collect()
}

/// Features for position `i` given the label predicted for `i - 1` (`None` at the start).
pub fn featurize(tokens: &[String], i: usize, prev_label: Option<PunctClass>) -> Vec<String> {
    featurize_lowered(tokens, &lowercase_tokens(tokens), i, prev_label)
}

pub(crate) fn featurize_lowered(
    tokens: &[String],
    lowered: &[String],
    i: usize,
    prev_label: Option<PunctClass>,
) -> Vec<String> {
    let w0 = &lowered[i];
    let mut f = Vec::with_capacity(MAX_FEATURES);
    f.push("bias".to_string());
    f.push(format!("w-2={}", word_at(lowered, i, -2)));
    f.push(format!("w-1={}", word_at(lowered, i, -1)));
    f.push(format!("w0={w0}"));
    f.push(format!("w+1={}", word_at(lowered, i, 1)));
    f.push(format!("w+2={}", word_at(lowered, i, 2)));
    for n in 1..=3 {
        f.push(format!("p{n}={}", prefix(w0, n)));
    }
    for n in 1..=3 {
        f.push(format!("s{n}={}", suffix(w0, n)));
    }
    if i == 0 {
        f.push("first".to_string());
    }
    if i + 1 == lowered.len() {
        f.push("last".to_string());
    }
    f.push(format!("prev={}", prev_label.map_or("BOS", PunctClass::name)));
    f.push(format!("shape={}", word_shape(&tokens[i])));
    f.push(format!("w-1|w0={}|{w0}", word_at(lowered, i, -1)));
    f.push(format!("w0|w+1={w0}|{}", word_at(lowered, i, 1)));
    f
}
