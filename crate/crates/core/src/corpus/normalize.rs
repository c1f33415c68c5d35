//! Folding of unsupported punctuation into the supported set.

const QUOTES: [char; 8] = ['"', '\'', '«', '»', '“', '”', '‘', '’'];

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '’'
}

/// Rewrites `text` so only the supported marks remain among the convertible ones:
/// quotation marks are deleted, `:` and `;` become `,`, and ellipses (`...` or `…`)
/// become `.`. A run of identical marks that contains an inserted mark collapses to
/// one. Everything else is kept as-is.
///
/// An apostrophe between two alphanumeric characters (`don't`, `I’m`) is word-internal
/// and kept; every other quote character is removed.
pub fn normalize_punctuation(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();

    let mut unquoted: Vec<char> = Vec::with_capacity(chars.len());
    for (i, &c) in chars.iter().enumerate() {
        if QUOTES.contains(&c) {
            let internal = is_apostrophe(c)
                && i > 0
                && i + 1 < chars.len()
                && chars[i - 1].is_alphanumeric()
                && chars[i + 1].is_alphanumeric();
            if !internal {
                continue;
            }
        }
        unquoted.push(c);
    }

    // (char, inserted)
    let mut marked: Vec<(char, bool)> = Vec::with_capacity(unquoted.len());
    let mut i = 0;
    while i < unquoted.len() {
        let c = unquoted[i];
        if c == '.' || c == '…' {
            let start = i;
            while i < unquoted.len() && (unquoted[i] == '.' || unquoted[i] == '…') {
                i += 1;
            }
            let run = &unquoted[start..i];
            if run.len() >= 3 || run.contains(&'…') {
                marked.push(('.', true));
            } else {
                marked.extend(run.iter().map(|&c| (c, false)));
            }
            continue;
        }
        match c {
            ':' | ';' => marked.push((',', true)),
            _ => marked.push((c, false)),
        }
        i += 1;
    }

    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < marked.len() {
        let (c, _) = marked[i];
        let mut j = i + 1;
        while j < marked.len() && marked[j].0 == c {
            j += 1;
        }
        let run = &marked[i..j];
        if (c == ',' || c == '.') && run.len() > 1 && run.iter().any(|(_, inserted)| *inserted) {
            out.push(c);
        } else {
            out.extend(run.iter().map(|(c, _)| *c));
        }
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colon_and_semicolon_become_commas() {
        assert_eq!(normalize_punctuation("dijo: hola"), "dijo, hola");
        assert_eq!(normalize_punctuation("uno; dos"), "uno, dos");
    }

    #[test]
    fn ellipses_become_periods() {
        assert_eq!(normalize_punctuation("espera… bueno"), "espera. bueno");
        assert_eq!(normalize_punctuation("espera... bueno"), "espera. bueno");
        assert_eq!(normalize_punctuation("espera.... bueno"), "espera. bueno");
        assert_eq!(normalize_punctuation("espera.…"), "espera.");
    }

    #[test]
    fn fixed_point_without_convertible_marks() {
        assert_eq!(normalize_punctuation("sin cambios."), "sin cambios.");
        assert_eq!(normalize_punctuation("¿Sí? ¡Claro!"), "¿Sí? ¡Claro!");
    }

    #[test]
    fn quotes_deleted() {
        assert_eq!(normalize_punctuation("\"hola\" «amigo» “sí” ‘no’"), "hola amigo sí no");
        assert_eq!(normalize_punctuation("'ok'"), "ok");
    }

    #[test]
    fn word_internal_apostrophes_survive() {
        assert_eq!(normalize_punctuation("I don't know"), "I don't know");
        assert_eq!(normalize_punctuation("I’m calling"), "I’m calling");
    }

    #[test]
    fn inserted_runs_collapse_but_original_runs_stay() {
        assert_eq!(normalize_punctuation("hola:, que"), "hola, que");
        assert_eq!(normalize_punctuation("a ,, b"), "a ,, b");
        assert_eq!(normalize_punctuation("fin.."), "fin..");
    }

    #[test]
    fn other_characters_preserved() {
        let s = "que- quería (bueno) 3,5 ñandú";
        assert_eq!(normalize_punctuation(s), s);
    }
}
