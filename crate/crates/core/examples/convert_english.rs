//! Adds Spanish opening marks to English-convention labels.
//!
//!     cargo run --example convert_english

use punct_restore::corpus::{extract_labels, render};
use punct_restore::crosslingual::anglicize_to_spanish_conventions;

fn main() {
    // the opening mark goes at the start of the clause that holds the closer, so the
    // last line gets it after the comma
    for text in [
        "OK, how can I help you?",
        "Thanks. Is that all? Great!",
        "Sorry, could you repeat that, please?",
        "Yes?",
    ] {
        let en = extract_labels(text).unwrap();
        let es = anglicize_to_spanish_conventions(&en).unwrap();
        println!("{text:<40} -> {}", render(&es, false));
    }
}
