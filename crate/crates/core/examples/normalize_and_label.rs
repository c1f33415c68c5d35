//! From raw punctuated text to tokens and labels, and back.
//!
//!     cargo run --example normalize_and_label

use punct_restore::corpus::{extract_labels, normalize_punctuation, render};

fn main() {
    let raw = "Bueno: «¿en qué le puedo ayudar?» Quería saber... el precio; gracias";
    let normalized = normalize_punctuation(raw);
    println!("raw:        {raw}");
    println!("normalized: {normalized}");

    let u = extract_labels(&normalized).expect("normalized text is labelable");
    for (token, label) in u.tokens().iter().zip(u.labels()) {
        println!("  {token:<10} {label}");
    }
    println!("rendered:   {}", render(&u, false));
    println!("as ASR:     {}", render(&u.clone().lowercased(), true));

    // repeated marks have no label and are rejected
    println!("{:?}", extract_labels("¿¿qué??").unwrap_err().to_string());
}
