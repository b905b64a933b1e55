// Normalize a message and list its words, bigrams and q-grams.

use geolex::textproc::{normalize, tokenize, TokenKind, TokenizerConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let text = "@ana ¡Buenos días, CDMX! https://t.co/x 🚌 camión lleno";
    let normalized = normalize(text);
    println!("normalized: {normalized}");
    assert_eq!(normalized, "buenos~días~cdmx~🚌~camión~lleno");

    let bag = tokenize(text, &TokenizerConfig::default());
    let words: Vec<&str> = bag.of_kind(TokenKind::Word).map(|(t, _)| t.surface.as_str()).collect();
    let bigrams: Vec<&str> = bag.of_kind(TokenKind::Bigram).map(|(t, _)| t.surface.as_str()).collect();
    println!("words:   {words:?}");
    println!("bigrams: {bigrams:?}");
    for q in [2u8, 3, 4] {
        println!("{q}-grams: {}", bag.of_kind(TokenKind::QGram(q)).count());
    }

    // words only
    let cfg = TokenizerConfig { qgrams: vec![], bigrams: false, ..TokenizerConfig::default() };
    println!("words-only tokens: {}", tokenize(text, &cfg).len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("tokenize example");
}
