// Word-cloud frequencies for one country and day: drop q-grams, emojis and
// tokens common to the whole language.

use std::io::Cursor;

use chrono::NaiveDate;
use geolex::ingest::{ingest_reader, Country, CountryScope, Lang, PartitionKey, Store};
use geolex::synth::{generate, SynthConfig};
use geolex::textproc::TokenizerConfig;
use geolex::vocabulary::{build_from_store, common_words};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let store = Store::open(dir.path());
    let mut ndjson = Vec::new();
    generate(&SynthConfig { users: 80, days: 3, ..SynthConfig::default() }, &mut ndjson)?;
    ingest_reader(Cursor::new(ndjson), &store)?;

    let config = TokenizerConfig::default();
    let es = Lang::parse("es").expect("lang");
    let day = NaiveDate::from_ymd_opt(2020, 1, 7).expect("date");
    let mx = CountryScope::Country(Country::parse("MX").expect("country"));

    let voc = build_from_store(&store, day, &es, mx, &config)?;
    println!("raw vocabulary: {} tokens from {} messages", voc.len(), voc.num_messages());

    let mut corpus = Vec::new();
    for d in store.days(&es)? {
        corpus.extend(store.read_partition(&PartitionKey::new(&es, d, CountryScope::Any))?.into_iter().map(|r| r.text));
    }
    // a high rate keeps only words shared by most messages
    let common = common_words(&corpus, corpus.len(), 0.2, 42, &config);

    let cloud = voc.remove_qgrams().remove_emojis().remove(&common.tokens);
    println!("after filtering: {} tokens, {} common removed", cloud.len(), common.tokens.len());
    for (token, n) in cloud.most_common(10) {
        println!("{n:5}  {}", token.surface);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("word cloud example");
}
