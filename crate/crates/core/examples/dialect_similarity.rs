// Jaccard similarity between country vocabularies and their 2-D PCA layout.

use std::io::Cursor;

use geolex::ingest::{ingest_reader, Country, CountryScope, Lang, Store};
use geolex::synth::{generate, SynthConfig, COUNTRIES};
use geolex::textproc::TokenizerConfig;
use geolex::vocabulary::{build_from_store, merge, pca_project, sample_days, similarity_matrix};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let store = Store::open(dir.path());
    let cfg = SynthConfig { users: 100, days: 10, countries: COUNTRIES[..5].iter().collect(), ..SynthConfig::default() };
    let mut ndjson = Vec::new();
    generate(&cfg, &mut ndjson)?;
    ingest_reader(Cursor::new(ndjson), &store)?;

    let es = Lang::parse("es").expect("lang");
    let days = sample_days(&store.days(&es)?, 5, 42);
    let config = TokenizerConfig::default();
    let labels: Vec<String> = ["MX", "CO", "AR", "ES", "CL"].map(String::from).to_vec();
    let mut vocabs = Vec::new();
    for code in &labels {
        let scope = CountryScope::Country(Country::parse(code).expect("country"));
        let per_day = days
            .iter()
            .map(|&d| build_from_store(&store, d, &es, scope, &config))
            .collect::<Result<Vec<_>, _>>()?;
        vocabs.push(merge(&per_day)?.remove_qgrams().remove_emojis());
    }

    let matrix = similarity_matrix(&labels, &vocabs)?;
    print!("{}", matrix.to_csv());
    let projection = pca_project(&matrix.values, 2)?;
    print!("{}", projection.to_csv(&labels));
    println!("explained variance: {:?}", projection.variances);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("similarity example");
}
