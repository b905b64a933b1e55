// Partition an NDJSON stream into a day/language/country store.

use std::io::Cursor;

use geolex::ingest::{ingest_reader, CountryScope, Lang, PartitionKey, Store};
use geolex::synth::{generate, SynthConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let store = Store::open(dir.path());

    let mut ndjson = Vec::new();
    generate(&SynthConfig { users: 20, days: 2, ..SynthConfig::default() }, &mut ndjson)?;
    // a broken line is counted and skipped
    ndjson.extend_from_slice(b"{\"user_id\":\"u\",\"timestamp\":\"yesterday\"}\n");

    let summary = ingest_reader(Cursor::new(ndjson), &store)?;
    println!("ingested={} rejected={}", summary.ingested, summary.rejected);
    for (line, err) in &summary.sample_errors {
        println!("  line {line}: {err}");
    }
    assert_eq!(summary.rejected, 1);

    let es = Lang::parse("es").expect("lang");
    for day in store.days(&es)? {
        for scope in store.countries(&es, day)? {
            let n = store.partition_len(&PartitionKey::new(&es, day, scope))?;
            println!("{day} es {scope}: {n}");
        }
        let any = store.partition_len(&PartitionKey::new(&es, day, CountryScope::Any))?;
        assert!(any > 0);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("ingest example");
}
