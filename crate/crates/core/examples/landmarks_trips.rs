// Build landmarks from place boxes and count one day's trips between them.

use std::io::Cursor;

use geolex::ingest::{ingest_reader, Store};
use geolex::mobility::{build_landmarks, store_od_matrix};
use geolex::synth::{generate, SynthConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let store = Store::open(dir.path());
    let cfg = SynthConfig { users: 60, days: 7, ..SynthConfig::default() };
    let mut ndjson = Vec::new();
    generate(&cfg, &mut ndjson)?;
    ingest_reader(Cursor::new(ndjson), &store)?;

    let landmarks = build_landmarks(&store, &[])?;
    println!("{} landmarks", landmarks.len());
    for l in landmarks.iter().take(3) {
        println!("  #{} {} support {} centroid ({:.5}, {:.5})", l.id, landmarks.country_label(l.id), l.support, l.centroid.lat, l.centroid.lon);
    }

    let day = cfg.start;
    let od = store_od_matrix(&store, &[], day, &landmarks)?;
    let planned: u64 = cfg.expected_trips(day).iter().map(|(_, n)| n).sum();
    println!("{day}: {} trips over {} origin-destination pairs (planned {planned})", od.total(), od.len());
    assert_eq!(od.total(), planned);
    print!("{}", od.to_csv().lines().take(4).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("landmarks example");
}
