// Generate seeded synthetic streams and check they are reproducible.

use geolex::synth::{generate, Profile, SynthConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SynthConfig { users: 40, days: 7, ..SynthConfig::default() };
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let n = generate(&cfg, &mut a)?;
    generate(&cfg, &mut b)?;
    assert_eq!(a, b, "same seed, same bytes");
    println!("commuters: {n} records, {} bytes", a.len());
    println!("first line: {}", String::from_utf8_lossy(a.split(|&c| c == b'\n').next().unwrap_or_default()));

    for profile in [Profile::Static, Profile::MixedDrop] {
        let cfg = SynthConfig { profile, drop_at: Some(cfg.start + chrono::Days::new(3)), ..cfg.clone() };
        let mut out = Vec::new();
        let n = generate(&cfg, &mut out)?;
        let trips: Vec<u64> = (0..cfg.days as u64)
            .map(|d| cfg.expected_trips(cfg.start + chrono::Days::new(d)).iter().map(|(_, t)| t).sum())
            .collect();
        println!("{profile}: {n} records, planned trips per day {trips:?}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("synth example");
}
