// Drive the `geolex` command line in-process: synth, ingest, landmarks,
// trips, series and baseline.

use std::path::Path;

use geolex::cli::run as geolex;

fn call(args: &[&str]) -> Result<(), Box<dyn std::error::Error>> {
    let mut argv = vec!["geolex"];
    argv.extend_from_slice(args);
    match geolex(argv) {
        0 => Ok(()),
        code => Err(format!("`geolex {}` exited with {code}", args.join(" ")).into()),
    }
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();

    call(&["synth", "--profile", "mixed-drop", "--users", "80", "--days", "112", "--at", "day98", "--out", &p("in.ndjson")])?;
    call(&["ingest", "--input", &p("in.ndjson"), "--store", &p("store")])?;
    call(&["mobility", "build-landmarks", "--store", &p("store"), "--out", &p("landmarks.bin")])?;
    call(&["mobility", "trips", "--store", &p("store"), "--landmarks", &p("landmarks.bin"), "--out", &p("od")])?;
    call(&["mobility", "series", "--od", &p("od"), "--landmarks", &p("landmarks.bin"), "--measure", "overall", "--out", &p("series.csv")])?;
    call(&["baseline", "--series", &p("series.csv"), "--method", "weekday", "--out", &p("percent.csv")])?;
    call(&["heatmap", "--percent", &p("percent.csv"), "--out", &p("heatmap.csv")])?;

    let percent = std::fs::read_to_string(Path::new(&p("percent.csv")))?;
    println!("{}", percent.lines().take(5).collect::<Vec<_>>().join("\n"));
    println!("...");
    println!("{}", percent.lines().last().unwrap_or_default());
    print!("{}", std::fs::read_to_string(p("heatmap.csv"))?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("cli example");
}
