use std::fs;
use std::path::{Path, PathBuf};

use geolex::cli::run;

struct Workdir {
    dir: tempfile::TempDir,
}

impl Workdir {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn p(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }

    fn geolex(&self, args: &[&str]) -> i32 {
        let mut argv = vec!["geolex"];
        argv.extend_from_slice(args);
        run(argv)
    }

    fn ok(&self, args: &[&str]) {
        assert_eq!(self.geolex(args), 0, "geolex {}", args.join(" "));
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.p(name)).unwrap()
    }

    /// synth -> ingest -> landmarks -> trips -> series -> baseline.
    fn pipeline(&self, profile: &str, users: &str, days: &str) {
        self.ok(&["synth", "--profile", profile, "--users", users, "--days", days, "--seed", "42", "--out", &self.p("in.ndjson")]);
        self.ok(&["ingest", "--input", &self.p("in.ndjson"), "--store", &self.p("store")]);
        self.ok(&["mobility", "build-landmarks", "--store", &self.p("store"), "--out", &self.p("lm.bin")]);
        self.ok(&["mobility", "trips", "--store", &self.p("store"), "--landmarks", &self.p("lm.bin"), "--out", &self.p("od")]);
        self.ok(&["mobility", "series", "--od", &self.p("od"), "--landmarks", &self.p("lm.bin"), "--out", &self.p("series.csv")]);
    }
}

fn tree_bytes(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn default_pipeline_is_deterministic() {
    let (a, b) = (Workdir::new(), Workdir::new());
    for w in [&a, &b] {
        w.pipeline("mixed-drop", "80", "112");
        w.ok(&["baseline", "--series", &w.p("series.csv"), "--out", &w.p("percent.csv")]);
        w.ok(&["baseline", "--series", &w.p("series.csv"), "--method", "kmeans", "--out", &w.p("kmeans.csv")]);
    }
    assert_eq!(tree_bytes(a.dir.path()), tree_bytes(b.dir.path()));
    assert!(a.read("percent.csv").lines().count() > 1);
}

#[test]
fn static_profile_has_no_trips() {
    let w = Workdir::new();
    w.pipeline("static", "40", "7");
    let series = w.read("series.csv");
    assert!(series.lines().count() > 1);
    for line in series.lines().skip(1) {
        assert!(line.ends_with(",0"), "{line}");
    }
    for (_, bytes) in tree_bytes(Path::new(&w.p("od"))) {
        assert_eq!(String::from_utf8(bytes).unwrap(), "date,origin,dest,count\n");
    }
}

#[test]
fn series_matches_planned_trips() {
    let w = Workdir::new();
    w.pipeline("commuters", "100", "7");
    let cfg = geolex::synth::SynthConfig { users: 100, days: 7, ..Default::default() };
    let mut expected = Vec::new();
    for d in cfg.start.iter_days().take(7) {
        for (c, n) in cfg.expected_trips(d) {
            expected.push(format!("{d},{c},{n}"));
        }
    }
    expected.sort();
    let got: Vec<String> = w.read("series.csv").lines().skip(1).map(String::from).collect();
    assert_eq!(got, expected);
}

#[test]
fn unknown_flag_writes_nothing() {
    let w = Workdir::new();
    assert_eq!(w.geolex(&["synth", "--frobnicate", "--out", &w.p("x.ndjson")]), 2);
    assert!(!Path::new(&w.p("x.ndjson")).exists());
    assert_eq!(w.geolex(&["baseline", "--series", &w.p("missing.csv"), "--out", &w.p("p.csv")]), 4);
    assert!(!Path::new(&w.p("p.csv")).exists());
}

#[test]
fn data_errors_exit_three() {
    let w = Workdir::new();
    fs::write(w.p("series.csv"), "date,country,value\n2020-01-01,MX,1\n").unwrap();
    assert_eq!(w.geolex(&["baseline", "--series", &w.p("series.csv"), "--out", &w.p("p.csv")]), 3);
    fs::write(w.p("bad.csv"), "date,country\n2020-01-01,MX\n").unwrap();
    assert_eq!(w.geolex(&["baseline", "--series", &w.p("bad.csv"), "--out", &w.p("p.csv")]), 3);
}

#[test]
fn reingesting_the_store_is_byte_identical() {
    let w = Workdir::new();
    w.ok(&["synth", "--users", "30", "--days", "3", "--out", &w.p("in.ndjson")]);
    w.ok(&["ingest", "--input", &w.p("in.ndjson"), "--store", &w.p("a")]);
    // concatenating every `any` partition reproduces the records in canonical form
    let mut lines = Vec::new();
    for (path, bytes) in tree_bytes(Path::new(&w.p("a"))) {
        if path.file_name().unwrap() == "any.ndjson" {
            lines.extend(String::from_utf8(bytes).unwrap().lines().map(String::from));
        }
    }
    fs::write(w.p("again.ndjson"), lines.join("\n") + "\n").unwrap();
    w.ok(&["ingest", "--input", &w.p("again.ndjson"), "--store", &w.p("b")]);
    assert_eq!(tree_bytes(Path::new(&w.p("a"))), tree_bytes(Path::new(&w.p("b"))));
}

#[test]
fn vocab_similarity_compare_heatmap() {
    let w = Workdir::new();
    w.pipeline("mixed-drop", "100", "100");
    w.ok(&["vocab", "--store", &w.p("store"), "--date", "2020-01-07..2020-01-09", "--lang", "es", "--country", "MX", "--drop-qgrams", "--drop-emojis", "--out", &w.p("v.json")]);
    let v: serde_json::Value = serde_json::from_str(&w.read("v.json")).unwrap();
    let counts = v["counts"].as_object().unwrap();
    assert!(counts.contains_key("chido"));
    assert!(!counts.keys().any(|k| k.starts_with("q2:")));

    w.ok(&["similarity", "--store", &w.p("store"), "--countries", "MX,CO,AR", "--sample-days", "10", "--out", &w.p("coords.csv")]);
    assert_eq!(w.read("coords.csv").lines().count(), 4);
    assert_eq!(w.read("coords_matrix.csv").lines().count(), 4);

    w.ok(&["baseline", "--series", &w.p("series.csv"), "--out", &w.p("percent.csv"), "--boxplot", &w.p("box.csv")]);
    let mut ext = String::from("date,country,percent\n");
    for line in w.read("percent.csv").lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let p: f64 = f[4].parse().unwrap();
        ext.push_str(&format!("{},{},{}\n", f[0], f[1], 2.0 * p + 1.0));
    }
    fs::write(w.p("ext.csv"), ext).unwrap();
    w.ok(&["compare", "--ours", &w.p("percent.csv"), "--ref", &w.p("ext.csv"), "--out", &w.p("corr.csv")]);
    let corr = w.read("corr.csv");
    assert!(corr.starts_with("country,pearson,median_travels\n"));
    for line in corr.lines().skip(1) {
        let r: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((r - 1.0).abs() < 1e-9, "{line}");
    }

    w.ok(&["heatmap", "--percent", &w.p("percent.csv"), "--top", "2", "--out", &w.p("heatmap.csv")]);
    assert_eq!(w.read("heatmap.csv").lines().next().unwrap().split(',').count(), 3);
    assert!(w.read("box.csv").starts_with("week_end,country,date,percent\n"));
}

#[test]
fn worker_count_does_not_change_outputs() {
    let (a, b) = (Workdir::new(), Workdir::new());
    for (w, jobs) in [(&a, "1"), (&b, "4")] {
        w.ok(&["--jobs", jobs, "synth", "--profile", "mixed-drop", "--users", "60", "--days", "98", "--out", &w.p("in.ndjson")]);
        w.ok(&["--jobs", jobs, "ingest", "--input", &w.p("in.ndjson"), "--store", &w.p("store")]);
        w.ok(&["--jobs", jobs, "mobility", "build-landmarks", "--store", &w.p("store"), "--out", &w.p("lm.bin")]);
        w.ok(&["--jobs", jobs, "mobility", "trips", "--store", &w.p("store"), "--landmarks", &w.p("lm.bin"), "--out", &w.p("od")]);
        w.ok(&["--jobs", jobs, "mobility", "series", "--od", &w.p("od"), "--landmarks", &w.p("lm.bin"), "--out", &w.p("series.csv")]);
        w.ok(&["--jobs", jobs, "baseline", "--series", &w.p("series.csv"), "--method", "kmeans", "--out", &w.p("percent.csv")]);
    }
    assert_eq!(tree_bytes(a.dir.path()), tree_bytes(b.dir.path()));
}
