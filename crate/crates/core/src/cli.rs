//! Command-line front end. Every subcommand reads its inputs, validates paths
//! before doing any work, and writes outputs atomically.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::baseline::{
    cluster_baseline, lower_median, moving_average, pearson_by_date, percent, weekday_baseline,
    weekly_groups, weekly_heatmap, BaselineError,
};
use crate::ingest::{ingest_reader, CountryScope, Lang, Store};
use crate::mobility::{
    build_landmarks, country_series, landmarks_csv, read_landmarks_bin, series_csv, store_od_matrix,
    write_landmarks_bin, Measure, Measures, MobilityError, MobilitySeries, ODMatrix,
};
use crate::synth::{self, Profile, SynthConfig, SynthError};
use crate::textproc::TokenizerConfig;
use crate::vocabulary::{
    build_from_store, common_words, day_words, merge, pca_project, sample_days, similarity_matrix,
    VocabError, DEFAULT_COMMON_RATE, DEFAULT_COMMON_SAMPLE,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Io(_) => "io",
        }
    }

    /// Single-line JSON object `{"error":<kind>,"message":<text>}`.
    pub fn to_line(&self) -> String {
        let message = self.to_string().replace('\n', " ");
        serde_json::json!({ "error": self.kind(), "message": message }).to_string()
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<MobilityError> for CliError {
    fn from(e: MobilityError) -> Self {
        match e {
            MobilityError::Io(e) => e.into(),
            e => CliError::Data(e.to_string()),
        }
    }
}

impl From<VocabError> for CliError {
    fn from(e: VocabError) -> Self {
        match e {
            VocabError::Io(e) => e.into(),
            e => CliError::Data(e.to_string()),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            CliError::Io(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(name = "geolex", version, about = "Token vocabularies, trips and mobility baselines from tweet-shaped NDJSON")]
pub struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition NDJSON messages into a store by language, day and country.
    Ingest(IngestArgs),
    /// Generate a seeded synthetic NDJSON stream.
    Synth(SynthArgs),
    /// Token frequencies of a scope, optionally filtered (word-cloud data).
    Vocab(VocabArgs),
    /// Jaccard matrix between countries and its 2-D PCA layout (dialect map data).
    Similarity(SimilarityArgs),
    /// Landmarks, origin-destination matrices and per-country series.
    #[command(subcommand)]
    Mobility(MobilityCommand),
    /// Percent change against a weekday-median or k-means baseline (boxplot data).
    Baseline(BaselineArgs),
    /// Pearson correlation against an external mobility report.
    Compare(CompareArgs),
    /// Weekly mean percent per country (heatmap data).
    Heatmap(HeatmapArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// NDJSON file, or `-` for stdin.
    #[arg(long)]
    pub input: String,
    #[arg(long, default_value = "store")]
    pub store: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// commuters, static or mixed-drop.
    #[arg(long, default_value = "commuters")]
    pub profile: String,
    #[arg(long, default_value_t = 200)]
    pub users: usize,
    #[arg(long, default_value_t = 28)]
    pub days: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// First generated day.
    #[arg(long, default_value = "2020-01-06")]
    pub start: NaiveDate,
    /// Percent of travel removed by mixed-drop.
    #[arg(long, default_value_t = 60.0)]
    pub drop: f64,
    /// Day the drop starts: `YYYY-MM-DD` or `dayN`. Defaults to mid-run.
    #[arg(long)]
    pub at: Option<String>,
    /// Comma-separated country codes.
    #[arg(long, default_value = "MX,CO,AR,ES")]
    pub countries: String,
    /// Extra non-geotagged posts per user and day.
    #[arg(long, default_value_t = 1)]
    pub chatter: u32,
    /// Output file, or `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct VocabArgs {
    #[arg(long, default_value = "store")]
    pub store: PathBuf,
    /// `YYYY-MM-DD`, `FROM..TO` (inclusive) or `sample:N:SEED`.
    #[arg(long)]
    pub date: String,
    #[arg(long)]
    pub lang: String,
    /// Country code or `any`.
    #[arg(long, default_value = "any")]
    pub country: String,
    #[arg(long)]
    pub drop_qgrams: bool,
    #[arg(long)]
    pub drop_emojis: bool,
    /// Remove tokens frequent across the whole language corpus.
    #[arg(long)]
    pub drop_common: bool,
    /// Remove tokens seen on the same day of earlier years.
    #[arg(long)]
    pub drop_prior_years: bool,
    #[arg(long, default_value_t = DEFAULT_COMMON_SAMPLE)]
    pub common_sample: usize,
    #[arg(long, default_value_t = DEFAULT_COMMON_RATE)]
    pub common_rate: f64,
    /// Limit for --drop-prior-years; all earlier years by default.
    #[arg(long)]
    pub years_back: Option<u32>,
    /// Tokenizer settings (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimilarityArgs {
    #[arg(long, default_value = "store")]
    pub store: PathBuf,
    #[arg(long, default_value = "es")]
    pub lang: String,
    /// Comma-separated country codes, at least two.
    #[arg(long)]
    pub countries: String,
    #[arg(long, default_value_t = 180)]
    pub sample_days: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// 2-D coordinates CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Similarity matrix CSV; defaults to `<out stem>_matrix.csv` next to `--out`.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum MobilityCommand {
    /// Frequent place boxes become landmarks.
    BuildLandmarks(BuildLandmarksArgs),
    /// One origin-destination CSV per day.
    Trips(TripsArgs),
    /// Inside/inward/outward/overall trips per country and day.
    Series(SeriesArgs),
}

#[derive(Debug, Args)]
pub struct BuildLandmarksArgs {
    #[arg(long, default_value = "store")]
    pub store: PathBuf,
    /// Comma-separated languages; all by default.
    #[arg(long)]
    pub langs: Option<String>,
    #[arg(long, default_value = "landmarks.bin")]
    pub out: PathBuf,
    /// CSV listing; defaults to `--out` with a `.csv` extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TripsArgs {
    #[arg(long, default_value = "store")]
    pub store: PathBuf,
    #[arg(long, default_value = "landmarks.bin")]
    pub landmarks: PathBuf,
    /// `YYYY-MM-DD`, `FROM..TO` or `sample:N:SEED`; every stored day by default.
    #[arg(long)]
    pub dates: Option<String>,
    #[arg(long)]
    pub langs: Option<String>,
    /// Output directory, one `<date>.csv` per day.
    #[arg(long, default_value = "od")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Directory of daily OD CSVs, or a single CSV.
    #[arg(long, default_value = "od")]
    pub od: PathBuf,
    /// Landmark file mapping ids to countries.
    #[arg(long, default_value = "landmarks.bin")]
    pub landmarks: PathBuf,
    /// Comma-separated country codes; all by default.
    #[arg(long)]
    pub countries: Option<String>,
    #[arg(long, default_value = "overall")]
    pub measure: Measure,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file, or `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Weekday,
    Kmeans,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// CSV with `date,country,value`.
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Weekday)]
    pub method: Method,
    #[arg(long, default_value_t = 13)]
    pub weeks: u32,
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    #[arg(long, default_value_t = 7)]
    pub k_max: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// First analysed day; the baseline uses the weeks before it. Defaults
    /// to the first day after a full training window.
    #[arg(long)]
    pub start: Option<NaiveDate>,
    /// `date,country,value,baseline,percent` rows.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional `week_end,country,date,percent` rows grouped by ISO week.
    #[arg(long)]
    pub boxplot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Output of `geolex baseline`.
    #[arg(long)]
    pub ours: PathBuf,
    /// External CSV with `date,country,percent`.
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Moving-average window applied to both series.
    #[arg(long, default_value_t = 7)]
    pub window: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    /// Directory of `geolex baseline` outputs, or one such file.
    #[arg(long)]
    pub percent: PathBuf,
    #[arg(long, default_value_t = 30)]
    pub top: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parse `args` (including the program name), run, and return the exit code.
/// Errors go to stderr as one JSON line.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            let err = CliError::Usage(first.to_string());
            eprintln!("{}", err.to_line());
            return err.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_line());
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    log::info!("config: {cli:?}");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Synth(a) => synth_cmd(a),
        Command::Vocab(a) => vocab(a),
        Command::Similarity(a) => similarity(a),
        Command::Mobility(MobilityCommand::BuildLandmarks(a)) => build_landmarks_cmd(a),
        Command::Mobility(MobilityCommand::Trips(a)) => trips(a),
        Command::Mobility(MobilityCommand::Series(a)) => series(a),
        Command::Baseline(a) => baseline(a),
        Command::Compare(a) => compare(a),
        Command::Heatmap(a) => heatmap(a),
    })
}

// ---- helpers ----

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Io(format!("no such file: {}", path.display())))
    }
}

fn require_dir(path: &Path) -> Result<()> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(CliError::Io(format!("no such directory: {}", path.display())))
    }
}

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

fn require_out(path: &Path) -> Result<()> {
    require_dir(parent_dir(path))
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, data: &[u8]) -> Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(parent_dir(path))?;
    tmp.write_all(data)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn write_out(target: &str, data: &[u8]) -> Result<()> {
    if target == "-" {
        let mut out = io::stdout().lock();
        out.write_all(data)?;
        out.flush()?;
        Ok(())
    } else {
        write_atomic(Path::new(target), data)
    }
}

fn parse_lang(s: &str) -> Result<Lang> {
    Lang::parse(s).ok_or_else(|| CliError::Usage(format!("invalid language `{s}`")))
}

fn parse_langs(s: Option<&str>) -> Result<Vec<Lang>> {
    s.map_or(Ok(Vec::new()), |s| split_list(s).map(parse_lang).collect())
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| CliError::Usage(format!("invalid date `{s}`")))
}

/// Resolve a date expression. `available` supplies the stored days for
/// `sample:N:SEED`.
pub fn resolve_dates(expr: &str, available: impl FnOnce() -> io::Result<Vec<NaiveDate>>) -> Result<Vec<NaiveDate>> {
    if let Some(rest) = expr.strip_prefix("sample:") {
        let (n, seed) = rest
            .split_once(':')
            .and_then(|(n, s)| Some((n.parse::<usize>().ok()?, s.parse::<u64>().ok()?)))
            .ok_or_else(|| CliError::Usage(format!("invalid sample expression `{expr}`")))?;
        return Ok(sample_days(&available()?, n, seed));
    }
    if let Some((a, b)) = expr.split_once("..") {
        let (a, b) = (parse_date(a)?, parse_date(b)?);
        if b < a {
            return Err(CliError::Usage(format!("empty date range `{expr}`")));
        }
        return Ok(a.iter_days().take_while(|d| *d <= b).collect());
    }
    Ok(vec![parse_date(expr)?])
}

fn tokenizer_config(path: Option<&Path>) -> Result<TokenizerConfig> {
    match path {
        None => Ok(TokenizerConfig::default()),
        Some(p) => {
            require_file(p)?;
            TokenizerConfig::from_toml(&fs::read_to_string(p)?).map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

fn open_store(path: &Path) -> Result<Store> {
    require_dir(path)?;
    Ok(Store::open(path))
}

fn read_landmarks(path: &Path) -> Result<crate::mobility::LandmarkSet> {
    require_file(path)?;
    Ok(read_landmarks_bin(BufReader::new(File::open(path)?))?)
}

/// Rows of a headed CSV with the named columns, in order.
fn read_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<String>>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            headers
                .iter()
                .position(|h| h.trim() == *n)
                .ok_or_else(|| CliError::Data(format!("{}: missing column `{n}`", path.display())))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(idx.iter().map(|&i| rec.get(i).unwrap_or("").trim().to_string()).collect());
    }
    Ok(rows)
}

fn num(s: &str, path: &Path) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| CliError::Data(format!("{}: invalid number `{s}`", path.display())))
}

fn day(s: &str, path: &Path) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|_| CliError::Data(format!("{}: invalid date `{s}`", path.display())))
}

type CountryDays = BTreeMap<String, BTreeMap<NaiveDate, f64>>;

/// `country -> date -> value` from the named columns of a CSV.
fn read_series(path: &Path, value_col: &str) -> Result<CountryDays> {
    let mut out: CountryDays = BTreeMap::new();
    for row in read_columns(path, &["date", "country", value_col])? {
        out.entry(row[1].clone()).or_default().insert(day(&row[0], path)?, num(&row[2], path)?);
    }
    Ok(out)
}

/// Every `.csv` file of a directory in name order, or the path itself.
fn csv_inputs(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    require_dir(path)?;
    let mut files: Vec<PathBuf> = fs::read_dir(path)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv") && p.is_file())
        .collect();
    files.sort();
    Ok(files)
}

// ---- subcommands ----

fn ingest(a: &IngestArgs) -> Result<()> {
    if a.input != "-" {
        require_file(Path::new(&a.input))?;
    }
    fs::create_dir_all(&a.store)?;
    let store = Store::open(&a.store);
    let summary = if a.input == "-" {
        ingest_reader(io::stdin().lock(), &store)?
    } else {
        ingest_reader(io::BufReader::new(File::open(&a.input)?), &store)?
    };
    for (line, e) in &summary.sample_errors {
        log::warn!("line {line}: {e}");
    }
    eprintln!("ingested={} rejected={}", summary.ingested, summary.rejected);
    Ok(())
}

fn synth_cmd(a: &SynthArgs) -> Result<()> {
    if a.out != "-" {
        require_out(Path::new(&a.out))?;
    }
    let profile: Profile = a.profile.parse()?;
    let countries = split_list(&a.countries).map(synth::country_spec).collect::<Result<Vec<_>, _>>()?;
    if countries.is_empty() {
        return Err(CliError::Usage("no countries given".into()));
    }
    let drop_at = match &a.at {
        Some(s) => Some(synth::parse_day(s, a.start)?),
        None if profile == Profile::MixedDrop => Some(a.start + Days::new(a.days as u64 / 2)),
        None => None,
    };
    let cfg = SynthConfig {
        profile,
        users: a.users,
        days: a.days,
        seed: a.seed,
        start: a.start,
        drop: a.drop,
        drop_at,
        countries,
        chatter: a.chatter,
        ..SynthConfig::default()
    };
    cfg.validate()?;
    log::info!("synth: {} users over {} days from {}, drop at {:?}", cfg.users, cfg.days, cfg.start, cfg.drop_at);
    let mut buf = Vec::new();
    let n = synth::generate(&cfg, &mut buf)?;
    write_out(&a.out, &buf)?;
    log::info!("synth: wrote {n} records");
    Ok(())
}

fn vocab(a: &VocabArgs) -> Result<()> {
    let store = open_store(&a.store)?;
    require_out(&a.out)?;
    let config = tokenizer_config(a.config.as_deref())?;
    let lang = parse_lang(&a.lang)?;
    let country = CountryScope::parse(&a.country).ok_or_else(|| CliError::Usage(format!("invalid country `{}`", a.country)))?;
    let dates = resolve_dates(&a.date, || store.days(&lang))?;
    log::info!("vocab: {} dates for {}/{}", dates.len(), lang.as_str(), country);
    let days = dates
        .par_iter()
        .map(|&d| build_from_store(&store, d, &lang, country, &config))
        .collect::<io::Result<Vec<_>>>()?;
    let mut v = merge(&days)?;
    if a.drop_qgrams {
        v = v.remove_qgrams();
    }
    if a.drop_emojis {
        v = v.remove_emojis();
    }
    if a.drop_common {
        let mut failure: Option<io::Error> = None;
        let all_days = store.days(&lang)?;
        let corpus = all_days
            .iter()
            .flat_map(|&d| match store.read_partition(&crate::ingest::PartitionKey::new(&lang, d, CountryScope::Any)) {
                Ok(rs) => rs,
                Err(e) => {
                    failure.get_or_insert(e);
                    Vec::new()
                }
            })
            .map(|r| r.text);
        let common = common_words(corpus, a.common_sample, a.common_rate, a.seed, &config);
        if let Some(e) = failure {
            return Err(e.into());
        }
        v = v.remove(&common.tokens);
    }
    if a.drop_prior_years {
        let prior = day_words(&v, &store, a.years_back, &config)?;
        log::info!("prior years: {} earlier dates", prior.dates.len());
        v = v.remove(&prior.tokens);
    }
    let json = serde_json::to_string_pretty(&v.to_json()).map_err(|e| CliError::Data(e.to_string()))?;
    write_atomic(&a.out, json.as_bytes())
}

fn similarity(a: &SimilarityArgs) -> Result<()> {
    let store = open_store(&a.store)?;
    require_out(&a.out)?;
    let matrix_out = a.matrix_out.clone().unwrap_or_else(|| {
        let stem = a.out.file_stem().map_or("similarity".into(), |s| s.to_string_lossy().into_owned());
        parent_dir(&a.out).join(format!("{stem}_matrix.csv"))
    });
    require_out(&matrix_out)?;
    let config = tokenizer_config(a.config.as_deref())?;
    let lang = parse_lang(&a.lang)?;
    let countries: Vec<CountryScope> = split_list(&a.countries)
        .map(|c| match CountryScope::parse(c) {
            Some(s @ CountryScope::Country(_)) => Ok(s),
            _ => Err(CliError::Usage(format!("invalid country `{c}`"))),
        })
        .collect::<Result<_>>()?;
    let dates = sample_days(&store.days(&lang)?, a.sample_days, a.seed);
    log::info!("similarity: {} countries over {} sampled days", countries.len(), dates.len());
    let vocabs = countries
        .par_iter()
        .map(|&c| {
            let days = dates
                .iter()
                .map(|&d| build_from_store(&store, d, &lang, c, &config))
                .collect::<io::Result<Vec<_>>>()?;
            Ok(merge(&days)?.remove_qgrams().remove_emojis())
        })
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = countries.iter().map(ToString::to_string).collect();
    let matrix = similarity_matrix(&labels, &vocabs)?;
    let projection = pca_project(&matrix.values, 2)?;
    if projection.is_degenerate() {
        log::warn!("similarity: matrix has rank {}, trailing components are zero", projection.rank);
    }
    write_atomic(&matrix_out, matrix.to_csv().as_bytes())?;
    write_atomic(&a.out, projection.to_csv(&labels).as_bytes())
}

fn build_landmarks_cmd(a: &BuildLandmarksArgs) -> Result<()> {
    let store = open_store(&a.store)?;
    let csv_path = a.csv.clone().unwrap_or_else(|| a.out.with_extension("csv"));
    require_out(&a.out)?;
    require_out(&csv_path)?;
    let langs = parse_langs(a.langs.as_deref())?;
    let set = build_landmarks(&store, &langs)?;
    log::info!("landmarks: {}", set.len());
    let mut bin = Vec::new();
    write_landmarks_bin(&set, &mut bin)?;
    write_atomic(&a.out, &bin)?;
    write_atomic(&csv_path, landmarks_csv(&set).as_bytes())
}

fn trips(a: &TripsArgs) -> Result<()> {
    let store = open_store(&a.store)?;
    let set = read_landmarks(&a.landmarks)?;
    let langs = parse_langs(a.langs.as_deref())?;
    let stored_days = || -> io::Result<Vec<NaiveDate>> {
        let langs = if langs.is_empty() { store.langs()? } else { langs.clone() };
        let mut all = std::collections::BTreeSet::new();
        for l in &langs {
            all.extend(store.days(l)?);
        }
        Ok(all.into_iter().collect())
    };
    let dates = match &a.dates {
        Some(expr) => resolve_dates(expr, stored_days)?,
        None => stored_days()?,
    };
    fs::create_dir_all(&a.out)?;
    let totals = dates
        .par_iter()
        .map(|&d| {
            let m = store_od_matrix(&store, &langs, d, &set)?;
            write_atomic(&a.out.join(format!("{d}.csv")), m.to_csv().as_bytes())?;
            Ok(m.total())
        })
        .collect::<Result<Vec<u64>>>()?;
    log::info!("trips: {} days, {} trips", dates.len(), totals.iter().sum::<u64>());
    Ok(())
}

fn series(a: &SeriesArgs) -> Result<()> {
    let files = csv_inputs(&a.od)?;
    let set = read_landmarks(&a.landmarks)?;
    if a.out != "-" {
        require_out(Path::new(&a.out))?;
    }
    let mut matrices: Vec<ODMatrix> = Vec::new();
    for f in &files {
        let mut text = String::new();
        File::open(f)?.read_to_string(&mut text)?;
        let parsed = ODMatrix::from_csv(&text)?;
        // a day without trips is a header-only `<date>.csv`
        let empty_day = f.file_stem().and_then(|s| NaiveDate::parse_from_str(&s.to_string_lossy(), "%Y-%m-%d").ok());
        match empty_day {
            Some(d) if parsed.is_empty() => matrices.push(ODMatrix::new(d)),
            _ => matrices.extend(parsed),
        }
    }
    let mut all = country_series(&matrices, &set)?;
    let selected: Vec<MobilitySeries> = match &a.countries {
        None => all.into_values().collect(),
        Some(list) => {
            let days: Vec<NaiveDate> = matrices.iter().map(|m| m.day).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            split_list(list)
                .map(|c| {
                    let c = c.to_ascii_uppercase();
                    all.remove(&c).unwrap_or_else(|| {
                        log::warn!("series: no landmark in {c}, reporting zeros");
                        MobilitySeries {
                            country: c.clone(),
                            days: days.iter().map(|&d| (d, Measures::default())).collect(),
                        }
                    })
                })
                .collect()
        }
    };
    match a.format {
        OutputFormat::Csv => write_out(&a.out, series_csv(&selected, a.measure).as_bytes()),
    }
}

fn baseline(a: &BaselineArgs) -> Result<()> {
    require_file(&a.series)?;
    require_out(&a.out)?;
    if let Some(b) = &a.boxplot {
        require_out(b)?;
    }
    let data = read_series(&a.series, "value")?;
    let first = data.values().filter_map(|s| s.keys().next()).min().copied();
    let Some(first) = first else {
        return Err(CliError::Data(format!("{}: no rows", a.series.display())));
    };
    let start = a.start.unwrap_or(first + Days::new(7 * a.weeks as u64));
    log::info!("baseline: {:?} over {} weeks before {start}", a.method, a.weeks);

    let results: Vec<(String, Result<Vec<(NaiveDate, f64, f64, f64)>, BaselineError>)> = data
        .par_iter()
        .map(|(country, s)| {
            let r = (|| {
                let b = match a.method {
                    Method::Weekday => weekday_baseline(s, start, a.weeks)?,
                    Method::Kmeans => cluster_baseline(s, start, a.weeks, (a.k_min, a.k_max), a.seed)?,
                };
                let after: BTreeMap<NaiveDate, f64> = s.range(start..).map(|(&d, &v)| (d, v)).collect();
                let p = percent(&after, &b)?;
                Ok(after.iter().map(|(&d, &v)| (d, v, b.reference(d, v), p[&d])).collect())
            })();
            (country.clone(), r)
        })
        .collect();

    let mut rows = Vec::new();
    let mut boxplot = String::from("week_end,country,date,percent\n");
    for (country, r) in results {
        match r {
            Ok(days) => {
                let pct: BTreeMap<NaiveDate, f64> = days.iter().map(|&(d, _, _, p)| (d, p)).collect();
                for (week_end, _) in weekly_groups(&pct) {
                    for (d, p) in pct.range(week_end - Days::new(6)..=week_end) {
                        boxplot.push_str(&format!("{week_end},{country},{d},{p}\n"));
                    }
                }
                rows.extend(days.into_iter().map(|(d, v, b, p)| (d, country.clone(), v, b, p)));
            }
            Err(e) => log::warn!("baseline: skipping {country}: {e}"),
        }
    }
    if rows.is_empty() {
        return Err(CliError::Data("no country has a usable baseline".into()));
    }
    rows.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
    let mut out = String::from("date,country,value,baseline,percent\n");
    for (d, c, v, b, p) in rows {
        out.push_str(&format!("{d},{c},{v},{b},{p}\n"));
    }
    write_atomic(&a.out, out.as_bytes())?;
    if let Some(path) = &a.boxplot {
        write_atomic(path, boxplot.as_bytes())?;
    }
    Ok(())
}

fn smoothed(s: &BTreeMap<NaiveDate, f64>, window: usize) -> BTreeMap<NaiveDate, f64> {
    let values: Vec<f64> = s.values().copied().collect();
    s.keys().copied().zip(moving_average(&values, window)).collect()
}

fn compare(a: &CompareArgs) -> Result<()> {
    require_file(&a.ours)?;
    require_file(&a.reference)?;
    require_out(&a.out)?;
    let ours = read_series(&a.ours, "percent")?;
    let travels = read_series(&a.ours, "value")?;
    let reference = read_series(&a.reference, "percent")?;
    let mut out = String::from("country,pearson,median_travels\n");
    for (country, s) in &ours {
        let Some(r) = reference.get(country) else {
            log::warn!("compare: {country} missing from reference");
            continue;
        };
        let corr = match pearson_by_date(&smoothed(s, a.window), &smoothed(r, a.window)) {
            Ok(x) => x.to_string(),
            Err(e) => {
                log::warn!("compare: {country}: {e}");
                String::new()
            }
        };
        let mut v: Vec<f64> = travels[country].values().copied().collect();
        let median = lower_median(&mut v).map_or(String::new(), |m| m.to_string());
        out.push_str(&format!("{country},{corr},{median}\n"));
    }
    write_atomic(&a.out, out.as_bytes())
}

fn heatmap(a: &HeatmapArgs) -> Result<()> {
    let files = csv_inputs(&a.percent)?;
    require_out(&a.out)?;
    let mut pct: CountryDays = BTreeMap::new();
    let mut travels: BTreeMap<String, f64> = BTreeMap::new();
    for f in &files {
        for row in read_columns(f, &["date", "country", "value", "percent"])? {
            let d = day(&row[0], f)?;
            *travels.entry(row[1].clone()).or_default() += num(&row[2], f)?;
            pct.entry(row[1].clone()).or_default().insert(d, num(&row[3], f)?);
        }
    }
    let h = weekly_heatmap(&pct, &travels, a.top);
    write_atomic(&a.out, h.to_csv().as_bytes())
}
