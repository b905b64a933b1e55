use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;

use super::record::{parse_record, CountryScope, Lang, MessageRecord, ParseError};

/// Flush a partition's pending bytes once they exceed this size.
const FLUSH_BYTES: usize = 1 << 16;
const LINES_PER_CHUNK: usize = 16_384;
const EXTENSION: &str = "ndjson";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionKey {
    pub lang_code: [u8; 2],
    pub day: NaiveDate,
    pub country: CountryScope,
}

impl PartitionKey {
    pub fn new(lang: &Lang, day: NaiveDate, country: CountryScope) -> Self {
        let b = lang.as_str().as_bytes();
        Self {
            lang_code: [b[0], b[1]],
            day,
            country,
        }
    }

    pub fn lang(&self) -> Lang {
        Lang::parse(std::str::from_utf8(&self.lang_code).expect("ascii")).expect("valid lang")
    }
}

/// Directory-backed message store: `<root>/<lang>/<date>/<country>.ndjson`.
///
/// Every record lands in its country file (when it has a country) and in
/// `any.ndjson` for its day and language.
#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn partition_path(&self, key: &PartitionKey) -> PathBuf {
        self.root
            .join(key.lang().as_str())
            .join(key.day.format("%Y-%m-%d").to_string())
            .join(format!("{}.{EXTENSION}", key.country))
    }

    pub fn langs(&self) -> io::Result<Vec<Lang>> {
        let mut out: Vec<Lang> = list_dir_names(&self.root)?
            .iter()
            .filter_map(|n| Lang::parse(n).filter(|l| l.as_str() == n))
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn days(&self, lang: &Lang) -> io::Result<Vec<NaiveDate>> {
        let mut out: Vec<NaiveDate> = list_dir_names(&self.root.join(lang.as_str()))?
            .iter()
            .filter_map(|n| NaiveDate::parse_from_str(n, "%Y-%m-%d").ok())
            .collect();
        out.sort();
        Ok(out)
    }

    /// Country partitions present for a day, `Any` included.
    pub fn countries(&self, lang: &Lang, day: NaiveDate) -> io::Result<Vec<CountryScope>> {
        let dir = self
            .root
            .join(lang.as_str())
            .join(day.format("%Y-%m-%d").to_string());
        let mut out: Vec<CountryScope> = list_dir_names(&dir)?
            .iter()
            .filter_map(|n| n.strip_suffix(&format!(".{EXTENSION}")).and_then(CountryScope::parse))
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn contains(&self, key: &PartitionKey) -> bool {
        self.partition_path(key).is_file()
    }

    /// Visit every record of a partition in stored order. A missing
    /// partition is empty.
    pub fn for_each_record(
        &self,
        key: &PartitionKey,
        mut f: impl FnMut(MessageRecord),
    ) -> io::Result<()> {
        let path = self.partition_path(key);
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(()),
            Err(e) => return Err(e),
        };
        for (n, line) in BufReader::with_capacity(1 << 16, file).lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let rec = parse_record(line.as_bytes()).map_err(|e| {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}:{}: {e}", path.display(), n + 1),
                )
            })?;
            f(rec);
        }
        Ok(())
    }

    pub fn read_partition(&self, key: &PartitionKey) -> io::Result<Vec<MessageRecord>> {
        let mut out = Vec::new();
        self.for_each_record(key, |r| out.push(r))?;
        Ok(out)
    }

    pub fn partition_len(&self, key: &PartitionKey) -> io::Result<usize> {
        let file = match File::open(self.partition_path(key)) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e),
        };
        let mut n = 0;
        for line in BufReader::new(file).split(b'\n') {
            if !line?.is_empty() {
                n += 1;
            }
        }
        Ok(n)
    }
}

fn list_dir_names(dir: &Path) -> io::Result<Vec<String>> {
    let rd = match fs::read_dir(dir) {
        Ok(rd) => rd,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let mut names = Vec::new();
    for entry in rd {
        if let Some(name) = entry?.file_name().to_str() {
            names.push(name.to_string());
        }
    }
    Ok(names)
}

/// Appends records to their partitions. Bytes are buffered per partition
/// and appended on flush, so only one file is open at a time.
pub struct PartitionWriter<'a> {
    store: &'a Store,
    pending: BTreeMap<PartitionKey, Vec<u8>>,
    counts: BTreeMap<PartitionKey, usize>,
    records: usize,
}

impl<'a> PartitionWriter<'a> {
    pub fn new(store: &'a Store) -> Self {
        Self {
            store,
            pending: BTreeMap::new(),
            counts: BTreeMap::new(),
            records: 0,
        }
    }

    pub fn append(&mut self, record: &MessageRecord) -> io::Result<()> {
        let mut line = record.to_json_line();
        line.push('\n');
        let day = record.day();
        let mut targets = vec![PartitionKey::new(&record.lang, day, CountryScope::Any)];
        if let Some(c) = record.country {
            targets.push(PartitionKey::new(&record.lang, day, CountryScope::Country(c)));
        }
        for key in targets {
            *self.counts.entry(key).or_default() += 1;
            let buf = self.pending.entry(key).or_default();
            buf.extend_from_slice(line.as_bytes());
            if buf.len() >= FLUSH_BYTES {
                let bytes = std::mem::take(buf);
                self.write_out(&key, &bytes)?;
            }
        }
        self.records += 1;
        Ok(())
    }

    fn write_out(&self, key: &PartitionKey, bytes: &[u8]) -> io::Result<()> {
        if bytes.is_empty() {
            return Ok(());
        }
        let path = self.store.partition_path(key);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut f = OpenOptions::new().create(true).append(true).open(&path)?;
        f.write_all(bytes)
    }

    /// Flush everything and report per-partition record counts.
    pub fn finish(mut self) -> io::Result<PartitionReport> {
        let pending = std::mem::take(&mut self.pending);
        for (key, bytes) in &pending {
            self.write_out(key, bytes)?;
        }
        Ok(PartitionReport {
            records: self.records,
            partitions: self.counts,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartitionReport {
    /// Distinct records written (a record counted once even though it also
    /// lands in the `any` partition).
    pub records: usize,
    pub partitions: BTreeMap<PartitionKey, usize>,
}

/// Write a stream of records into the store.
pub fn partition<I>(store: &Store, records: I) -> io::Result<PartitionReport>
where
    I: IntoIterator<Item = MessageRecord>,
{
    let mut w = PartitionWriter::new(store);
    for r in records {
        w.append(&r)?;
    }
    w.finish()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestSummary {
    pub ingested: usize,
    pub rejected: usize,
    /// First few rejections as `(line number, error)`.
    pub sample_errors: Vec<(usize, ParseError)>,
    pub partitions: BTreeMap<PartitionKey, usize>,
}

const KEPT_ERRORS: usize = 20;

/// Parse NDJSON from `input` and partition it into `store`, skipping and
/// counting malformed lines. Parsing runs on the current rayon pool; appends
/// stay in input order.
pub fn ingest_reader<R: BufRead>(input: R, store: &Store) -> io::Result<IngestSummary> {
    let mut writer = PartitionWriter::new(store);
    let mut summary = IngestSummary::default();
    let mut lines = input.split(b'\n');
    let mut line_no = 0usize;
    loop {
        let mut chunk = Vec::with_capacity(LINES_PER_CHUNK);
        for line in lines.by_ref() {
            let mut line = line?;
            line_no += 1;
            if line.last() == Some(&b'\r') {
                line.pop();
            }
            if line.iter().all(|b| b.is_ascii_whitespace()) {
                continue;
            }
            chunk.push((line_no, line));
            if chunk.len() == LINES_PER_CHUNK {
                break;
            }
        }
        if chunk.is_empty() {
            break;
        }
        let parsed: Vec<(usize, Result<MessageRecord, ParseError>)> = chunk
            .par_iter()
            .map(|(n, l)| (*n, parse_record(l)))
            .collect();
        for (n, res) in parsed {
            match res {
                Ok(rec) => {
                    writer.append(&rec)?;
                    summary.ingested += 1;
                }
                Err(e) => {
                    summary.rejected += 1;
                    if summary.sample_errors.len() < KEPT_ERRORS {
                        log::warn!("line {n}: {e}");
                        summary.sample_errors.push((n, e));
                    }
                }
            }
        }
    }
    summary.partitions = writer.finish()?.partitions;
    Ok(summary)
}
