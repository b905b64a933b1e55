use std::collections::BTreeMap;

use chrono::NaiveDate;

use super::landmarks::LandmarkSet;
use super::MobilityError;
use crate::geo::{haversine, Point};
use crate::ingest::{CountryScope, Lang, MessageRecord, PartitionKey, Store};

/// Minimum displacement, in meters, that counts as a trip (exclusive).
pub const MIN_TRIP_METERS: f64 = 100.0;

/// A geotagged message snapped to a landmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visit {
    pub timestamp: i64,
    pub landmark: u32,
    pub position: Point,
}

/// Trips of one user within one day.
///
/// Visits are ordered by timestamp (stable for equal timestamps). Every
/// consecutive pair more than [`MIN_TRIP_METERS`] apart yields one trip
/// between the pair's landmarks.
pub fn detect_trips(visits: &[Visit]) -> Vec<(u32, u32)> {
    let mut sorted: Vec<&Visit> = visits.iter().collect();
    sorted.sort_by_key(|v| v.timestamp);
    sorted
        .windows(2)
        .filter(|w| haversine(w[0].position, w[1].position) > MIN_TRIP_METERS)
        .map(|w| (w[0].landmark, w[1].landmark))
        .collect()
}

/// Directed trip counts between landmarks for one day.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ODMatrix {
    pub day: NaiveDate,
    counts: BTreeMap<(u32, u32), u64>,
}

impl ODMatrix {
    pub fn new(day: NaiveDate) -> Self {
        Self {
            day,
            counts: BTreeMap::new(),
        }
    }

    pub fn from_trips(day: NaiveDate, trips: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut m = Self::new(day);
        for t in trips {
            m.add(t.0, t.1, 1);
        }
        m
    }

    pub fn add(&mut self, origin: u32, dest: u32, count: u64) {
        if count > 0 {
            *self.counts.entry((origin, dest)).or_insert(0) += count;
        }
    }

    pub fn get(&self, origin: u32, dest: u32) -> u64 {
        self.counts.get(&(origin, dest)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((u32, u32), u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Add another day's worth of counts for the same day.
    pub fn merge(&mut self, other: &ODMatrix) {
        for (k, v) in other.entries() {
            self.add(k.0, k.1, v);
        }
    }

    /// Rows `date,origin,dest,count` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,origin,dest,count\n");
        for ((o, d), c) in self.entries() {
            out.push_str(&format!("{},{o},{d},{c}\n", self.day));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Vec<ODMatrix>, MobilityError> {
        let mut by_day: BTreeMap<NaiveDate, ODMatrix> = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            if n == 0 && line.starts_with("date") || line.trim().is_empty() {
                continue;
            }
            let bad = || MobilityError::Format(format!("od line {}: {line:?}", n + 1));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad());
            }
            let day = NaiveDate::parse_from_str(f[0], "%Y-%m-%d").map_err(|_| bad())?;
            let o: u32 = f[1].parse().map_err(|_| bad())?;
            let d: u32 = f[2].parse().map_err(|_| bad())?;
            let c: u64 = f[3].parse().map_err(|_| bad())?;
            by_day.entry(day).or_insert_with(|| ODMatrix::new(day)).add(o, d, c);
        }
        Ok(by_day.into_values().collect())
    }
}

/// OD matrix of one day from records in input order. Records without
/// geometry or from other days are ignored.
pub fn day_od_matrix<'a, I>(day: NaiveDate, records: I, set: &LandmarkSet) -> Result<ODMatrix, MobilityError>
where
    I: IntoIterator<Item = &'a MessageRecord>,
{
    let mut by_user: BTreeMap<&str, Vec<Visit>> = BTreeMap::new();
    for r in records {
        let Some(geometry) = r.geometry.as_ref() else {
            continue;
        };
        if r.day() != day {
            continue;
        }
        let (landmark, position) = set.assign(geometry)?;
        by_user.entry(r.user_id.as_str()).or_default().push(Visit {
            timestamp: r.timestamp.timestamp(),
            landmark,
            position,
        });
    }
    let mut m = ODMatrix::new(day);
    for visits in by_user.values() {
        for (o, d) in detect_trips(visits) {
            m.add(o, d, 1);
        }
    }
    Ok(m)
}

/// OD matrix of one stored day across the given languages (all when empty),
/// reading languages in code order.
pub fn store_od_matrix(
    store: &Store,
    langs: &[Lang],
    day: NaiveDate,
    set: &LandmarkSet,
) -> Result<ODMatrix, MobilityError> {
    let langs = if langs.is_empty() {
        store.langs()?
    } else {
        langs.to_vec()
    };
    let mut records = Vec::new();
    for lang in &langs {
        store.for_each_record(&PartitionKey::new(lang, day, CountryScope::Any), |r| {
            if r.geometry.is_some() {
                records.push(r)
            }
        })?;
    }
    day_od_matrix(day, &records, set)
}
