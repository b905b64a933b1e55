use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;

use super::grid::CentroidGrid;
use super::MobilityError;
use crate::geo::{BBox, BBoxKey, GeoShape, Point};
use crate::ingest::{Country, CountryScope, Lang, MessageRecord, PartitionKey, Store};

/// A frequently used place bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct Landmark {
    pub id: u32,
    pub bbox: BBox,
    pub centroid: Point,
    /// Majority country of the records carrying this box, if any had one.
    pub country: Option<Country>,
    /// Number of records carrying this exact box.
    pub support: u64,
}

/// Immutable landmark collection with exact-box and nearest-centroid lookup.
#[derive(Debug, Clone, Default)]
pub struct LandmarkSet {
    landmarks: Vec<Landmark>,
    exact: HashMap<BBoxKey, u32>,
    grid: CentroidGrid,
}

impl LandmarkSet {
    /// Build from landmarks whose ids are `0..n` in order.
    pub fn from_landmarks(landmarks: Vec<Landmark>) -> Result<Self, MobilityError> {
        let mut exact = HashMap::with_capacity(landmarks.len());
        for (i, l) in landmarks.iter().enumerate() {
            if l.id as usize != i {
                return Err(MobilityError::Format(format!(
                    "landmark ids must be dense: position {i} has id {}",
                    l.id
                )));
            }
            if exact.insert(l.bbox.key(), l.id).is_some() {
                return Err(MobilityError::Format(format!("duplicate bbox for id {}", l.id)));
            }
        }
        let grid = CentroidGrid::new(landmarks.iter().map(|l| l.centroid).collect());
        Ok(Self {
            landmarks,
            exact,
            grid,
        })
    }

    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&Landmark> {
        self.landmarks.get(id as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Landmark> {
        self.landmarks.iter()
    }

    pub fn exact_match(&self, bbox: &BBox) -> Option<u32> {
        self.exact.get(&bbox.key()).copied()
    }

    /// Closest landmark centroid; ties go to the lowest id.
    pub fn nearest(&self, p: Point) -> Option<(u32, f64)> {
        self.grid.nearest(p)
    }

    pub fn nearest_linear(&self, p: Point) -> Option<(u32, f64)> {
        self.grid.nearest_linear(p)
    }

    /// Snap a geometry to a landmark.
    ///
    /// A box in the set maps to itself at its centroid. Any other box maps to
    /// the landmark nearest its centroid, positioned at that centroid. A point
    /// maps to the nearest landmark and keeps its exact position.
    pub fn assign(&self, geometry: &GeoShape) -> Result<(u32, Point), MobilityError> {
        if self.is_empty() {
            return Err(MobilityError::EmptyLandmarkSet);
        }
        if let GeoShape::BBox(b) = geometry {
            if let Some(id) = self.exact_match(b) {
                return Ok((id, self.landmarks[id as usize].centroid));
            }
        }
        let position = geometry.position();
        let (id, _) = self.nearest(position).expect("non-empty set");
        Ok((id, position))
    }

    /// Country code of a landmark, `"??"` when unknown.
    pub fn country_label(&self, id: u32) -> String {
        self.get(id)
            .and_then(|l| l.country)
            .map_or_else(|| UNKNOWN_COUNTRY.to_string(), |c| c.to_string())
    }
}

pub const UNKNOWN_COUNTRY: &str = "??";

#[derive(Debug, Default)]
struct Candidate {
    bbox: Option<BBox>,
    support: u64,
    votes: BTreeMap<Country, u64>,
}

/// Two-pass landmark construction: observe every geotagged record, then
/// keep boxes used by more records than 1% of their country's collected
/// days.
#[derive(Debug, Default)]
pub struct LandmarkBuilder {
    candidates: HashMap<BBoxKey, Candidate>,
    country_days: BTreeMap<Country, BTreeSet<NaiveDate>>,
    geotagged_days: BTreeSet<NaiveDate>,
    geotagged: u64,
}

impl LandmarkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, record: &MessageRecord) {
        let Some(geometry) = record.geometry else {
            return;
        };
        self.geotagged += 1;
        let day = record.day();
        self.geotagged_days.insert(day);
        if let Some(c) = record.country {
            self.country_days.entry(c).or_default().insert(day);
        }
        if let GeoShape::BBox(b) = geometry {
            let cand = self.candidates.entry(b.key()).or_default();
            cand.bbox.get_or_insert(b);
            cand.support += 1;
            if let Some(c) = record.country {
                *cand.votes.entry(c).or_insert(0) += 1;
            }
        }
    }

    /// Distinct days with at least one geotagged record of `country`.
    pub fn days_collected(&self, country: Option<Country>) -> u64 {
        match country {
            Some(c) => self.country_days.get(&c).map_or(0, |d| d.len() as u64),
            None => self.geotagged_days.len() as u64,
        }
    }

    pub fn finish(self) -> Result<LandmarkSet, MobilityError> {
        if self.geotagged == 0 {
            return Err(MobilityError::NoGeotaggedData);
        }
        let mut kept: Vec<Landmark> = Vec::new();
        for cand in self.candidates.values() {
            let country = majority(&cand.votes);
            let days = self.days_collected(country);
            // strictly more than 1% of the days
            if cand.support * 100 > days {
                let bbox = cand.bbox.expect("candidate has a box");
                kept.push(Landmark {
                    id: 0,
                    bbox,
                    centroid: bbox.centroid(),
                    country,
                    support: cand.support,
                });
            }
        }
        kept.sort_by(|a, b| b.support.cmp(&a.support).then_with(|| a.bbox.lex_cmp(&b.bbox)));
        for (i, l) in kept.iter_mut().enumerate() {
            l.id = i as u32;
        }
        LandmarkSet::from_landmarks(kept)
    }
}

/// Most voted country; ties go to the alphabetically first code.
fn majority(votes: &BTreeMap<Country, u64>) -> Option<Country> {
    let mut best: Option<(Country, u64)> = None;
    for (&c, &n) in votes {
        if best.is_none_or(|(_, bn)| n > bn) {
            best = Some((c, n));
        }
    }
    best.map(|(c, _)| c)
}

/// Build landmarks from every stored record of the given languages (all
/// languages when `langs` is empty).
pub fn build_landmarks(store: &Store, langs: &[Lang]) -> Result<LandmarkSet, MobilityError> {
    let langs = if langs.is_empty() {
        store.langs()?
    } else {
        langs.to_vec()
    };
    let mut builder = LandmarkBuilder::new();
    for lang in &langs {
        for day in store.days(lang)? {
            store.for_each_record(&PartitionKey::new(lang, day, CountryScope::Any), |r| {
                builder.observe(&r)
            })?;
        }
    }
    builder.finish()
}
