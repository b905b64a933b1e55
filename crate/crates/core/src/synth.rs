//! Seeded generator of tweet-shaped NDJSON for exercising the pipeline.
//!
//! Every user has a home and a work place in one city. On a travel day the
//! user posts at home, at work and at home again, which makes exactly two
//! trips; other days only home posts. The number of travellers per country
//! and day is `round(users * share * weekday_factor * (1 - drop))`, so the
//! downstream trip counts are known exactly.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use chrono::{DateTime, Datelike, Days, NaiveDate, TimeZone, Utc, Weekday};
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geo::{destination, BBox, GeoShape, Point};
use crate::ingest::{Country, Lang, MessageRecord};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("unknown profile `{0}` (expected commuters, static or mixed-drop)")]
    UnknownProfile(String),
    #[error("drop must be within 0..=100, got {0}")]
    BadDrop(f64),
    #[error("invalid drop date `{0}` (expected YYYY-MM-DD or dayN)")]
    BadDate(String),
    #[error("unknown country `{0}`")]
    UnknownCountry(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Commuters,
    /// Nobody leaves home: the pipeline must see no trips.
    Static,
    /// Commuters whose travel collapses by `drop` percent from a given day.
    MixedDrop,
}

impl FromStr for Profile {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "commuters" => Ok(Profile::Commuters),
            "static" => Ok(Profile::Static),
            "mixed-drop" => Ok(Profile::MixedDrop),
            _ => Err(SynthError::UnknownProfile(s.to_string())),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Commuters => "commuters",
            Profile::Static => "static",
            Profile::MixedDrop => "mixed-drop",
        })
    }
}

/// A country the generator can place users in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountrySpec {
    pub code: &'static str,
    pub lang: &'static str,
    /// City centre, lat/lon.
    pub centre: (f64, f64),
    /// Words only users of this country write.
    pub words: &'static [&'static str],
}

pub const COUNTRIES: &[CountrySpec] = &[
    CountrySpec { code: "MX", lang: "es", centre: (19.43, -99.13), words: &["chido", "güey", "padre", "neta", "camión", "chamba"] },
    CountrySpec { code: "CO", lang: "es", centre: (4.71, -74.07), words: &["parce", "bacano", "chévere", "tinto", "berraco", "guayabo"] },
    CountrySpec { code: "AR", lang: "es", centre: (-34.60, -58.38), words: &["che", "boludo", "laburo", "colectivo", "mina", "quilombo"] },
    CountrySpec { code: "ES", lang: "es", centre: (40.42, -3.70), words: &["tío", "guay", "vale", "curro", "mola", "autobús"] },
    CountrySpec { code: "CL", lang: "es", centre: (-33.45, -70.67), words: &["weón", "bacán", "pega", "micro", "fome", "cachai"] },
    CountrySpec { code: "US", lang: "en", centre: (40.71, -74.01), words: &["awesome", "gonna", "subway", "y'all", "dude", "downtown"] },
    CountrySpec { code: "GB", lang: "en", centre: (51.51, -0.13), words: &["cheers", "mate", "brilliant", "tube", "queue", "lorry"] },
    CountrySpec { code: "CA", lang: "en", centre: (43.65, -79.38), words: &["eh", "toque", "loonie", "poutine", "washroom", "streetcar"] },
    CountrySpec { code: "BR", lang: "pt", centre: (-23.55, -46.63), words: &["saudade", "legal", "trampo", "ônibus", "galera", "valeu"] },
    CountrySpec { code: "FR", lang: "fr", centre: (48.86, 2.35), words: &["boulot", "métro", "ouais", "truc", "sympa", "bagnole"] },
];

const SHARED_WORDS: &[(&str, &[&str])] = &[
    ("es", &["hoy", "casa", "trabajo", "mañana", "amigos", "comida", "feliz", "día", "noche", "ciudad", "buenos", "gracias"]),
    ("en", &["today", "home", "work", "morning", "friends", "food", "happy", "day", "night", "city", "good", "thanks"]),
    ("pt", &["hoje", "casa", "trabalho", "manhã", "amigos", "comida", "feliz", "dia", "noite", "cidade", "bom", "obrigado"]),
    ("fr", &["aujourd'hui", "maison", "travail", "matin", "amis", "repas", "heureux", "jour", "nuit", "ville", "bon", "merci"]),
];

const EMOJIS: &[&str] = &["😀", "🎉", "❤️", "🚌", "☕", "👍🏽"];

pub fn country_spec(code: &str) -> Result<&'static CountrySpec, SynthError> {
    COUNTRIES
        .iter()
        .find(|c| c.code.eq_ignore_ascii_case(code))
        .ok_or_else(|| SynthError::UnknownCountry(code.to_string()))
}

/// Monday to Friday travel fully, Saturday 60%, Sunday 40%.
pub fn weekday_factor(w: Weekday) -> f64 {
    match w {
        Weekday::Sat => 0.6,
        Weekday::Sun => 0.4,
        _ => 1.0,
    }
}

/// Parse `YYYY-MM-DD` or `dayN` (N days after `start`).
pub fn parse_day(s: &str, start: NaiveDate) -> Result<NaiveDate, SynthError> {
    if let Some(n) = s.strip_prefix("day") {
        let n: u64 = n.parse().map_err(|_| SynthError::BadDate(s.to_string()))?;
        return start.checked_add_days(Days::new(n)).ok_or_else(|| SynthError::BadDate(s.to_string()));
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| SynthError::BadDate(s.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub profile: Profile,
    pub users: usize,
    pub days: u32,
    pub seed: u64,
    pub start: NaiveDate,
    /// Percent of travel removed from `drop_at` on (mixed-drop only).
    pub drop: f64,
    pub drop_at: Option<NaiveDate>,
    pub countries: Vec<&'static CountrySpec>,
    /// Fraction of a country's users travelling on a full weekday.
    pub travel_share: f64,
    /// Extra non-geotagged text posts per user and day.
    pub chatter: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            profile: Profile::Commuters,
            users: 200,
            days: 28,
            seed: 42,
            start: NaiveDate::from_ymd_opt(2020, 1, 6).expect("valid date"),
            drop: 60.0,
            drop_at: None,
            countries: COUNTRIES[..4].iter().collect(),
            travel_share: 0.5,
            chatter: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(0.0..=100.0).contains(&self.drop) {
            return Err(SynthError::BadDrop(self.drop));
        }
        Ok(())
    }

    fn dropped(&self, day: NaiveDate) -> bool {
        self.profile == Profile::MixedDrop && self.drop_at.is_some_and(|at| day >= at)
    }

    /// Planned travellers of a country with `n` users on `day`.
    pub fn travellers(&self, n: usize, day: NaiveDate) -> usize {
        if self.profile == Profile::Static {
            return 0;
        }
        let mut x = n as f64 * self.travel_share * weekday_factor(day.weekday());
        if self.dropped(day) {
            x *= 1.0 - self.drop / 100.0;
        }
        (x.round() as usize).min(n)
    }

    /// Trips each country should show on `day`: two per traveller.
    pub fn expected_trips(&self, day: NaiveDate) -> Vec<(&'static str, u64)> {
        let per = users_per_country(self.users, self.countries.len());
        self.countries
            .iter()
            .zip(per)
            .map(|(c, n)| (c.code, 2 * self.travellers(n, day) as u64))
            .collect()
    }
}

fn users_per_country(users: usize, countries: usize) -> Vec<usize> {
    (0..countries).map(|i| users / countries + usize::from(i < users % countries)).collect()
}

#[derive(Debug, Clone)]
struct Place {
    bbox: BBox,
}

impl Place {
    fn centre(&self) -> Point {
        self.bbox.centroid()
    }
}

#[derive(Debug, Clone)]
struct User {
    id: String,
    country: usize,
    home: usize,
    work: usize,
}

struct World {
    /// Places per country.
    places: Vec<Vec<Place>>,
    users: Vec<User>,
}

/// About 200 m boxes on a 2 km grid around the centre, so jittered points
/// always snap back to their own place.
fn city_places(centre: (f64, f64), n: usize) -> Vec<Place> {
    let side = (n as f64).sqrt().ceil() as usize;
    let origin = Point::new(centre.0, centre.1);
    (0..n)
        .map(|i| {
            let (r, c) = ((i / side) as f64, (i % side) as f64);
            let north = destination(origin, 0.0, 2000.0 * r);
            let p = destination(north, 90.0, 2000.0 * c);
            let sw = destination(destination(p, 180.0, 100.0), 270.0, 100.0);
            let ne = destination(destination(p, 0.0, 100.0), 90.0, 100.0);
            Place { bbox: BBox::new(sw.lon, sw.lat, ne.lon, ne.lat) }
        })
        .collect()
}

fn build_world(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> World {
    let per = users_per_country(cfg.users, cfg.countries.len());
    let mut places = Vec::new();
    let mut users = Vec::new();
    for (ci, (spec, &n)) in cfg.countries.iter().zip(&per).enumerate() {
        let n_places = (n / 2).clamp(2, 25);
        places.push(city_places(spec.centre, n_places));
        for u in 0..n {
            // every place is somebody's home once there are enough users
            let home = u % n_places;
            let mut work = rng.gen_range(0..n_places - 1);
            if work >= home {
                work += 1;
            }
            users.push(User {
                id: format!("{}-{u:05}", spec.code.to_ascii_lowercase()),
                country: ci,
                home,
                work,
            });
        }
    }
    World { places, users }
}

fn text(spec: &CountrySpec, rng: &mut ChaCha8Rng) -> String {
    let shared = SHARED_WORDS.iter().find(|(l, _)| *l == spec.lang).map_or(&[][..], |(_, w)| *w);
    let n = rng.gen_range(3..8);
    let mut words: Vec<String> = Vec::with_capacity(n + 2);
    for _ in 0..n {
        let pool = if rng.gen_bool(0.35) { spec.words } else { shared };
        words.push(pool.choose(rng).copied().unwrap_or("x").to_string());
    }
    if rng.gen_bool(0.1) {
        words.insert(0, format!("@user{}", rng.gen_range(0..100)));
    }
    if rng.gen_bool(0.1) {
        words.push(EMOJIS.choose(rng).expect("emoji").to_string());
    }
    if rng.gen_bool(0.05) {
        words.push(format!("https://t.co/{:x}", rng.gen::<u32>()));
    }
    words.join(" ")
}

fn at(day: NaiveDate, rng: &mut ChaCha8Rng, hours: std::ops::Range<u32>) -> DateTime<Utc> {
    let secs = rng.gen_range(hours.start * 3600..hours.end * 3600);
    Utc.from_utc_datetime(&day.and_hms_opt(0, 0, 0).expect("midnight")) + chrono::Duration::seconds(secs as i64)
}

fn jitter(p: Point, rng: &mut ChaCha8Rng) -> GeoShape {
    GeoShape::Point(destination(p, rng.gen_range(0.0..360.0), rng.gen_range(0.0..30.0)))
}

/// Records of one day, ordered by timestamp then user.
pub fn day_records(cfg: &SynthConfig, day_index: u32) -> Vec<MessageRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let world = build_world(cfg, &mut rng);
    day_records_in(cfg, &world, day_index)
}

fn day_records_in(cfg: &SynthConfig, world: &World, day_index: u32) -> Vec<MessageRecord> {
    let day = cfg.start + Days::new(day_index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(day_index as u64 + 1);
    let mut out = Vec::new();

    let mut travelling = vec![false; world.users.len()];
    let mut offset = 0;
    for n in users_per_country(cfg.users, cfg.countries.len()) {
        let t = cfg.travellers(n, day);
        for i in sample(&mut rng, n, t) {
            travelling[offset + i] = true;
        }
        offset += n;
    }

    for (u, user) in world.users.iter().enumerate() {
        let spec = cfg.countries[user.country];
        let lang = Lang::parse(spec.lang).expect("valid lang");
        let country = Country::parse(spec.code);
        let places = &world.places[user.country];
        let home = &places[user.home];
        let mut post = |ts: DateTime<Utc>, geometry: Option<GeoShape>, rng: &mut ChaCha8Rng| {
            out.push(MessageRecord {
                user_id: user.id.clone(),
                timestamp: ts,
                text: text(spec, rng),
                lang: lang.clone(),
                country,
                geometry,
            });
        };
        post(at(day, &mut rng, 6..9), Some(GeoShape::BBox(home.bbox)), &mut rng);
        if travelling[u] {
            let work = &places[user.work];
            post(at(day, &mut rng, 11..14), Some(GeoShape::BBox(work.bbox)), &mut rng);
        }
        let evening = if rng.gen_bool(0.5) {
            jitter(home.centre(), &mut rng)
        } else {
            GeoShape::BBox(home.bbox)
        };
        post(at(day, &mut rng, 19..23), Some(evening), &mut rng);
        for _ in 0..cfg.chatter {
            post(at(day, &mut rng, 0..24), None, &mut rng);
        }
    }
    out.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.user_id.cmp(&b.user_id)));
    out
}

/// Write the whole stream as NDJSON and return the number of records.
pub fn generate(cfg: &SynthConfig, mut out: impl Write) -> io::Result<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let world = build_world(cfg, &mut rng);
    let mut n = 0;
    for d in 0..cfg.days {
        for r in day_records_in(cfg, &world, d) {
            out.write_all(r.to_json_line().as_bytes())?;
            out.write_all(b"\n")?;
            n += 1;
        }
    }
    Ok(n)
}
