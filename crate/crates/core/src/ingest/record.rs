use std::fmt;

use chrono::{DateTime, NaiveDate, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::geo::{BBox, GeoShape, Point};

/// Why a line was rejected. Each variant names the offending field.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("malformed json: {0}")]
    MalformedJson(String),
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("invalid coordinate in `geo`: {0}")]
    InvalidCoordinate(String),
    #[error("invalid timestamp `{0}`")]
    InvalidTimestamp(String),
    #[error("invalid value for `{field}`: {value:?}")]
    InvalidField { field: &'static str, value: String },
}

/// Two-letter lowercase language code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Lang(String);

impl Lang {
    pub fn parse(raw: &str) -> Option<Self> {
        let lower = raw.trim().to_ascii_lowercase();
        (lower.len() == 2 && lower.bytes().all(|b| b.is_ascii_lowercase())).then_some(Lang(lower))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Lang {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        Lang::parse(&s).ok_or_else(|| format!("invalid language code {s:?}"))
    }
}

impl From<Lang> for String {
    fn from(l: Lang) -> String {
        l.0
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// ISO-3166 alpha-2 country code, stored uppercase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Country([u8; 2]);

impl Country {
    pub fn parse(raw: &str) -> Option<Self> {
        let b = raw.trim().as_bytes();
        if b.len() == 2 && b.iter().all(|c| c.is_ascii_alphabetic()) {
            Some(Country([b[0].to_ascii_uppercase(), b[1].to_ascii_uppercase()]))
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("ascii")
    }

    pub fn bytes(&self) -> [u8; 2] {
        self.0
    }
}

impl fmt::Display for Country {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Country dimension of a partition: a concrete country or every record of
/// the day and language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CountryScope {
    Any,
    Country(Country),
}

impl CountryScope {
    pub fn parse(raw: &str) -> Option<Self> {
        if raw.eq_ignore_ascii_case("any") {
            Some(CountryScope::Any)
        } else {
            Country::parse(raw).map(CountryScope::Country)
        }
    }
}

impl fmt::Display for CountryScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountryScope::Any => f.write_str("any"),
            CountryScope::Country(c) => c.fmt(f),
        }
    }
}

/// One tweet-shaped input event.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageRecord {
    pub user_id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
    pub lang: Lang,
    pub country: Option<Country>,
    pub geometry: Option<GeoShape>,
}

impl MessageRecord {
    /// UTC calendar day the record belongs to.
    pub fn day(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }

    /// Canonical single-line JSON encoding, accepted back by [`parse_record`].
    pub fn to_json_line(&self) -> String {
        let mut obj = serde_json::Map::new();
        obj.insert("user_id".into(), Value::from(self.user_id.as_str()));
        obj.insert(
            "timestamp".into(),
            Value::from(self.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true)),
        );
        obj.insert("text".into(), Value::from(self.text.as_str()));
        obj.insert("lang".into(), Value::from(self.lang.as_str()));
        if let Some(c) = self.country {
            obj.insert("country".into(), Value::from(c.as_str()));
        }
        if let Some(g) = self.geometry {
            let geo = match g {
                GeoShape::Point(p) => serde_json::json!({ "point": [p.lat, p.lon] }),
                GeoShape::BBox(b) => {
                    serde_json::json!({ "bbox": [b.min_lon, b.min_lat, b.max_lon, b.max_lat] })
                }
            };
            obj.insert("geo".into(), geo);
        }
        Value::Object(obj).to_string()
    }
}

#[derive(Deserialize)]
struct RawRecord {
    user_id: Option<Value>,
    timestamp: Option<Value>,
    text: Option<String>,
    lang: Option<String>,
    country: Option<String>,
    geo: Option<Value>,
}

/// Parse and validate one NDJSON line.
///
/// `geo` is either `{"point":[lat,lon]}` or
/// `{"bbox":[min_lon,min_lat,max_lon,max_lat]}`. A `"v"` schema field and
/// any other unknown field are ignored.
pub fn parse_record(line: &[u8]) -> Result<MessageRecord, ParseError> {
    let raw: RawRecord =
        serde_json::from_slice(line).map_err(|e| ParseError::MalformedJson(e.to_string()))?;

    let user_id = match raw.user_id {
        None | Some(Value::Null) => return Err(ParseError::MissingField("user_id")),
        Some(Value::String(s)) => s,
        Some(Value::Number(n)) => n.to_string(),
        Some(other) => {
            return Err(ParseError::InvalidField {
                field: "user_id",
                value: other.to_string(),
            })
        }
    };
    let ts_raw = match raw.timestamp {
        None | Some(Value::Null) => return Err(ParseError::MissingField("timestamp")),
        Some(Value::String(s)) => s,
        Some(other) => return Err(ParseError::InvalidTimestamp(other.to_string())),
    };
    let timestamp = parse_timestamp(&ts_raw)?;
    let text = raw.text.ok_or(ParseError::MissingField("text"))?;
    let lang_raw = raw.lang.ok_or(ParseError::MissingField("lang"))?;
    let lang = Lang::parse(&lang_raw).ok_or(ParseError::InvalidField {
        field: "lang",
        value: lang_raw,
    })?;
    let country = match raw.country {
        None => None,
        Some(c) if c.is_empty() => None,
        Some(c) => Some(Country::parse(&c).ok_or(ParseError::InvalidField {
            field: "country",
            value: c,
        })?),
    };
    let geometry = match raw.geo {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_geo(&v)?),
    };

    Ok(MessageRecord {
        user_id,
        timestamp,
        text,
        lang,
        country,
        geometry,
    })
}

fn parse_timestamp(raw: &str) -> Result<DateTime<Utc>, ParseError> {
    let dt = DateTime::parse_from_rfc3339(raw.trim())
        .map_err(|_| ParseError::InvalidTimestamp(raw.to_string()))?
        .with_timezone(&Utc);
    // seconds resolution
    DateTime::from_timestamp(dt.timestamp(), 0).ok_or(ParseError::InvalidTimestamp(raw.into()))
}

fn parse_geo(v: &Value) -> Result<GeoShape, ParseError> {
    let obj = v
        .as_object()
        .ok_or_else(|| ParseError::InvalidCoordinate(format!("expected object, got {v}")))?;
    let numbers = |key: &str, n: usize| -> Result<Vec<f64>, ParseError> {
        let arr = obj[key]
            .as_array()
            .filter(|a| a.len() == n)
            .ok_or_else(|| ParseError::InvalidCoordinate(format!("`{key}` needs {n} numbers")))?;
        arr.iter()
            .map(|x| {
                x.as_f64()
                    .ok_or_else(|| ParseError::InvalidCoordinate(format!("non-numeric {x}")))
            })
            .collect()
    };
    let shape = if obj.contains_key("point") {
        let c = numbers("point", 2)?;
        GeoShape::Point(Point::new(c[0], c[1]))
    } else if obj.contains_key("bbox") {
        let c = numbers("bbox", 4)?;
        GeoShape::BBox(BBox::new(c[0], c[1], c[2], c[3]))
    } else {
        return Err(ParseError::InvalidCoordinate(
            "expected `point` or `bbox`".into(),
        ));
    };
    if shape.is_valid() {
        Ok(shape)
    } else {
        Err(ParseError::InvalidCoordinate(format!("{shape:?}")))
    }
}
