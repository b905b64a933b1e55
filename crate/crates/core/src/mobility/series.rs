use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;

use super::landmarks::LandmarkSet;
use super::trips::ODMatrix;
use super::MobilityError;

/// Trip counts touching one country on one day.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Measures {
    pub inside: u64,
    pub inward: u64,
    pub outward: u64,
}

impl Measures {
    pub fn overall(&self) -> u64 {
        self.inside + self.inward + self.outward
    }

    pub fn get(&self, m: Measure) -> u64 {
        match m {
            Measure::Inside => self.inside,
            Measure::Inward => self.inward,
            Measure::Outward => self.outward,
            Measure::Overall => self.overall(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Inside,
    Inward,
    Outward,
    Overall,
}

impl FromStr for Measure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inside" => Ok(Measure::Inside),
            "inward" => Ok(Measure::Inward),
            "outward" => Ok(Measure::Outward),
            "overall" => Ok(Measure::Overall),
            _ => Err(format!("unknown measure {s:?} (inside|inward|outward|overall)")),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Inside => "inside",
            Measure::Inward => "inward",
            Measure::Outward => "outward",
            Measure::Overall => "overall",
        })
    }
}

/// Daily mobility measures of one country.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobilitySeries {
    pub country: String,
    pub days: BTreeMap<NaiveDate, Measures>,
}

impl MobilitySeries {
    pub fn values(&self, m: Measure) -> BTreeMap<NaiveDate, f64> {
        self.days.iter().map(|(&d, v)| (d, v.get(m) as f64)).collect()
    }

    pub fn total(&self, m: Measure) -> u64 {
        self.days.values().map(|v| v.get(m)).sum()
    }
}

/// Per-country inside/inward/outward series from daily OD matrices.
///
/// Every day present in `matrices` gets an entry for every country of the
/// landmark set, zero when it saw no trips. Landmarks without a country are
/// grouped under `"??"`.
pub fn country_series(
    matrices: &[ODMatrix],
    set: &LandmarkSet,
) -> Result<BTreeMap<String, MobilitySeries>, MobilityError> {
    let mut countries: BTreeSet<String> = set.iter().map(|l| set.country_label(l.id)).collect();
    let days: BTreeSet<NaiveDate> = matrices.iter().map(|m| m.day).collect();
    let mut acc: BTreeMap<String, BTreeMap<NaiveDate, Measures>> = BTreeMap::new();
    for m in matrices {
        for ((o, d), n) in m.entries() {
            if set.get(o).is_none() {
                return Err(MobilityError::UnknownLandmark(o));
            }
            if set.get(d).is_none() {
                return Err(MobilityError::UnknownLandmark(d));
            }
            let (co, cd) = (set.country_label(o), set.country_label(d));
            if co == cd {
                acc.entry(co).or_default().entry(m.day).or_default().inside += n;
            } else {
                acc.entry(co.clone()).or_default().entry(m.day).or_default().outward += n;
                acc.entry(cd.clone()).or_default().entry(m.day).or_default().inward += n;
                countries.insert(co);
                countries.insert(cd);
            }
        }
    }
    Ok(countries
        .into_iter()
        .map(|c| {
            let seen = acc.remove(&c).unwrap_or_default();
            let full = days
                .iter()
                .map(|&d| (d, seen.get(&d).copied().unwrap_or_default()))
                .collect();
            (
                c.clone(),
                MobilitySeries {
                    country: c,
                    days: full,
                },
            )
        })
        .collect())
}

/// Rows `date,country,value` for the chosen measure, ordered by date then
/// country.
pub fn series_csv<'a>(
    series: impl IntoIterator<Item = &'a MobilitySeries>,
    measure: Measure,
) -> String {
    let mut rows: Vec<(NaiveDate, &str, u64)> = Vec::new();
    for s in series {
        for (&d, m) in &s.days {
            rows.push((d, s.country.as_str(), m.get(measure)));
        }
    }
    rows.sort();
    let mut out = String::from("date,country,value\n");
    for (d, c, v) in rows {
        out.push_str(&format!("{d},{c},{v}\n"));
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::BBox;
    use crate::ingest::Country;
    use crate::mobility::Landmark;

    fn set(countries: &[Option<&str>]) -> LandmarkSet {
        let ls = countries
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let b = BBox::new(i as f64, 0.0, i as f64 + 0.01, 0.01);
                Landmark {
                    id: i as u32,
                    bbox: b,
                    centroid: b.centroid(),
                    country: c.and_then(Country::parse),
                    support: 1,
                }
            })
            .collect();
        LandmarkSet::from_landmarks(ls).unwrap()
    }

    fn day(n: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 3, n).unwrap()
    }

    #[test]
    fn single_inside_trip() {
        let s = set(&[Some("MX"), Some("MX"), Some("US")]);
        let out = country_series(&[ODMatrix::from_trips(day(1), [(0, 1)])], &s).unwrap();
        let mx = out["MX"].days[&day(1)];
        assert_eq!(mx, Measures { inside: 1, inward: 0, outward: 0 });
        assert_eq!(mx.overall(), 1);
        assert_eq!(out["US"].days[&day(1)], Measures::default());
    }

    #[test]
    fn cross_border_trip() {
        let s = set(&[Some("MX"), Some("US")]);
        let out = country_series(&[ODMatrix::from_trips(day(1), [(0, 1)])], &s).unwrap();
        assert_eq!(out["MX"].days[&day(1)], Measures { inside: 0, inward: 0, outward: 1 });
        assert_eq!(out["US"].days[&day(1)], Measures { inside: 0, inward: 1, outward: 0 });
        assert_eq!(out["MX"].days[&day(1)].overall(), 1);
        assert_eq!(out["US"].days[&day(1)].overall(), 1);
    }

    #[test]
    fn unknown_countries_and_self_loops() {
        let s = set(&[None, Some("MX")]);
        let out = country_series(&[ODMatrix::from_trips(day(1), [(0, 0), (1, 0)])], &s).unwrap();
        assert_eq!(out["??"].days[&day(1)], Measures { inside: 1, inward: 1, outward: 0 });
        assert_eq!(out["MX"].days[&day(1)].outward, 1);
    }

    #[test]
    fn overall_over_a_week_and_conservation() {
        let s = set(&[Some("MX"), Some("MX"), Some("US"), Some("CA")]);
        let ms: Vec<ODMatrix> = (1..=7)
            .map(|i| ODMatrix::from_trips(day(i), (0..i).map(|k| ((k % 4), ((k * 3 + 1) % 4)))))
            .collect();
        let out = country_series(&ms, &s).unwrap();
        let mx = &out["MX"];
        let summed: u64 = mx.days.values().map(|m| m.inside + m.inward + m.outward).sum();
        assert_eq!(mx.total(Measure::Overall), summed);
        let total: u64 = ms.iter().map(ODMatrix::total).sum();
        let out_side: u64 = out.values().map(|s| s.total(Measure::Inside) + s.total(Measure::Outward)).sum();
        let in_side: u64 = out.values().map(|s| s.total(Measure::Inside) + s.total(Measure::Inward)).sum();
        assert_eq!(out_side, total);
        assert_eq!(in_side, total);
    }

    #[test]
    fn unknown_landmark_is_an_error() {
        let s = set(&[Some("MX")]);
        assert!(country_series(&[ODMatrix::from_trips(day(1), [(0, 5)])], &s).is_err());
    }

    #[test]
    fn csv_rows() {
        let s = set(&[Some("MX"), Some("US")]);
        let out = country_series(&[ODMatrix::from_trips(day(2), [(0, 1)]), ODMatrix::new(day(1))], &s).unwrap();
        assert_eq!(
            series_csv(out.values(), Measure::Overall),
            "date,country,value\n2020-03-01,MX,0\n2020-03-01,US,0\n2020-03-02,MX,1\n2020-03-02,US,1\n"
        );
        assert_eq!("inward".parse::<Measure>(), Ok(Measure::Inward));
        assert!("sideways".parse::<Measure>().is_err());
    }
}
