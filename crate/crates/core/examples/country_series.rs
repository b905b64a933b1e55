// Inside, inward, outward and overall trips per country and day.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use geolex::geo::{BBox, Point};
use geolex::ingest::Country;
use geolex::mobility::{country_series, series_csv, Landmark, LandmarkSet, Measure, ODMatrix};

fn landmark(id: u32, lat: f64, lon: f64, country: &str) -> Landmark {
    let bbox = BBox::new(lon - 0.001, lat - 0.001, lon + 0.001, lat + 0.001);
    Landmark { id, bbox, centroid: Point::new(lat, lon), country: Country::parse(country), support: 10 }
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let set = LandmarkSet::from_landmarks(vec![
        landmark(0, 19.43, -99.13, "MX"),
        landmark(1, 20.67, -103.35, "MX"),
        landmark(2, 45.50, -73.57, "CA"),
    ])?;
    let d = |day| NaiveDate::from_ymd_opt(2020, 3, day).expect("date");
    let days = vec![
        ODMatrix::from_trips(d(1), [(0, 1), (1, 0), (0, 2)]),
        ODMatrix::from_trips(d(2), [(2, 0), (2, 0)]),
    ];
    let series = country_series(&days, &set)?;
    for s in series.values() {
        let overall: BTreeMap<_, _> = s.values(Measure::Overall);
        println!("{}: overall {:?}", s.country, overall.values().collect::<Vec<_>>());
    }
    assert_eq!(series["MX"].days[&d(1)].inside, 2);
    assert_eq!(series["CA"].days[&d(2)].outward, 2);
    print!("{}", series_csv(series.values(), Measure::Overall));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("series example");
}
