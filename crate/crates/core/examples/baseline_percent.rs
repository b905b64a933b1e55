// Percent change against a 13-week baseline, weekday medians versus k-means
// centroids, on a series with a mobility collapse and a holiday Monday.

use std::collections::BTreeMap;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use geolex::baseline::{cluster_baseline, percent, weekday_baseline, BaselineModel};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let start = NaiveDate::from_ymd_opt(2020, 1, 6).expect("date");
    let analysis = start + Days::new(91);
    let holiday = analysis + Days::new(7); // a Monday
    let drop_at = analysis + Days::new(21);

    let mut series = BTreeMap::new();
    for d in start.iter_days().take(91 + 42) {
        let mut v = match d.weekday() {
            Weekday::Sat => 600.0,
            Weekday::Sun => 400.0,
            _ => 1000.0,
        };
        if d == holiday {
            v = 400.0;
        }
        if d >= drop_at {
            v *= 0.4;
        }
        series.insert(d, v);
    }

    let weekday = weekday_baseline(&series, analysis, 13)?;
    if let BaselineModel::Weekday(m) = &weekday.model {
        println!("weekday medians Mon..Sun: {m:?}");
    }
    let clusters = cluster_baseline(&series, analysis, 13, (2, 7), 42)?;
    if let BaselineModel::Cluster(c) = &clusters.model {
        println!("k = {} centroids {:?} silhouette {:?}", c.k(), c.centroids, c.silhouette);
    }

    let after: BTreeMap<_, _> = series.range(analysis..).map(|(&d, &v)| (d, v)).collect();
    let pw = percent(&after, &weekday)?;
    let pk = percent(&after, &clusters)?;
    println!("holiday {holiday}: weekday {:.1}%  k-means {:.1}%", pw[&holiday], pk[&holiday]);
    println!("after drop {drop_at}: weekday {:.1}%", pw[&drop_at]);
    assert!((pw[&drop_at] + 60.0).abs() < 1e-9);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("baseline example");
}
