// Smooth two percent series, correlate them, and build a weekly heatmap.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use geolex::baseline::{moving_average, pearson_by_date, weekly_groups, weekly_heatmap};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let start = NaiveDate::from_ymd_opt(2020, 3, 2).expect("date");
    let days: Vec<NaiveDate> = start.iter_days().take(35).collect();
    let ours: Vec<f64> = (0..35).map(|i| -2.0 * i as f64 + if i % 7 >= 5 { -15.0 } else { 0.0 }).collect();
    let external: Vec<f64> = ours.iter().enumerate().map(|(i, v)| 0.8 * v - 5.0 + (i % 3) as f64).collect();

    let smooth = |v: &[f64]| -> BTreeMap<NaiveDate, f64> { days.iter().copied().zip(moving_average(v, 7)).collect() };
    let (a, b) = (smooth(&ours), smooth(&external));
    println!("first smoothed value equals the raw value: {} == {}", a[&start], ours[0]);
    println!("pearson after 7-day smoothing: {:.4}", pearson_by_date(&a, &b)?);

    let raw: BTreeMap<NaiveDate, f64> = days.iter().copied().zip(ours.iter().copied()).collect();
    for (sunday, values) in weekly_groups(&raw) {
        println!("week ending {sunday}: {} days, min {:.0}", values.len(), values.iter().copied().fold(f64::INFINITY, f64::min));
    }

    let percent = BTreeMap::from([("MX".to_string(), raw.clone()), ("AR".to_string(), b.clone())]);
    let travels = BTreeMap::from([("MX".to_string(), 5000.0), ("AR".to_string(), 1200.0)]);
    print!("{}", weekly_heatmap(&percent, &travels, 30).to_csv());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("correlation example");
}
