use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate, Weekday};

/// `2020-W10` style label of the ISO week containing `d`.
pub fn iso_week_label(d: NaiveDate) -> String {
    let w = d.iso_week();
    format!("{}-W{:02}", w.year(), w.week())
}

fn week_sunday(d: NaiveDate) -> NaiveDate {
    let w = d.iso_week();
    NaiveDate::from_isoywd_opt(w.year(), w.week(), Weekday::Sun).expect("valid iso week")
}

/// Mean percent per ISO week (rows) and country (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub weeks: Vec<String>,
    pub countries: Vec<String>,
    /// `cells[week][country]`, `None` when the country has no day that week.
    pub cells: Vec<Vec<Option<f64>>>,
}

impl Heatmap {
    pub fn get(&self, week: &str, country: &str) -> Option<f64> {
        let w = self.weeks.iter().position(|x| x == week)?;
        let c = self.countries.iter().position(|x| x == country)?;
        self.cells[w][c]
    }

    /// Wide CSV: `week,<country>...`, empty where no data.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("week");
        for c in &self.countries {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (w, row) in self.weeks.iter().zip(&self.cells) {
            out.push_str(w);
            for cell in row {
                out.push(',');
                if let Some(v) = cell {
                    out.push_str(&v.to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Weekly mean of each country's percent series, keeping the `top` countries
/// by `travels` (descending, ties by code). Countries absent from `travels`
/// count as zero.
pub fn weekly_heatmap(
    percent: &BTreeMap<String, BTreeMap<NaiveDate, f64>>,
    travels: &BTreeMap<String, f64>,
    top: usize,
) -> Heatmap {
    let mut countries: Vec<&String> = percent.keys().collect();
    let total = |c: &String| travels.get(c).copied().unwrap_or(0.0);
    countries.sort_by(|a, b| total(b).total_cmp(&total(a)).then(a.cmp(b)));
    countries.truncate(top);

    // iso (year, week) sorts chronologically
    let mut sums: BTreeMap<(i32, u32), Vec<(f64, usize)>> = BTreeMap::new();
    for (j, c) in countries.iter().enumerate() {
        for (d, &v) in &percent[*c] {
            let w = d.iso_week();
            let row = sums.entry((w.year(), w.week())).or_insert_with(|| vec![(0.0, 0); countries.len()]);
            row[j].0 += v;
            row[j].1 += 1;
        }
    }
    Heatmap {
        weeks: sums.keys().map(|(y, w)| format!("{y}-W{w:02}")).collect(),
        countries: countries.into_iter().cloned().collect(),
        cells: sums
            .into_values()
            .map(|row| row.into_iter().map(|(s, n)| (n > 0).then(|| s / n as f64)).collect())
            .collect(),
    }
}

/// Values grouped by ISO week, each group labelled by its Sunday.
pub fn weekly_groups(series: &BTreeMap<NaiveDate, f64>) -> Vec<(NaiveDate, Vec<f64>)> {
    let mut groups: BTreeMap<NaiveDate, Vec<f64>> = BTreeMap::new();
    for (&d, &v) in series {
        groups.entry(week_sunday(d)).or_default().push(v);
    }
    groups.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn week_of(start: &str, vals: &[f64]) -> BTreeMap<NaiveDate, f64> {
        d(start).iter_days().zip(vals.iter().copied()).collect()
    }

    #[test]
    fn labels() {
        assert_eq!(iso_week_label(d("2020-03-02")), "2020-W10");
        assert_eq!(iso_week_label(d("2021-01-01")), "2020-W53");
        assert_eq!(week_sunday(d("2020-03-02")), d("2020-03-08"));
        assert_eq!(week_sunday(d("2020-03-08")), d("2020-03-08"));
    }

    #[test]
    fn full_week_cell() {
        let p = BTreeMap::from([("MX".to_string(), week_of("2020-03-02", &[-10.0; 7]))]);
        let h = weekly_heatmap(&p, &BTreeMap::new(), 30);
        assert_eq!(h.get("2020-W10", "MX"), Some(-10.0));
        assert_eq!(h.to_csv(), "week,MX\n2020-W10,-10\n");
    }

    #[test]
    fn ordering_and_partial_weeks() {
        let p = BTreeMap::from([
            ("AR".to_string(), week_of("2020-03-07", &[-10.0, -20.0, 0.0])),
            ("MX".to_string(), week_of("2020-03-09", &[5.0])),
            ("CO".to_string(), week_of("2020-03-09", &[1.0])),
        ]);
        let travels = BTreeMap::from([("MX".to_string(), 100.0), ("AR".to_string(), 10.0), ("CO".to_string(), 10.0)]);
        let h = weekly_heatmap(&p, &travels, 2);
        assert_eq!(h.countries, vec!["MX", "AR"]);
        assert_eq!(h.weeks, vec!["2020-W10", "2020-W11"]);
        assert_eq!(h.get("2020-W10", "AR"), Some(-15.0));
        assert_eq!(h.get("2020-W11", "AR"), Some(0.0));
        assert_eq!(h.get("2020-W10", "MX"), None);
    }

    #[test]
    fn groups_by_sunday() {
        let g = weekly_groups(&week_of("2020-03-07", &[1.0, 2.0, 3.0]));
        assert_eq!(g, vec![(d("2020-03-08"), vec![1.0, 2.0]), (d("2020-03-15"), vec![3.0])]);
    }
}
