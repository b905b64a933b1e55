//! Percent-of-baseline mobility: weekday medians or k-means centroids over
//! a training window, plus smoothing, correlation and weekly summaries.

mod kmeans;
mod stats;
mod weekly;

use std::collections::BTreeMap;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use thiserror::Error;

pub use kmeans::{kmeans, kmeans_once, nearest_centroid, silhouette, KMeansFit, MAX_ITERATIONS, RESTARTS, TOLERANCE};
pub use stats::{lower_median, moving_average, pearson, pearson_by_date};
pub use weekly::{iso_week_label, weekly_groups, weekly_heatmap, Heatmap};

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("no baseline observations for {0}")]
    InsufficientBaselineData(Weekday),
    #[error("need at least {need} observations, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("silhouette needs at least two clusters")]
    SingleCluster,
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("baseline is not positive on {0}")]
    ZeroBaseline(NaiveDate),
    #[error("series is constant")]
    ConstantSeries,
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid k range {0}..={1}")]
    BadRange(usize, usize),
}

pub const DEFAULT_WEEKS: u32 = 13;
pub const DEFAULT_K_RANGE: (usize, usize) = (2, 7);

/// Reference level a day's value is compared against.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineModel {
    /// Median per weekday, Monday first.
    Weekday([f64; 7]),
    Cluster(ClusterModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    /// Ascending.
    pub centroids: Vec<f64>,
    /// Silhouette of the chosen k, `None` on the degenerate path.
    pub silhouette: Option<f64>,
    /// `(k, silhouette)` for every k that could be scored.
    pub scores: Vec<(usize, f64)>,
    /// All observations were identical; a single centroid is used.
    pub degenerate: bool,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    /// Training window `[start, end)`.
    pub window: (NaiveDate, NaiveDate),
    pub model: BaselineModel,
}

impl Baseline {
    /// Baseline value for an observation `v` on `date`.
    pub fn reference(&self, date: NaiveDate, v: f64) -> f64 {
        match &self.model {
            BaselineModel::Weekday(m) => m[date.weekday().num_days_from_monday() as usize],
            BaselineModel::Cluster(c) => c.centroids[nearest_centroid(v, &c.centroids)],
        }
    }
}

fn window_start(end: NaiveDate, weeks: u32) -> NaiveDate {
    end.checked_sub_days(Days::new(7 * weeks as u64)).unwrap_or(NaiveDate::MIN)
}

fn window_values(series: &BTreeMap<NaiveDate, f64>, start: NaiveDate, end: NaiveDate) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
    series.range(start..end).map(|(&d, &v)| (d, v))
}

/// Lower median per weekday over the `weeks` weeks before `window_end`.
/// Missing days are tolerated as long as every weekday has a sample.
pub fn weekday_baseline(
    series: &BTreeMap<NaiveDate, f64>,
    window_end: NaiveDate,
    weeks: u32,
) -> Result<Baseline, BaselineError> {
    let start = window_start(window_end, weeks);
    let mut per_day: [Vec<f64>; 7] = Default::default();
    for (d, v) in window_values(series, start, window_end) {
        per_day[d.weekday().num_days_from_monday() as usize].push(v);
    }
    let mut medians = [0.0; 7];
    for (i, vals) in per_day.iter_mut().enumerate() {
        medians[i] = lower_median(vals).ok_or(BaselineError::InsufficientBaselineData(
            Weekday::try_from(i as u8).expect("weekday index"),
        ))?;
    }
    Ok(Baseline {
        window: (start, window_end),
        model: BaselineModel::Weekday(medians),
    })
}

/// Choose k in `k_range` by silhouette over the best-of-restarts k-means of
/// `values`, and return that model's centroids.
pub fn cluster_model(values: &[f64], k_range: (usize, usize), seed: u64) -> Result<ClusterModel, BaselineError> {
    let (k_min, k_max) = k_range;
    if k_min < 2 || k_max < k_min {
        return Err(BaselineError::BadRange(k_min, k_max));
    }
    if values.len() <= k_max {
        return Err(BaselineError::TooFewPoints {
            need: k_max + 1,
            got: values.len(),
        });
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        log::warn!("cluster baseline: all {} observations equal {first}; using a single centroid", values.len());
        return Ok(ClusterModel {
            centroids: vec![first],
            silhouette: None,
            scores: Vec::new(),
            degenerate: true,
        });
    }
    let mut scores = Vec::new();
    let mut best: Option<(f64, KMeansFit)> = None;
    for k in k_min..=k_max {
        let fit = kmeans(values, k, seed)?;
        let Ok(s) = silhouette(values, &fit.assignments, &fit.centroids) else {
            // fewer distinct values than k
            continue;
        };
        scores.push((k, s));
        if best.as_ref().is_none_or(|(bs, _)| s > *bs) {
            best = Some((s, fit));
        }
    }
    let (s, fit) = best.ok_or(BaselineError::TooFewPoints { need: k_min, got: 1 })?;
    let mut centroids = fit.centroids;
    centroids.sort_by(f64::total_cmp);
    Ok(ClusterModel {
        centroids,
        silhouette: Some(s),
        scores,
        degenerate: false,
    })
}

/// k-means baseline trained on the `weeks` weeks before `window_end`.
pub fn cluster_baseline(
    series: &BTreeMap<NaiveDate, f64>,
    window_end: NaiveDate,
    weeks: u32,
    k_range: (usize, usize),
    seed: u64,
) -> Result<Baseline, BaselineError> {
    let start = window_start(window_end, weeks);
    let values: Vec<f64> = window_values(series, start, window_end).map(|(_, v)| v).collect();
    Ok(Baseline {
        window: (start, window_end),
        model: BaselineModel::Cluster(cluster_model(&values, k_range, seed)?),
    })
}

/// `100 * (v - b) / b` for every day, with `b` from the baseline.
pub fn percent(series: &BTreeMap<NaiveDate, f64>, baseline: &Baseline) -> Result<BTreeMap<NaiveDate, f64>, BaselineError> {
    series
        .iter()
        .map(|(&d, &v)| {
            let b = baseline.reference(d, v);
            if b > 0.0 {
                Ok((d, 100.0 * (v - b) / b))
            } else {
                Err(BaselineError::ZeroBaseline(d))
            }
        })
        .collect()
}
