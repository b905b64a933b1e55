use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BaselineError;

pub const MAX_ITERATIONS: usize = 100;
pub const TOLERANCE: f64 = 1e-9;
pub const RESTARTS: usize = 10;

/// One k-means solution over scalar observations.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub centroids: Vec<f64>,
    pub assignments: Vec<usize>,
    /// Sum of squared distances to the assigned centroid.
    pub inertia: f64,
    /// Inertia after every assignment step.
    pub inertia_trace: Vec<f64>,
}

impl KMeansFit {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.centroids.len()];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Index of the closest centroid, lowest index on ties.
pub fn nearest_centroid(x: f64, centroids: &[f64]) -> usize {
    let mut best = 0;
    for (i, c) in centroids.iter().enumerate().skip(1) {
        if (x - c).abs() < (x - centroids[best]).abs() {
            best = i;
        }
    }
    best
}

fn assign(values: &[f64], centroids: &[f64], assignments: &mut [usize]) -> f64 {
    let mut inertia = 0.0;
    for (a, &x) in assignments.iter_mut().zip(values) {
        *a = nearest_centroid(x, centroids);
        inertia += (x - centroids[*a]).powi(2);
    }
    inertia
}

fn plus_plus_init(values: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut centroids = vec![values[rng.gen_range(0..values.len())]];
    let mut d2: Vec<f64> = values.iter().map(|x| (x - centroids[0]).powi(2)).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = values.len() - 1;
            for (i, w) in d2.iter().enumerate() {
                if target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            rng.gen_range(0..values.len())
        };
        let c = values[idx];
        centroids.push(c);
        for (d, x) in d2.iter_mut().zip(values) {
            *d = d.min((x - c).powi(2));
        }
    }
    centroids
}

/// Lloyd iterations from k-means++ seeding until no centroid moves more
/// than [`TOLERANCE`] or [`MAX_ITERATIONS`] is reached. An emptied cluster
/// keeps its previous centroid.
pub fn kmeans_once(values: &[f64], k: usize, rng: &mut ChaCha8Rng) -> KMeansFit {
    let mut centroids = plus_plus_init(values, k, rng);
    let mut assignments = vec![0; values.len()];
    let mut trace = Vec::new();
    for _ in 0..MAX_ITERATIONS {
        trace.push(assign(values, &centroids, &mut assignments));
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&a, &x) in assignments.iter().zip(values) {
            sums[a] += x;
            counts[a] += 1;
        }
        let mut shift: f64 = 0.0;
        for j in 0..k {
            if counts[j] > 0 {
                let c = sums[j] / counts[j] as f64;
                shift = shift.max((c - centroids[j]).abs());
                centroids[j] = c;
            }
        }
        if shift <= TOLERANCE {
            break;
        }
    }
    let inertia = assign(values, &centroids, &mut assignments);
    trace.push(inertia);
    KMeansFit {
        centroids,
        assignments,
        inertia,
        inertia_trace: trace,
    }
}

/// Best of [`RESTARTS`] seeded runs by inertia (first wins ties).
pub fn kmeans(values: &[f64], k: usize, seed: u64) -> Result<KMeansFit, BaselineError> {
    if k == 0 || values.len() < k {
        return Err(BaselineError::TooFewPoints {
            need: k.max(1),
            got: values.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    let mut best: Option<KMeansFit> = None;
    for _ in 0..RESTARTS {
        let fit = kmeans_once(values, k, &mut rng);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Mean silhouette with absolute-difference distance.
///
/// Points in singleton clusters score 0, as do points whose intra- and
/// nearest-cluster distances are both zero.
pub fn silhouette(values: &[f64], assignments: &[usize], centroids: &[f64]) -> Result<f64, BaselineError> {
    let k = centroids.len();
    if k < 2 {
        return Err(BaselineError::SingleCluster);
    }
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); k];
    for (&a, &x) in assignments.iter().zip(values) {
        members[a].push(x);
    }
    if let Some(j) = members.iter().position(Vec::is_empty) {
        return Err(BaselineError::EmptyCluster(j));
    }
    let mean_dist = |x: f64, pts: &[f64]| pts.iter().map(|y| (x - y).abs()).sum::<f64>();
    let mut total = 0.0;
    for (&a, &x) in assignments.iter().zip(values) {
        let own = &members[a];
        if own.len() == 1 {
            continue;
        }
        let intra = mean_dist(x, own) / (own.len() - 1) as f64;
        let nearest = (0..k)
            .filter(|&j| j != a)
            .map(|j| mean_dist(x, &members[j]) / members[j].len() as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = intra.max(nearest);
        if denom > 0.0 {
            total += (nearest - intra) / denom;
        }
    }
    Ok(total / values.len() as f64)
}
