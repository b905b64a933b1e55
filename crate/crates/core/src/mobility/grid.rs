use std::collections::HashMap;

use crate::geo::{haversine, Point, EARTH_RADIUS_M};

/// Rings searched before falling back to a linear scan.
const MAX_RING: i32 = 45;

/// 1°×1° bucket grid over landmark centroids with exact nearest lookup.
#[derive(Debug, Clone, Default)]
pub struct CentroidGrid {
    cells: HashMap<(i32, i32), Vec<u32>>,
    points: Vec<Point>,
}

fn cell_of(p: Point) -> (i32, i32) {
    let lat = (p.lat.floor() as i32).clamp(-90, 89);
    let lon = wrap_lon(p.lon.floor() as i32);
    (lat, lon)
}

fn wrap_lon(j: i32) -> i32 {
    (j + 180).rem_euclid(360) - 180
}

/// Lower bound on the distance from `q` to any centroid outside the square
/// of cells within Chebyshev radius `r` of `q`'s cell. Such a centroid is at
/// least `r` degrees away in latitude or (cyclically) in longitude; the
/// longitude case is bounded by the cross-track distance to the nearest
/// such meridian.
fn unexplored_bound(q: Point, r: i32) -> f64 {
    let delta = (r as f64).to_radians().min(std::f64::consts::FRAC_PI_2);
    let lat_bound = delta;
    let lon_bound = (q.lat.to_radians().cos().max(0.0) * delta.sin()).min(1.0).asin();
    EARTH_RADIUS_M * lat_bound.min(lon_bound)
}

impl CentroidGrid {
    /// `points[i]` is the centroid of landmark `i`.
    pub fn new(points: Vec<Point>) -> Self {
        let mut cells: HashMap<(i32, i32), Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(cell_of(*p)).or_default().push(i as u32);
        }
        Self { cells, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Closest centroid by haversine distance; ties go to the lowest id.
    pub fn nearest(&self, q: Point) -> Option<(u32, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let (ci, cj) = cell_of(q);
        let mut best: Option<(u32, f64)> = None;
        for r in 0..=MAX_RING {
            for di in -r..=r {
                let i = ci + di;
                if !(-90..=89).contains(&i) {
                    continue;
                }
                let edge = di.abs() == r;
                let mut dj = -r;
                while dj <= r {
                    if let Some(ids) = self.cells.get(&(i, wrap_lon(cj + dj))) {
                        for &id in ids {
                            consider(&mut best, id, haversine(q, self.points[id as usize]));
                        }
                    }
                    // interior rows only touch the two side columns
                    dj += if edge || dj == r { 1 } else { 2 * r };
                }
            }
            if let Some((_, d)) = best {
                if d < unexplored_bound(q, r) {
                    return best;
                }
            }
        }
        self.nearest_linear(q)
    }

    /// Reference linear scan with the same tie rule.
    pub fn nearest_linear(&self, q: Point) -> Option<(u32, f64)> {
        let mut best = None;
        for (id, p) in self.points.iter().enumerate() {
            consider(&mut best, id as u32, haversine(q, *p));
        }
        best
    }
}

fn consider(best: &mut Option<(u32, f64)>, id: u32, d: f64) {
    match *best {
        Some((bid, bd)) if d > bd || (d == bd && id > bid) => {}
        _ => *best = Some((id, d)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_grid() {
        assert_eq!(CentroidGrid::new(vec![]).nearest(Point::new(0.0, 0.0)), None);
    }

    #[test]
    fn equidistant_tie_goes_to_lowest_id() {
        let q = Point::new(10.0, 10.0);
        let pts = vec![
            Point::new(50.0, 50.0),
            Point::new(10.0, 10.01),
            Point::new(10.0, 9.99),
        ];
        let g = CentroidGrid::new(pts);
        assert_eq!(g.nearest(q).unwrap().0, 1);
    }

    #[test]
    fn wraps_the_antimeridian() {
        let g = CentroidGrid::new(vec![Point::new(0.0, 179.9), Point::new(0.0, -170.0)]);
        assert_eq!(g.nearest(Point::new(0.0, -179.95)).unwrap().0, 0);
        assert_eq!(g.nearest(Point::new(0.0, 180.0)).unwrap().0, 0);
    }

    #[test]
    fn polar_queries_fall_back_correctly() {
        let g = CentroidGrid::new(vec![Point::new(89.5, 0.0), Point::new(89.5, 179.0), Point::new(-89.0, 3.0)]);
        assert_eq!(g.nearest(Point::new(89.9, 178.0)).unwrap().0, 1);
        assert_eq!(g.nearest(Point::new(90.0, 0.0)), g.nearest_linear(Point::new(90.0, 0.0)));
        assert_eq!(g.nearest(Point::new(-90.0, 100.0)).unwrap().0, 2);
    }

    fn pt() -> impl Strategy<Value = Point> {
        (-90.0f64..=90.0, -180.0f64..=180.0).prop_map(|(a, b)| Point::new(a, b))
    }

    fn clustered() -> impl Strategy<Value = Point> {
        (0usize..3, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(c, a, b)| {
            let centers = [(19.4, -99.1), (40.7, -74.0), (55.7, 37.6)];
            Point::new(centers[c].0 + a, centers[c].1 + b)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn matches_linear_scan_global(pts in prop::collection::vec(pt(), 1..60), qs in prop::collection::vec(pt(), 1..20)) {
            let g = CentroidGrid::new(pts);
            for q in qs {
                prop_assert_eq!(g.nearest(q), g.nearest_linear(q));
            }
        }

        #[test]
        fn matches_linear_scan_clustered(pts in prop::collection::vec(clustered(), 1..200), qs in prop::collection::vec(clustered(), 1..30)) {
            let g = CentroidGrid::new(pts);
            for q in qs {
                prop_assert_eq!(g.nearest(q), g.nearest_linear(q));
            }
        }
    }
}
