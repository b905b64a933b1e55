//! Geographic primitives shared by ingestion and mobility estimation.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// Mean Earth radius used for every distance computation, in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A WGS84 position in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub lat: f64,
    pub lon: f64,
}

impl Point {
    pub fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }

    pub fn is_valid(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }
}

/// Axis-aligned bounding box in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl BBox {
    pub fn new(min_lon: f64, min_lat: f64, max_lon: f64, max_lat: f64) -> Self {
        Self {
            min_lon,
            min_lat,
            max_lon,
            max_lat,
        }
    }

    pub fn is_valid(&self) -> bool {
        Point::new(self.min_lat, self.min_lon).is_valid()
            && Point::new(self.max_lat, self.max_lon).is_valid()
            && self.min_lat <= self.max_lat
            && self.min_lon <= self.max_lon
    }

    /// Mean of the corners.
    pub fn centroid(&self) -> Point {
        Point::new(
            (self.min_lat + self.max_lat) / 2.0,
            (self.min_lon + self.max_lon) / 2.0,
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.min_lat..=self.max_lat).contains(&p.lat)
            && (self.min_lon..=self.max_lon).contains(&p.lon)
    }

    /// Great-circle length of the box diagonal.
    pub fn diagonal_m(&self) -> f64 {
        haversine(
            Point::new(self.min_lat, self.min_lon),
            Point::new(self.max_lat, self.max_lon),
        )
    }

    /// Bit-exact identity of the box, used for exact-match lookups.
    /// `-0.0` and `0.0` map to the same key.
    pub fn key(&self) -> BBoxKey {
        let bits = |v: f64| if v == 0.0 { 0u64 } else { v.to_bits() };
        BBoxKey([
            bits(self.min_lon),
            bits(self.min_lat),
            bits(self.max_lon),
            bits(self.max_lat),
        ])
    }

    /// Lexicographic order over `(min_lon, min_lat, max_lon, max_lat)`.
    pub fn lex_cmp(&self, other: &BBox) -> Ordering {
        self.min_lon
            .total_cmp(&other.min_lon)
            .then(self.min_lat.total_cmp(&other.min_lat))
            .then(self.max_lon.total_cmp(&other.max_lon))
            .then(self.max_lat.total_cmp(&other.max_lat))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BBoxKey([u64; 4]);

/// Location attached to a message: an exact point or a place bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeoShape {
    Point(Point),
    BBox(BBox),
}

impl GeoShape {
    pub fn is_valid(&self) -> bool {
        match self {
            GeoShape::Point(p) => p.is_valid(),
            GeoShape::BBox(b) => b.is_valid(),
        }
    }

    /// The point itself, or the box centroid.
    pub fn position(&self) -> Point {
        match self {
            GeoShape::Point(p) => *p,
            GeoShape::BBox(b) => b.centroid(),
        }
    }
}

/// Great-circle distance in meters on a sphere of radius [`EARTH_RADIUS_M`].
pub fn haversine(a: Point, b: Point) -> f64 {
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.clamp(0.0, 1.0).sqrt().asin()
}

/// Destination reached from `origin` after travelling `distance_m` along
/// `bearing_deg` (clockwise from north).
pub fn destination(origin: Point, bearing_deg: f64, distance_m: f64) -> Point {
    let delta = distance_m / EARTH_RADIUS_M;
    let theta = bearing_deg.to_radians();
    let lat1 = origin.lat.to_radians();
    let lon1 = origin.lon.to_radians();
    let lat2 = (lat1.sin() * delta.cos() + lat1.cos() * delta.sin() * theta.cos()).asin();
    let lon2 = lon1
        + (theta.sin() * delta.sin() * lat1.cos()).atan2(delta.cos() - lat1.sin() * lat2.sin());
    let lon = (lon2.to_degrees() + 540.0).rem_euclid(360.0) - 180.0;
    Point::new(lat2.to_degrees(), lon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_points_are_zero_apart() {
        let p = Point::new(19.43, -99.13);
        assert_eq!(haversine(p, p), 0.0);
    }

    #[test]
    fn quarter_meridian() {
        // pi * R / 2
        let d = haversine(Point::new(0.0, 0.0), Point::new(90.0, 0.0));
        assert!((d - 10_007_543.0).abs() < 1.0, "{d}");
        assert!((d - std::f64::consts::FRAC_PI_2 * EARTH_RADIUS_M).abs() < 1e-6);
    }

    #[test]
    fn destination_round_trips_distance() {
        let o = Point::new(40.0, -74.0);
        for bearing in [0.0, 45.0, 90.0, 181.0, 300.0] {
            let d = destination(o, bearing, 100.0);
            assert!((haversine(o, d) - 100.0).abs() < 1e-6);
        }
    }

    #[test]
    fn centroid_is_inside_box() {
        let b = BBox::new(-99.2, 19.3, -99.1, 19.5);
        assert!(b.contains(b.centroid()));
    }

    #[test]
    fn bbox_validity() {
        assert!(BBox::new(0.0, 0.0, 1.0, 1.0).is_valid());
        assert!(!BBox::new(1.0, 0.0, 0.0, 1.0).is_valid());
        assert!(!BBox::new(0.0, 0.0, 1.0, 91.0).is_valid());
        assert_eq!(BBox::new(-0.0, 0.0, 1.0, 1.0).key(), BBox::new(0.0, 0.0, 1.0, 1.0).key());
    }

    proptest! {
        #[test]
        fn haversine_is_symmetric(
            la in -90.0f64..90.0, lo in -180.0f64..180.0,
            lb in -90.0f64..90.0, lob in -180.0f64..180.0,
        ) {
            let (a, b) = (Point::new(la, lo), Point::new(lb, lob));
            prop_assert_eq!(haversine(a, b), haversine(b, a));
            prop_assert!(haversine(a, b) <= std::f64::consts::PI * EARTH_RADIUS_M + 1e-6);
        }
    }
}
