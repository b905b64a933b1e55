//! Landmark construction, per-day origin-destination trip counting and
//! country-level mobility series.

mod grid;
mod io;
mod landmarks;
mod series;
mod trips;

use thiserror::Error;

pub use crate::geo::haversine;
pub use grid::CentroidGrid;
pub use io::{landmarks_csv, read_landmarks_bin, write_landmarks_bin};
pub use landmarks::{build_landmarks, Landmark, LandmarkBuilder, LandmarkSet, UNKNOWN_COUNTRY};
pub use series::{country_series, series_csv, Measure, Measures, MobilitySeries};
pub use trips::{
    day_od_matrix, detect_trips, store_od_matrix, ODMatrix, Visit, MIN_TRIP_METERS,
};

#[derive(Debug, Error)]
pub enum MobilityError {
    #[error("no geotagged records")]
    NoGeotaggedData,
    #[error("landmark set is empty")]
    EmptyLandmarkSet,
    #[error("landmark id {0} is not in the set")]
    UnknownLandmark(u32),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
