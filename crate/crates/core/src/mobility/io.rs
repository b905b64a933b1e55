use std::io::{Read, Write};

use super::landmarks::{Landmark, LandmarkSet};
use super::MobilityError;
use crate::geo::BBox;
use crate::ingest::Country;

const MAGIC: &[u8; 8] = b"GLXLMK01";
const NO_COUNTRY: [u8; 2] = *b"??";

/// Binary landmark file: magic, `u64` count, then per landmark
/// `u32 id, f64 min_lon, f64 min_lat, f64 max_lon, f64 max_lat,
/// [u8; 2] country ("??" if none), u64 support`, all little-endian.
pub fn write_landmarks_bin(set: &LandmarkSet, mut out: impl Write) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(set.len() as u64).to_le_bytes())?;
    for l in set.iter() {
        out.write_all(&l.id.to_le_bytes())?;
        for v in [l.bbox.min_lon, l.bbox.min_lat, l.bbox.max_lon, l.bbox.max_lat] {
            out.write_all(&v.to_le_bytes())?;
        }
        out.write_all(&l.country.map_or(NO_COUNTRY, |c| c.bytes()))?;
        out.write_all(&l.support.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_landmarks_bin(mut input: impl Read) -> Result<LandmarkSet, MobilityError> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(MobilityError::Format("not a landmark file".into()));
    }
    let mut b8 = [0u8; 8];
    let mut b4 = [0u8; 4];
    let mut b2 = [0u8; 2];
    input.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8);
    let mut landmarks = Vec::with_capacity(n.min(1 << 24) as usize);
    for _ in 0..n {
        input.read_exact(&mut b4)?;
        let id = u32::from_le_bytes(b4);
        let mut c = [0f64; 4];
        for v in c.iter_mut() {
            input.read_exact(&mut b8)?;
            *v = f64::from_le_bytes(b8);
        }
        input.read_exact(&mut b2)?;
        let country = if b2 == NO_COUNTRY {
            None
        } else {
            Some(
                Country::parse(std::str::from_utf8(&b2).unwrap_or(""))
                    .ok_or_else(|| MobilityError::Format(format!("bad country for id {id}")))?,
            )
        };
        input.read_exact(&mut b8)?;
        let support = u64::from_le_bytes(b8);
        let bbox = BBox::new(c[0], c[1], c[2], c[3]);
        if !bbox.is_valid() {
            return Err(MobilityError::Format(format!("invalid bbox for id {id}")));
        }
        landmarks.push(Landmark {
            id,
            bbox,
            centroid: bbox.centroid(),
            country,
            support,
        });
    }
    LandmarkSet::from_landmarks(landmarks)
}

/// `id,min_lon,min_lat,max_lon,max_lat,centroid_lat,centroid_lon,country,support`
pub fn landmarks_csv(set: &LandmarkSet) -> String {
    let mut out =
        String::from("id,min_lon,min_lat,max_lon,max_lat,centroid_lat,centroid_lon,country,support\n");
    for l in set.iter() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            l.id,
            l.bbox.min_lon,
            l.bbox.min_lat,
            l.bbox.max_lon,
            l.bbox.max_lat,
            l.centroid.lat,
            l.centroid.lon,
            set.country_label(l.id),
            l.support
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LandmarkSet {
        let mk = |id: u32, x: f64, c: Option<&str>, support| {
            let bbox = BBox::new(x, 19.0, x + 0.001, 19.001);
            Landmark { id, bbox, centroid: bbox.centroid(), country: c.and_then(Country::parse), support }
        };
        LandmarkSet::from_landmarks(vec![mk(0, -99.1, Some("MX"), 9), mk(1, -98.0, None, 2)]).unwrap()
    }

    #[test]
    fn binary_round_trip() {
        let set = sample();
        let mut buf = Vec::new();
        write_landmarks_bin(&set, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 8 + 2 * (4 + 32 + 2 + 8));
        let back = read_landmarks_bin(buf.as_slice()).unwrap();
        assert_eq!(back.iter().cloned().collect::<Vec<_>>(), set.iter().cloned().collect::<Vec<_>>());
        assert!(read_landmarks_bin(&b"NOTMAGIC"[..]).is_err());
        assert!(read_landmarks_bin(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn csv_layout() {
        let csv = landmarks_csv(&sample());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "id,min_lon,min_lat,max_lon,max_lat,centroid_lat,centroid_lon,country,support");
        assert!(lines[1].starts_with("0,-99.1,19,"));
        assert!(lines[1].ends_with(",MX,9"));
        assert!(lines[2].ends_with(",??,2"));
    }
}
