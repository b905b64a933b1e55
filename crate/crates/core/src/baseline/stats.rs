use std::collections::BTreeMap;

use chrono::NaiveDate;

use super::BaselineError;

/// Lower middle value for even counts. Sorts `values` in place.
pub fn lower_median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some(values[(values.len() - 1) / 2])
}

/// Trailing mean over the current value and up to `window - 1` previous
/// ones; the first elements average whatever is available.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    (0..values.len())
        .map(|i| {
            let w = &values[(i + 1).saturating_sub(window)..=i];
            w.iter().sum::<f64>() / w.len() as f64
        })
        .collect()
}

/// Sample Pearson correlation of two equal-length series.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64, BaselineError> {
    if a.len() != b.len() {
        return Err(BaselineError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(BaselineError::TooFewPoints { need: 2, got: a.len() });
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(BaselineError::ConstantSeries);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson correlation over the dates present in both series.
pub fn pearson_by_date(a: &BTreeMap<NaiveDate, f64>, b: &BTreeMap<NaiveDate, f64>) -> Result<f64, BaselineError> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = a
        .iter()
        .filter_map(|(d, &x)| b.get(d).map(|&y| (x, y)))
        .unzip();
    pearson(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn median_examples() {
        assert_eq!(lower_median(&mut []), None);
        assert_eq!(lower_median(&mut [20.0, 10.0]), Some(10.0));
        assert_eq!(lower_median(&mut [3.0, 1.0, 2.0]), Some(2.0));
    }

    #[test]
    fn moving_average_examples() {
        assert_eq!(moving_average(&[0.0, 7.0], 7), vec![0.0, 3.5]);
        assert_eq!(moving_average(&[5.0; 10], 7), vec![5.0; 10]);
        assert_eq!(moving_average(&[], 7), Vec::<f64>::new());
        assert_eq!(moving_average(&[1.0, 2.0, 3.0, 4.0], 2), vec![1.0, 1.5, 2.5, 3.5]);
    }

    #[test]
    fn pearson_examples() {
        let a = [1.0, 3.0, 2.0, 5.0];
        assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        assert!((pearson(&a, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&[2.0; 4], &a), Err(BaselineError::ConstantSeries));
        assert_eq!(pearson(&a, &a[..3]), Err(BaselineError::LengthMismatch(4, 3)));
    }

    #[test]
    fn date_join_needs_overlap() {
        let d = |i| NaiveDate::from_ymd_opt(2020, 3, i).unwrap();
        let a: BTreeMap<_, _> = [(d(1), 1.0), (d(2), 2.0), (d(3), 4.0)].into();
        let b: BTreeMap<_, _> = [(d(2), 1.0), (d(3), 3.0), (d(9), 0.0)].into();
        assert!((pearson_by_date(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let c: BTreeMap<_, _> = [(d(3), 1.0)].into();
        assert_eq!(pearson_by_date(&a, &c), Err(BaselineError::TooFewPoints { need: 2, got: 1 }));
    }

    proptest! {
        #[test]
        fn pearson_affine_invariant(
            a in prop::collection::vec(-100.0f64..100.0, 3..30),
            seed in 0u64..1000, s in 0.1f64..10.0, t in -50.0f64..50.0,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let b: Vec<f64> = a.iter().map(|x| x + rng.gen_range(-20.0..20.0)).collect();
            if let Ok(r) = pearson(&a, &b) {
                prop_assert!((-1.0..=1.0).contains(&r));
                let a2: Vec<f64> = a.iter().map(|x| s * x + t).collect();
                prop_assert!((pearson(&a2, &b).unwrap() - r).abs() < 1e-9);
            }
        }

        #[test]
        fn moving_average_matches_direct(v in prop::collection::vec(-1e3f64..1e3, 0..40), w in 1usize..10) {
            let m = moving_average(&v, w);
            for i in 0..v.len() {
                let lo = i.saturating_sub(w - 1);
                let direct = v[lo..=i].iter().sum::<f64>() / (i + 1 - lo) as f64;
                prop_assert!((m[i] - direct).abs() < 1e-9);
            }
        }
    }
}
