use std::cmp::Ordering;
use std::fmt::Write as _;

use super::{VocabError, Vocabulary};

/// Jaccard index of the token sets (counts ignored).
pub fn jaccard(a: &Vocabulary, b: &Vocabulary) -> Result<f64, VocabError> {
    if a.is_empty() && b.is_empty() {
        return Err(VocabError::BothEmpty);
    }
    let mut ia = a.tokens().peekable();
    let mut ib = b.tokens().peekable();
    let mut inter = 0usize;
    while let (Some(x), Some(y)) = (ia.peek(), ib.peek()) {
        match x.cmp(y) {
            Ordering::Less => {
                ia.next();
            }
            Ordering::Greater => {
                ib.next();
            }
            Ordering::Equal => {
                inter += 1;
                ia.next();
                ib.next();
            }
        }
    }
    let union = a.len() + b.len() - inter;
    Ok(inter as f64 / union as f64)
}

/// Pairwise Jaccard scores between labelled vocabularies.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// CSV with a header row of labels and one labelled row per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.values) {
            out.push_str(l);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Symmetric matrix of Jaccard scores with unit diagonal. Each pair is
/// computed once and mirrored.
pub fn similarity_matrix(
    labels: &[String],
    vocabs: &[Vocabulary],
) -> Result<SimilarityMatrix, VocabError> {
    if vocabs.len() < 2 {
        return Err(VocabError::TooFew {
            need: 2,
            got: vocabs.len(),
        });
    }
    assert_eq!(labels.len(), vocabs.len(), "one label per vocabulary");
    let n = vocabs.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let s = if i == j && !vocabs[i].is_empty() {
                1.0
            } else {
                jaccard(&vocabs[i], &vocabs[j])
                    .map_err(|_| VocabError::MatrixEntry(labels[i].clone(), labels[j].clone()))?
            };
            values[i][j] = s;
            values[j][i] = s;
        }
    }
    Ok(SimilarityMatrix {
        labels: labels.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{CountryScope, Lang};
    use crate::textproc::Token;
    use crate::vocabulary::Scope;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn set(words: &[&str]) -> Vocabulary {
        Vocabulary::new(
            Scope::day(NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(), Lang::parse("es").unwrap(), CountryScope::Any),
            words.iter().map(|w| (Token::word(*w), 1)).collect(),
            1,
        )
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&set(&["a", "b"]), &set(&["a", "b"])).unwrap(), 1.0);
        assert_eq!(jaccard(&set(&["a"]), &set(&["b"])).unwrap(), 0.0);
        assert_eq!(jaccard(&set(&["a", "b", "c"]), &set(&["b", "c", "d"])).unwrap(), 0.5);
        assert!(matches!(jaccard(&set(&[]), &set(&[])), Err(VocabError::BothEmpty)));
        assert_eq!(jaccard(&set(&[]), &set(&["a"])).unwrap(), 0.0);
    }

    #[test]
    fn matrix_examples() {
        let labels: Vec<String> = ["MX", "CO", "AR"].iter().map(|s| s.to_string()).collect();
        let m = similarity_matrix(&labels[..2], &[set(&["a"]), set(&["a"])]).unwrap();
        assert_eq!(m.values, vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        let m = similarity_matrix(&labels, &[set(&["a"]), set(&["a"]), set(&["b"])]).unwrap();
        assert_eq!(m.values, vec![vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        assert_eq!(m.to_csv().lines().next(), Some("label,MX,CO,AR"));
    }

    #[test]
    fn matrix_names_the_empty_pair() {
        let labels: Vec<String> = ["MX", "CO"].iter().map(|s| s.to_string()).collect();
        let err = similarity_matrix(&labels, &[set(&[]), set(&["a"])]).unwrap_err();
        assert!(matches!(err, VocabError::MatrixEntry(ref a, ref b) if a == "MX" && b == "MX"));
        assert!(matches!(similarity_matrix(&labels[..1], &[set(&["a"])]), Err(VocabError::TooFew { .. })));
    }

    proptest! {
        #[test]
        fn jaccard_properties(a in prop::collection::btree_set("[a-f]", 1..6), b in prop::collection::btree_set("[a-f]", 0..6)) {
            let va = set(&a.iter().map(String::as_str).collect::<Vec<_>>());
            let vb = set(&b.iter().map(String::as_str).collect::<Vec<_>>());
            let ab = jaccard(&va, &vb).unwrap();
            prop_assert_eq!(ab, jaccard(&vb, &va).unwrap());
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(jaccard(&va, &va).unwrap(), 1.0);
            let inter = a.intersection(&b).count() as f64;
            let union = a.union(&b).count() as f64;
            prop_assert_eq!(ab, inter / union);
        }
    }
}
