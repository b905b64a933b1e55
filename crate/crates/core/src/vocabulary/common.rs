use std::collections::{BTreeSet, HashMap, HashSet};
use std::io;

use chrono::{Datelike, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_from_store, Vocabulary};
use crate::ingest::{CountryScope, PartitionKey, Store};
use crate::textproc::{for_each_token, normalize, Token, TokenKind, TokenizerConfig};

/// Sample size used when none is given.
pub const DEFAULT_COMMON_SAMPLE: usize = 5_000_000;
/// Minimum document-frequency rate for a token to count as common.
pub const DEFAULT_COMMON_RATE: f64 = 0.001;

#[derive(Debug, Clone, PartialEq)]
pub struct CommonWords {
    pub tokens: BTreeSet<Token>,
    /// Messages actually examined.
    pub sampled: usize,
    /// The corpus was smaller than the requested sample.
    pub insufficient_corpus: bool,
}

/// Tokens present in at least `rate * n` of a seeded uniform sample of `n`
/// messages (reservoir sampling over the stream).
pub fn common_words<I, S>(
    corpus: I,
    sample_size: usize,
    rate: f64,
    seed: u64,
    config: &TokenizerConfig,
) -> CommonWords
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let sample_size = sample_size.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reservoir: Vec<String> = Vec::new();
    let mut seen = 0usize;
    for m in corpus {
        if reservoir.len() < sample_size {
            reservoir.push(m.as_ref().to_owned());
        } else {
            let j = rng.gen_range(0..=seen);
            if j < sample_size {
                reservoir[j] = m.as_ref().to_owned();
            }
        }
        seen += 1;
    }
    let insufficient_corpus = seen < sample_size;
    if insufficient_corpus {
        log::warn!("common_words: corpus has {seen} messages, fewer than the sample size {sample_size}; using all of them");
    }

    let mut df: HashMap<(TokenKind, String), usize> = HashMap::new();
    for m in &reservoir {
        let normalized = normalize(m);
        let mut distinct: HashSet<(TokenKind, &str)> = HashSet::new();
        for_each_token(&normalized, config, |k, s| {
            distinct.insert((k, s));
        });
        for (k, s) in distinct {
            *df.entry((k, s.to_owned())).or_insert(0) += 1;
        }
    }
    let needed = rate * reservoir.len() as f64;
    let tokens = df
        .into_iter()
        .filter(|&(_, n)| n as f64 >= needed)
        .map(|((k, s), _)| Token::new(k, s))
        .collect();
    CommonWords {
        tokens,
        sampled: reservoir.len(),
        insufficient_corpus,
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DayWords {
    pub tokens: BTreeSet<Token>,
    /// Earlier dates whose vocabularies were used.
    pub dates: Vec<NaiveDate>,
}

/// Union of the tokens seen on the same month and day in earlier years, for
/// every date of `v`'s scope. `years_back = None` uses every earlier year in
/// the store.
pub fn day_words(
    v: &Vocabulary,
    store: &Store,
    years_back: Option<u32>,
    config: &TokenizerConfig,
) -> io::Result<DayWords> {
    let (Some(lang), Some(country)) = (v.scope().lang.clone(), v.scope().country) else {
        return Ok(DayWords::default());
    };
    let available: BTreeSet<NaiveDate> = store.days(&lang)?.into_iter().collect();
    let mut out = DayWords::default();
    for &date in &v.scope().dates {
        let earliest = years_back.map_or(i32::MIN, |n| date.year() - n as i32);
        for &prior in &available {
            if prior.year() >= date.year()
                || prior.year() < earliest
                || prior.month() != date.month()
                || prior.day() != date.day()
            {
                continue;
            }
            if !store.contains(&PartitionKey::new(&lang, prior, country)) {
                continue;
            }
            let pv = build_from_store(store, prior, &lang, country, config)?;
            out.tokens.extend(pv.tokens().cloned());
            out.dates.push(prior);
        }
    }
    out.dates.sort();
    out.dates.dedup();
    if out.dates.is_empty() {
        log::warn!(
            "day_words: no earlier years in the store for {} {}",
            lang,
            match country {
                CountryScope::Any => "any".to_string(),
                CountryScope::Country(c) => c.to_string(),
            }
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{partition, parse_record, Lang};
    use crate::vocabulary::{build_day, Scope};

    fn words() -> TokenizerConfig {
        TokenizerConfig {
            qgrams: vec![],
            words: true,
            bigrams: false,
        }
    }

    #[test]
    fn small_sample_keeps_everything() {
        let corpus: Vec<String> = (0..1000).map(|i| format!("w{i} comun")).collect();
        let cw = common_words(&corpus, 1000, 0.001, 42, &words());
        assert_eq!(cw.sampled, 1000);
        assert!(!cw.insufficient_corpus);
        assert_eq!(cw.tokens.len(), 1001);
    }

    #[test]
    fn six_of_five_thousand_is_common() {
        let mut corpus: Vec<&str> = vec!["relleno"; 5000 - 10];
        corpus.extend(["seis"; 6]);
        corpus.extend(["cuatro"; 4]);
        let cw = common_words(&corpus, 5000, 0.001, 7, &words());
        assert!(cw.tokens.contains(&Token::word("seis")));
        assert!(!cw.tokens.contains(&Token::word("cuatro")));
        assert!(cw.tokens.contains(&Token::word("relleno")));
    }

    #[test]
    fn document_frequency_ignores_repeats() {
        let mut corpus: Vec<&str> = vec!["x"; 1995];
        corpus.push("eco eco eco eco eco eco eco eco eco eco");
        corpus.extend(["y"; 4]);
        let cw = common_words(&corpus, 2000, 0.001, 1, &words());
        // needs 2 messages
        assert!(!cw.tokens.contains(&Token::word("eco")));
        assert!(cw.tokens.contains(&Token::word("y")));
    }

    #[test]
    fn small_corpus_falls_back() {
        let cw = common_words(["a b", "b c"], 100, 0.5, 0, &words());
        assert!(cw.insufficient_corpus);
        assert_eq!(cw.sampled, 2);
        assert_eq!(cw.tokens.len(), 3);
    }

    #[test]
    fn sampling_is_reproducible() {
        let corpus: Vec<String> = (0..10_000).map(|i| format!("t{}", i % 300)).collect();
        let a = common_words(&corpus, 1000, 0.004, 9, &words());
        let b = common_words(&corpus, 1000, 0.004, 9, &words());
        assert_eq!(a, b);
        assert_eq!(a.sampled, 1000);
    }

    fn rec(ts: &str, text: &str) -> crate::ingest::MessageRecord {
        parse_record(
            format!(r#"{{"user_id":"u","timestamp":"{ts}T12:00:00Z","text":"{text}","lang":"en","country":"US"}}"#)
                .as_bytes(),
        )
        .unwrap()
    }

    #[test]
    fn previous_years_are_unioned() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        partition(
            &store,
            [
                rec("2017-02-14", "roses"),
                rec("2018-02-14", "chocolate"),
                rec("2019-02-14", "roses dinner"),
                rec("2019-02-15", "monday"),
                rec("2020-02-14", "roses virus"),
            ],
        )
        .unwrap();
        let en = Lang::parse("en").unwrap();
        let us = CountryScope::parse("US").unwrap();
        let day = NaiveDate::from_ymd_opt(2020, 2, 14).unwrap();
        let v = build_from_store(&store, day, &en, us, &words()).unwrap();
        let dw = day_words(&v, &store, None, &words()).unwrap();
        assert_eq!(dw.dates.len(), 3);
        let expect: BTreeSet<Token> = ["roses", "chocolate", "dinner"].into_iter().map(Token::word).collect();
        assert_eq!(dw.tokens, expect);
        let filtered = v.remove(&dw.tokens);
        assert_eq!(filtered.token_set(), BTreeSet::from([Token::word("virus")]));

        let recent = day_words(&build_from_store(&store, day, &en, us, &words()).unwrap(), &store, Some(1), &words()).unwrap();
        assert_eq!(recent.dates, vec![NaiveDate::from_ymd_opt(2019, 2, 14).unwrap()]);
    }

    #[test]
    fn no_prior_years_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        partition(&store, [rec("2020-02-14", "hola")]).unwrap();
        let day = NaiveDate::from_ymd_opt(2020, 2, 14).unwrap();
        let v = build_day(day, Lang::parse("en").unwrap(), CountryScope::parse("US").unwrap(), ["hola"], None, &words());
        let dw = day_words(&v, &store, None, &words()).unwrap();
        assert!(dw.tokens.is_empty());
        assert_eq!(v.clone().remove(&dw.tokens), v);
        let unscoped = Vocabulary::new(Scope::default(), Default::default(), 0);
        assert!(day_words(&unscoped, &store, None, &words()).unwrap().tokens.is_empty());
    }
}
