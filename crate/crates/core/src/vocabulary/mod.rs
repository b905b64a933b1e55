//! Per-scope token vocabularies: daily aggregation with the retention
//! floor, merging, the filters used for word clouds, and the Jaccard/PCA
//! comparison of country vocabularies.

mod common;
mod pca;
mod similarity;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io;

use chrono::NaiveDate;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::ingest::{CountryScope, Lang, PartitionKey, Store};
use crate::textproc::{for_each_token, normalize, EmojiTable, Token, TokenKind, TokenizerConfig};

pub use common::{
    common_words, day_words, CommonWords, DayWords, DEFAULT_COMMON_RATE, DEFAULT_COMMON_SAMPLE,
};
pub use pca::{pca_project, symmetric_eigen, Projection};
pub use similarity::{jaccard, similarity_matrix, SimilarityMatrix};

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("scope mismatch: {0} vs {1}")]
    ScopeMismatch(String, String),
    #[error("jaccard of two empty vocabularies is undefined")]
    BothEmpty,
    #[error("similarity entry ({0}, {1}): both vocabularies are empty")]
    MatrixEntry(String, String),
    #[error("need at least {need} vocabularies, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(String),
    #[error("invalid vocabulary file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// What a vocabulary covers. `None` language/country marks the unscoped
/// empty vocabulary, which merges with anything.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scope {
    pub dates: BTreeSet<NaiveDate>,
    pub lang: Option<Lang>,
    pub country: Option<CountryScope>,
}

impl Scope {
    pub fn day(day: NaiveDate, lang: Lang, country: CountryScope) -> Self {
        Self {
            dates: BTreeSet::from([day]),
            lang: Some(lang),
            country: Some(country),
        }
    }

    fn label(&self) -> String {
        format!(
            "{}/{}",
            self.lang.as_ref().map_or("*".to_string(), |l| l.to_string()),
            self.country.map_or("*".to_string(), |c| c.to_string())
        )
    }
}

/// Token counts for a scope.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    scope: Scope,
    counts: BTreeMap<Token, u64>,
    num_messages: u64,
}

/// Smallest count kept for a day with `day_messages` messages: at least
/// 0.01% of them, and never below one.
pub fn retention_floor(day_messages: u64) -> u64 {
    day_messages.div_ceil(10_000).max(1)
}

#[derive(Default)]
struct Counter {
    by_kind: Vec<(TokenKind, HashMap<String, u64>)>,
}

impl Counter {
    fn add(&mut self, kind: TokenKind, surface: &str) {
        let map = match self.by_kind.iter().position(|(k, _)| *k == kind) {
            Some(i) => &mut self.by_kind[i].1,
            None => {
                self.by_kind.push((kind, HashMap::new()));
                &mut self.by_kind.last_mut().unwrap().1
            }
        };
        match map.get_mut(surface) {
            Some(c) => *c += 1,
            None => {
                map.insert(surface.to_owned(), 1);
            }
        }
    }

    fn into_filtered(self, floor: u64) -> BTreeMap<Token, u64> {
        self.by_kind
            .into_iter()
            .flat_map(|(kind, map)| {
                map.into_iter()
                    .filter(move |&(_, c)| c >= floor)
                    .map(move |(s, c)| (Token::new(kind, s), c))
            })
            .collect()
    }
}

/// Aggregate one day's messages for a (language, country) scope.
///
/// Tokens seen fewer than [`retention_floor`]`(day_lang_messages)` times are
/// dropped. `day_lang_messages` is the day's message count for the whole
/// language; `None` uses the number of messages given here.
pub fn build_day<I, S>(
    day: NaiveDate,
    lang: Lang,
    country: CountryScope,
    messages: I,
    day_lang_messages: Option<u64>,
    config: &TokenizerConfig,
) -> Vocabulary
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counter = Counter::default();
    let mut n = 0u64;
    for m in messages {
        n += 1;
        let normalized = normalize(m.as_ref());
        for_each_token(&normalized, config, |kind, s| counter.add(kind, s));
    }
    let floor = retention_floor(day_lang_messages.unwrap_or(n));
    Vocabulary {
        scope: Scope::day(day, lang, country),
        counts: counter.into_filtered(floor),
        num_messages: n,
    }
}

/// Build the vocabulary of one stored partition, thresholded against the
/// day's total message count for the language.
pub fn build_from_store(
    store: &Store,
    day: NaiveDate,
    lang: &Lang,
    country: CountryScope,
    config: &TokenizerConfig,
) -> io::Result<Vocabulary> {
    let key = PartitionKey::new(lang, day, country);
    let mut texts = Vec::new();
    store.for_each_record(&key, |r| texts.push(r.text))?;
    let day_total = match country {
        CountryScope::Any => texts.len() as u64,
        CountryScope::Country(_) => {
            store.partition_len(&PartitionKey::new(lang, day, CountryScope::Any))? as u64
        }
    };
    Ok(build_day(day, lang.clone(), country, texts, Some(day_total), config))
}

/// Sum vocabularies tokenwise. All inputs must share language and country.
pub fn merge(vocabs: &[Vocabulary]) -> Result<Vocabulary, VocabError> {
    let mut acc = Vocabulary::default();
    for v in vocabs {
        acc.absorb(v)?;
    }
    Ok(acc)
}

/// Seeded uniform sample of `n` distinct dates, returned in calendar order.
/// Asking for more dates than exist returns all of them.
pub fn sample_days(dates: &[NaiveDate], n: usize, seed: u64) -> Vec<NaiveDate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<NaiveDate> = if n >= dates.len() {
        dates.to_vec()
    } else {
        index::sample(&mut rng, dates.len(), n)
            .into_iter()
            .map(|i| dates[i])
            .collect()
    };
    picked.sort();
    picked.dedup();
    picked
}

impl Vocabulary {
    pub fn new(scope: Scope, counts: BTreeMap<Token, u64>, num_messages: u64) -> Self {
        let counts = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        Self {
            scope,
            counts,
            num_messages,
        }
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn num_messages(&self) -> u64 {
        self.num_messages
    }

    pub fn counts(&self) -> &BTreeMap<Token, u64> {
        &self.counts
    }

    pub fn get(&self, token: &Token) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.counts.keys()
    }

    pub fn token_set(&self) -> BTreeSet<Token> {
        self.counts.keys().cloned().collect()
    }

    /// Add `other` into `self`.
    pub fn absorb(&mut self, other: &Vocabulary) -> Result<(), VocabError> {
        let lang = compatible(&self.scope.lang, &other.scope.lang);
        let country = compatible(&self.scope.country, &other.scope.country);
        let (Some(lang), Some(country)) = (lang, country) else {
            return Err(VocabError::ScopeMismatch(self.scope.label(), other.scope.label()));
        };
        self.scope.lang = lang;
        self.scope.country = country;
        self.scope.dates.extend(other.scope.dates.iter().copied());
        for (t, &c) in &other.counts {
            *self.counts.entry(t.clone()).or_insert(0) += c;
        }
        self.num_messages += other.num_messages;
        Ok(())
    }

    pub fn remove_qgrams(mut self) -> Self {
        self.counts.retain(|t, _| !matches!(t.kind, TokenKind::QGram(_)));
        self
    }

    pub fn remove_emojis(self) -> Self {
        self.remove_emojis_with(&EmojiTable::default())
    }

    pub fn remove_emojis_with(mut self, table: &EmojiTable) -> Self {
        self.counts.retain(|t, _| !table.is_emoji_str(&t.surface));
        self
    }

    pub fn remove(mut self, tokens: &BTreeSet<Token>) -> Self {
        if !tokens.is_empty() {
            self.counts.retain(|t, _| !tokens.contains(t));
        }
        self
    }

    /// Tokens by descending count, ties by token order.
    pub fn most_common(&self, n: usize) -> Vec<(&Token, u64)> {
        let mut v: Vec<(&Token, u64)> = self.counts.iter().map(|(t, &c)| (t, c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v.truncate(n);
        v
    }

    /// JSON document: scope header, `num_messages` and token -> count, with
    /// q-gram keys prefixed `q<q>:`.
    pub fn to_json(&self) -> Value {
        let counts: Map<String, Value> = self
            .counts
            .iter()
            .map(|(t, &c)| (t.encode(), Value::from(c)))
            .collect();
        json!({
            "scope": {
                "dates": self.scope.dates.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                "lang": self.scope.lang.as_ref().map(|l| l.to_string()),
                "country": self.scope.country.map(|c| c.to_string()),
            },
            "num_messages": self.num_messages,
            "counts": counts,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, VocabError> {
        let bad = |m: &str| VocabError::Format(m.to_string());
        let scope = v.get("scope").ok_or_else(|| bad("missing scope"))?;
        let dates = scope
            .get("dates")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing scope.dates"))?
            .iter()
            .map(|d| {
                d.as_str()
                    .and_then(|s| NaiveDate::parse_from_str(s, "%Y-%m-%d").ok())
                    .ok_or_else(|| bad("bad date"))
            })
            .collect::<Result<BTreeSet<_>, _>>()?;
        let lang = match scope.get("lang") {
            None | Some(Value::Null) => None,
            Some(l) => Some(l.as_str().and_then(Lang::parse).ok_or_else(|| bad("bad lang"))?),
        };
        let country = match scope.get("country") {
            None | Some(Value::Null) => None,
            Some(c) => Some(
                c.as_str()
                    .and_then(CountryScope::parse)
                    .ok_or_else(|| bad("bad country"))?,
            ),
        };
        let num_messages = v
            .get("num_messages")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing num_messages"))?;
        let mut counts = BTreeMap::new();
        for (k, c) in v
            .get("counts")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing counts"))?
        {
            let t = Token::decode(k).map_err(|e| VocabError::Format(e.to_string()))?;
            let c = c.as_u64().ok_or_else(|| bad("non-integer count"))?;
            counts.insert(t, c);
        }
        Ok(Vocabulary::new(
            Scope {
                dates,
                lang,
                country,
            },
            counts,
            num_messages,
        ))
    }
}

fn compatible<T: Clone + PartialEq>(a: &Option<T>, b: &Option<T>) -> Option<Option<T>> {
    match (a, b) {
        (None, x) | (x, None) => Some(x.clone()),
        (Some(x), Some(y)) if x == y => Some(Some(x.clone())),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn es() -> Lang {
        Lang::parse("es").unwrap()
    }

    fn voc(pairs: &[(&str, u64)]) -> Vocabulary {
        Vocabulary::new(
            Scope::day(d("2020-02-14"), es(), CountryScope::Any),
            pairs.iter().map(|&(k, c)| (Token::decode(k).unwrap(), c)).collect(),
            10,
        )
    }

    #[test]
    fn floor_values() {
        assert_eq!(retention_floor(0), 1);
        assert_eq!(retention_floor(100), 1);
        assert_eq!(retention_floor(9_999), 1);
        assert_eq!(retention_floor(10_000), 1);
        assert_eq!(retention_floor(10_001), 2);
        assert_eq!(retention_floor(50_000), 5);
    }

    #[test]
    fn threshold_at_fifty_thousand() {
        let mut msgs = vec!["filler"; 50_000 - 9];
        msgs.extend(["cuatro"; 4]);
        msgs.extend(["cinco"; 5]);
        let words = TokenizerConfig { qgrams: vec![], words: true, bigrams: false };
        let v = build_day(d("2020-02-14"), es(), CountryScope::Any, msgs, None, &words);
        assert_eq!(v.num_messages(), 50_000);
        assert_eq!(v.get(&Token::word("cuatro")), 0);
        assert_eq!(v.get(&Token::word("cinco")), 5);
    }

    #[test]
    fn two_identical_messages() {
        let v = build_day(d("2020-02-14"), es(), CountryScope::Any, ["hola", "hola"], None, &TokenizerConfig::default());
        let expected: BTreeMap<Token, u64> = [
            (Token::word("hola"), 2),
            (Token::qgram("ho"), 2),
            (Token::qgram("ol"), 2),
            (Token::qgram("la"), 2),
            (Token::qgram("hol"), 2),
            (Token::qgram("ola"), 2),
            (Token::qgram("hola"), 2),
        ]
        .into_iter()
        .collect();
        assert_eq!(v.counts(), &expected);
    }

    #[test]
    fn empty_partition_is_valid() {
        let v = build_day(d("2020-02-14"), es(), CountryScope::Any, Vec::<String>::new(), None, &TokenizerConfig::default());
        assert!(v.is_empty());
        assert_eq!(v.num_messages(), 0);
    }

    #[test]
    fn country_uses_language_day_floor() {
        let cfg = TokenizerConfig { qgrams: vec![], words: true, bigrams: false };
        let mx = CountryScope::parse("MX").unwrap();
        let v = build_day(d("2020-02-14"), es(), mx, ["chido", "chido", "wey"], Some(20_000), &cfg);
        assert_eq!(v.get(&Token::word("chido")), 2);
        assert_eq!(v.get(&Token::word("wey")), 0);
    }

    #[test]
    fn merge_examples() {
        let a = voc(&[("a", 2)]);
        let b = voc(&[("a", 3), ("b", 1)]);
        let m = merge(&[a.clone(), b]).unwrap();
        assert_eq!(m.get(&Token::word("a")), 5);
        assert_eq!(m.get(&Token::word("b")), 1);
        assert_eq!(m.num_messages(), 20);
        assert_eq!(merge(std::slice::from_ref(&a)).unwrap(), a);
        assert!(merge(&[]).unwrap().is_empty());
    }

    #[test]
    fn merge_rejects_other_scope() {
        let a = voc(&[("a", 2)]);
        let mut b = voc(&[("a", 2)]);
        b.scope.country = CountryScope::parse("MX");
        assert!(matches!(merge(&[a, b]), Err(VocabError::ScopeMismatch(..))));
    }

    #[test]
    fn merge_unions_dates() {
        let a = voc(&[("a", 1)]);
        let mut b = voc(&[("a", 1)]);
        b.scope.dates = BTreeSet::from([d("2020-02-15")]);
        let m = merge(&[a, b]).unwrap();
        assert_eq!(m.scope().dates.len(), 2);
    }

    #[test]
    fn removal_examples() {
        let v = voc(&[("hola", 5), ("q2:ho", 9)]).remove_qgrams();
        assert_eq!(v, voc(&[("hola", 5)]));
        let v = voc(&[("😀", 3), ("hola", 5)]).remove_emojis();
        assert_eq!(v, voc(&[("hola", 5)]));
        let v = voc(&[("hola", 5)]);
        assert_eq!(v.clone().remove(&BTreeSet::new()), v);
    }

    #[test]
    fn json_round_trip() {
        let v = voc(&[("hola", 5), ("q2:ho", 9), ("buenos~días", 2), ("😀", 1)]);
        let text = v.to_json().to_string();
        let back = Vocabulary::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, v);
        assert!(text.contains(r#""q2:ho":9"#));
    }

    #[test]
    fn sampled_days_are_seeded() {
        let dates: Vec<NaiveDate> = d("2019-01-01").iter_days().take(561).collect();
        let a = sample_days(&dates, 180, 42);
        assert_eq!(a.len(), 180);
        assert_eq!(a, sample_days(&dates, 180, 42));
        assert_ne!(a, sample_days(&dates, 180, 43));
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sample_days(&dates[..5], 180, 1).len(), 5);
    }

    fn arb_voc() -> impl Strategy<Value = Vocabulary> {
        prop::collection::btree_map(
            prop_oneof!["[a-c]{1,2}".prop_map(Token::word), "[a-c]{2}".prop_map(Token::qgram), Just(Token::word("😀"))],
            1u64..5,
            0..8,
        )
        .prop_map(|counts| {
            let n = counts.len() as u64;
            Vocabulary::new(Scope::day(NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(), Lang::parse("es").unwrap(), CountryScope::Any), counts, n)
        })
    }

    proptest! {
        #[test]
        fn merge_is_commutative_and_associative(a in arb_voc(), b in arb_voc(), c in arb_voc()) {
            let ab_c = merge(&[merge(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
            let a_bc = merge(&[a.clone(), merge(&[b.clone(), c.clone()]).unwrap()]).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            prop_assert_eq!(merge(&[a.clone(), b.clone()]).unwrap(), merge(&[b, a]).unwrap());
        }

        #[test]
        fn removals_idempotent_and_commuting(a in arb_voc(), drop in prop::collection::btree_set("[a-c]{1,2}".prop_map(Token::word), 0..3)) {
            let q = a.clone().remove_qgrams();
            prop_assert_eq!(q.clone().remove_qgrams(), q.clone());
            let e = a.clone().remove_emojis();
            prop_assert_eq!(e.clone().remove_emojis(), e.clone());
            let r = a.clone().remove(&drop);
            prop_assert_eq!(r.clone().remove(&drop), r.clone());
            prop_assert_eq!(a.clone().remove_qgrams().remove_emojis(), a.clone().remove_emojis().remove_qgrams());
            prop_assert_eq!(a.clone().remove(&drop).remove_qgrams(), a.clone().remove_qgrams().remove(&drop));
            prop_assert_eq!(a.clone().remove(&drop).remove_emojis(), a.remove_emojis().remove(&drop));
        }
    }
}
