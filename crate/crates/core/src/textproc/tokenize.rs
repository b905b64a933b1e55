use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::normalize::{normalize, SEPARATOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenKind {
    Word,
    Bigram,
    /// Character q-gram of the given length.
    QGram(u8),
}

/// A token surface tagged with its kind. Ordered by kind, then surface.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token {
    pub kind: TokenKind,
    pub surface: String,
}

#[derive(Debug, Error, PartialEq)]
#[error("cannot decode token {0:?}")]
pub struct TokenDecodeError(pub String);

impl Token {
    pub fn new(kind: TokenKind, surface: impl Into<String>) -> Self {
        Self {
            kind,
            surface: surface.into(),
        }
    }

    pub fn word(s: impl Into<String>) -> Self {
        Self::new(TokenKind::Word, s)
    }

    pub fn bigram(s: impl Into<String>) -> Self {
        Self::new(TokenKind::Bigram, s)
    }

    pub fn qgram(s: impl Into<String>) -> Self {
        let s = s.into();
        let q = s.chars().count() as u8;
        Self::new(TokenKind::QGram(q), s)
    }

    /// Serialized key: q-grams as `q<q>:<surface>`, words and bigrams as-is.
    /// Normalized words never contain `:` (punctuation) so the prefix is
    /// unambiguous.
    pub fn encode(&self) -> String {
        match self.kind {
            TokenKind::QGram(q) => format!("q{q}:{}", self.surface),
            _ => self.surface.clone(),
        }
    }

    pub fn decode(key: &str) -> Result<Self, TokenDecodeError> {
        if let Some(rest) = key.strip_prefix('q') {
            if let Some((q, surface)) = rest.split_once(':') {
                let q: u8 = q.parse().map_err(|_| TokenDecodeError(key.into()))?;
                if q == 0 || surface.chars().count() != q as usize {
                    return Err(TokenDecodeError(key.into()));
                }
                return Ok(Self::new(TokenKind::QGram(q), surface));
            }
        }
        if key.is_empty() || key.contains(':') {
            return Err(TokenDecodeError(key.into()));
        }
        let parts = key.split(SEPARATOR).count();
        match parts {
            1 => Ok(Self::word(key)),
            2 if key.split(SEPARATOR).all(|w| !w.is_empty()) => Ok(Self::bigram(key)),
            _ => Err(TokenDecodeError(key.into())),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("q-gram size must be between 1 and 255, got {0}")]
    BadQ(usize),
    #[error("cannot parse tokenizer config: {0}")]
    Parse(String),
}

/// Which token kinds to produce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizerConfig {
    pub qgrams: Vec<usize>,
    pub words: bool,
    pub bigrams: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            qgrams: vec![2, 3, 4],
            words: true,
            bigrams: true,
        }
    }
}

impl TokenizerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.qgrams.iter().find(|&&q| q == 0 || q > 255) {
            Some(&q) => Err(ConfigError::BadQ(q)),
            None => Ok(()),
        }
    }

    pub fn from_toml(s: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(s).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(s: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Emit every token of already-normalized text without allocating.
pub fn for_each_token<'a>(
    normalized: &'a str,
    config: &TokenizerConfig,
    mut f: impl FnMut(TokenKind, &'a str),
) {
    if normalized.is_empty() {
        return;
    }
    if config.words || config.bigrams {
        let mut prev: Option<usize> = None;
        let mut start = 0;
        let bytes = normalized.as_bytes();
        let sep = SEPARATOR as u8;
        for end in (0..=bytes.len()).filter(|&i| i == bytes.len() || bytes[i] == sep) {
            if config.words {
                f(TokenKind::Word, &normalized[start..end]);
            }
            if config.bigrams {
                if let Some(p) = prev {
                    f(TokenKind::Bigram, &normalized[p..end]);
                }
            }
            prev = Some(start);
            start = end + 1;
        }
    }
    if !config.qgrams.is_empty() {
        let mut bounds: Vec<usize> = normalized.char_indices().map(|(i, _)| i).collect();
        bounds.push(normalized.len());
        let chars = bounds.len() - 1;
        for &q in &config.qgrams {
            if q > chars {
                continue;
            }
            for i in 0..=chars - q {
                f(TokenKind::QGram(q as u8), &normalized[bounds[i]..bounds[i + q]]);
            }
        }
    }
}

/// Multiset of tokens with deterministic iteration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenBag {
    counts: BTreeMap<Token, u64>,
}

impl TokenBag {
    pub fn get(&self, token: &Token) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Token, u64)> {
        self.counts.iter().map(|(t, &c)| (t, c))
    }

    pub fn of_kind(&self, kind: TokenKind) -> impl Iterator<Item = (&Token, u64)> {
        self.iter().filter(move |(t, _)| t.kind == kind)
    }

    /// Number of distinct tokens.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Sum of multiplicities.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn into_map(self) -> BTreeMap<Token, u64> {
        self.counts
    }
}

/// Normalize `text` and count its words, word bigrams and q-grams.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> TokenBag {
    let normalized = normalize(text);
    let mut counts = BTreeMap::new();
    for_each_token(&normalized, config, |kind, s| {
        *counts.entry(Token::new(kind, s)).or_insert(0) += 1;
    });
    TokenBag { counts }
}
