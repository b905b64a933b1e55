//! Text normalization and tokenization into words, word bigrams and
//! character q-grams.

mod emoji;
mod normalize;
mod tokenize;

pub use emoji::{EmojiTable, DEFAULT_EMOJI_RANGES};
pub use normalize::{normalize, SEPARATOR};
pub use tokenize::{
    for_each_token, tokenize, ConfigError, Token, TokenBag, TokenDecodeError, TokenKind,
    TokenizerConfig,
};

/// Whether a token is made only of emoji (default inventory).
pub fn is_emoji(token: &Token) -> bool {
    static TABLE: std::sync::LazyLock<EmojiTable> = std::sync::LazyLock::new(EmojiTable::default);
    TABLE.is_emoji_str(&token.surface)
}
