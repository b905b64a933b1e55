use std::sync::LazyLock;

use regex::Regex;

/// Separator that replaces whitespace in normalized text.
pub const SEPARATOR: char = '~';

static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").unwrap());
static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)https?://\S*|\bwww\.\S*").unwrap());
static PUNCT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\p{P}+").unwrap());

/// Canonical text form used by every tokenizer.
///
/// Steps, in order: drop `@mentions`, drop URLs (`http(s)://…` and `www.…`),
/// lowercase, drop Unicode punctuation, then collapse whitespace runs into a
/// single `~` and trim separators at both ends. A literal `~` in the input
/// counts as whitespace.
pub fn normalize(text: &str) -> String {
    let text = MENTION.replace_all(text, " ");
    let text = URL.replace_all(&text, " ");
    let text = text.to_lowercase();
    let text = PUNCT.replace_all(&text, "");

    let mut out = String::with_capacity(text.len());
    let mut pending_sep = false;
    for c in text.chars() {
        if c.is_whitespace() || c == SEPARATOR {
            pending_sep = !out.is_empty();
        } else {
            if pending_sep {
                out.push(SEPARATOR);
                pending_sep = false;
            }
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mentions_urls_punctuation() {
        assert_eq!(normalize("Hello @ana http://t.co/x WORLD!"), "hello~world");
    }

    #[test]
    fn empty() {
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("  !!  "), "");
    }

    #[test]
    fn accents_survive() {
        assert_eq!(normalize("Ya   LLEGUÉ."), "ya~llegué");
    }

    #[test]
    fn hashtags_keep_their_word() {
        assert_eq!(normalize("#FelizSábado en www.ejemplo.mx"), "felizsábado~en");
    }

    #[test]
    fn uppercase_scheme_and_tilde_input() {
        assert_eq!(normalize("ver HTTPS://X.COM/A ~ ya~no"), "ver~ya~no");
    }

    #[test]
    fn emoji_is_not_punctuation() {
        assert_eq!(normalize("te amo 😀👍🏽"), "te~amo~😀👍🏽");
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC{0,40}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once.clone());
        }

        #[test]
        fn no_whitespace_or_edge_separators(s in "[a-zA-Z @#.~\t\n:/é😀]{0,40}") {
            let n = normalize(&s);
            prop_assert!(!n.chars().any(char::is_whitespace));
            prop_assert!(!n.starts_with(SEPARATOR) && !n.ends_with(SEPARATOR));
            prop_assert!(!n.contains("~~"));
        }
    }
}
