use super::normalize::SEPARATOR;

/// Code-point ranges (inclusive) treated as emoji.
pub const DEFAULT_EMOJI_RANGES: &[(u32, u32)] = &[
    (0x1F300, 0x1F5FF), // Miscellaneous Symbols and Pictographs
    (0x1F600, 0x1F64F), // Emoticons
    (0x1F680, 0x1F6FF), // Transport and Map Symbols
    (0x1F900, 0x1F9FF), // Supplemental Symbols and Pictographs
    (0x1FA70, 0x1FAFF), // Symbols and Pictographs Extended-A
];

/// Characters that may join or decorate emoji without being emoji
/// themselves: variation selectors, zero-width joiner, skin-tone modifiers.
fn is_emoji_glue(c: char) -> bool {
    matches!(c as u32, 0xFE00..=0xFE0F | 0x200D | 0x1F3FB..=0x1F3FF) || c == SEPARATOR
}

/// A configurable emoji inventory.
#[derive(Debug, Clone, PartialEq)]
pub struct EmojiTable {
    ranges: Vec<(u32, u32)>,
}

impl Default for EmojiTable {
    fn default() -> Self {
        Self::new(DEFAULT_EMOJI_RANGES.to_vec())
    }
}

impl EmojiTable {
    pub fn new(mut ranges: Vec<(u32, u32)>) -> Self {
        ranges.sort_unstable();
        Self { ranges }
    }

    pub fn contains(&self, c: char) -> bool {
        let cp = c as u32;
        let idx = self.ranges.partition_point(|&(lo, _)| lo <= cp);
        idx > 0 && cp <= self.ranges[idx - 1].1
    }

    /// True when every non-glue character is an emoji and at least one is.
    pub fn is_emoji_str(&self, surface: &str) -> bool {
        let mut seen = false;
        for c in surface.chars() {
            if self.contains(c) {
                seen = true;
            } else if !is_emoji_glue(c) {
                return false;
            }
        }
        seen
    }
}
