use std::collections::BTreeSet;

use unicode_general_category::{get_general_category, GeneralCategory};

use super::inventory::BrevigraphInventory;

/// MIDDLE DOT, PUNCTUS ELEVATUS MARK and its MUFI private-use code point.
pub const EXTRA_PUNCTUATION: [char; 3] = ['\u{00B7}', '\u{2E4E}', '\u{F161}'];

fn is_unicode_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

/// Strips punctuation and normalizes whitespace in raw transcriptions.
///
/// A code point is removed when it is listed in the extra punctuation set, or
/// when its general category is punctuation and it is not a brevigraph
/// (the Tironian et, U+204A, is category Po but is an abbreviation sign).
#[derive(Debug, Clone)]
pub struct Cleaner<'a> {
    inventory: &'a BrevigraphInventory,
    extra: BTreeSet<char>,
}

impl<'a> Cleaner<'a> {
    pub fn new(inventory: &'a BrevigraphInventory) -> Self {
        Self {
            inventory,
            extra: EXTRA_PUNCTUATION.into_iter().collect(),
        }
    }

    pub fn with_extra_punctuation(mut self, extra: impl IntoIterator<Item = char>) -> Self {
        self.extra.extend(extra);
        self
    }

    pub fn is_punctuation(&self, c: char) -> bool {
        self.extra.contains(&c) || (is_unicode_punctuation(c) && !self.inventory.contains(c))
    }

    pub fn clean(&self, raw: &str) -> String {
        let mut out = String::with_capacity(raw.len());
        let mut pending_space = false;
        for c in raw.chars() {
            if c.is_whitespace() {
                pending_space = true;
                continue;
            }
            if self.is_punctuation(c) {
                continue;
            }
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        }
        out
    }
}

/// Cleans `raw` with the default inventory and punctuation set.
pub fn clean_text(raw: &str) -> String {
    let inventory = BrevigraphInventory::default();
    Cleaner::new(&inventory).clean(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn removes_punctuation_and_collapses_spaces() {
        assert_eq!(clean_text("eñ . ī dǝ"), "eñ ī dǝ");
        assert_eq!(clean_text("a\nb"), "a b");
        assert_eq!(clean_text(""), "");
    }

    #[test]
    fn trims_and_collapses_runs() {
        assert_eq!(clean_text("  \t a \r\n\n  b  "), "a b");
        assert_eq!(clean_text(" . , ; "), "");
    }

    #[test]
    fn folio_numbers_lose_their_dots() {
        assert_eq!(clean_text("ende .43. die"), "ende 43 die");
    }

    #[test]
    fn keeps_tironian_et_and_marks() {
        assert_eq!(clean_text("⁊ n\u{0304}, ꝑ·"), "⁊ n\u{0304} ꝑ");
    }

    #[test]
    fn drops_punctus_elevatus() {
        assert_eq!(clean_text("a\u{2E4E} b\u{F161}"), "a b");
    }

    #[test]
    fn punctuation_only_gap_does_not_glue_words() {
        // the dot sits between two spaces; only one space must survive
        assert_eq!(clean_text("a . b"), "a b");
        assert_eq!(clean_text("a.b"), "ab");
    }

    proptest! {
        #[test]
        fn idempotent(s in "[a-zē\u{0303}ñ .,;:!?\n\t·0-9⁊]{0,60}") {
            let once = clean_text(&s);
            prop_assert_eq!(clean_text(&once), once.clone());
            prop_assert!(!once.starts_with(' ') && !once.ends_with(' '));
            prop_assert!(!once.contains("  "));
        }
    }
}
