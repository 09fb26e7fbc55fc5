//! Character inventories and grapheme segmentation.
//!
//! A grapheme here is an NFC codepoint sequence that an orthography treats
//! as one unit, e.g. `"ə"`, `"ny"` or `"क्ष"`. Inventories list them and the
//! [`GraphemeSet`] segments text against them by greedy longest match.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use unicode_normalization::{is_nfc, UnicodeNormalization};

use crate::error::InventoryError;

/// Characters that may appear inside a word without being inventory members.
pub const WORD_INTERNAL: [char; 3] = ['\'', '\u{2019}', '-'];

pub fn nfc(text: &str) -> String {
    text.nfc().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterInventory {
    pub language_tag: String,
    #[serde(default)]
    pub required: BTreeSet<String>,
    #[serde(default)]
    pub optional_loanword: BTreeSet<String>,
}

impl CharacterInventory {
    pub fn new(
        language_tag: impl Into<String>,
        required: impl IntoIterator<Item = impl Into<String>>,
        optional_loanword: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, InventoryError> {
        let inv = Self {
            language_tag: language_tag.into(),
            required: required.into_iter().map(Into::into).collect(),
            optional_loanword: optional_loanword.into_iter().map(Into::into).collect(),
        };
        inv.validate()?;
        Ok(inv)
    }

    pub fn empty(language_tag: impl Into<String>) -> Self {
        Self {
            language_tag: language_tag.into(),
            required: BTreeSet::new(),
            optional_loanword: BTreeSet::new(),
        }
    }

    pub fn validate(&self) -> Result<(), InventoryError> {
        for g in self.required.iter().chain(&self.optional_loanword) {
            if g.is_empty() {
                return Err(InventoryError::EmptyGrapheme);
            }
            if !is_nfc(g) {
                return Err(InventoryError::NonNfc(g.clone()));
            }
        }
        if let Some(g) = self.required.intersection(&self.optional_loanword).next() {
            return Err(InventoryError::Overlap(g.clone()));
        }
        Ok(())
    }

    /// All graphemes, required first then loanword-only ones.
    pub fn all(&self) -> impl Iterator<Item = &String> {
        self.required.iter().chain(self.optional_loanword.iter())
    }

    pub fn contains(&self, grapheme: &str) -> bool {
        self.required.contains(grapheme) || self.optional_loanword.contains(grapheme)
    }

    pub fn grapheme_set(&self) -> GraphemeSet {
        GraphemeSet::new(self.all().cloned())
    }

    /// Parses an inventory from TOML. Accepts either a bare inventory
    /// document or a profile document carrying an `[inventory]` table.
    pub fn from_toml(text: &str) -> Result<Self, InventoryError> {
        #[derive(Deserialize)]
        struct Wrapped {
            inventory: CharacterInventory,
        }
        let inv = match toml::from_str::<Wrapped>(text) {
            Ok(w) => w.inventory,
            Err(_) => toml::from_str::<CharacterInventory>(text)
                .map_err(|e| InventoryError::Parse(e.to_string()))?,
        };
        inv.validate()?;
        Ok(inv)
    }
}

/// One piece of a segmented string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment<'a> {
    Known(&'a str),
    Unknown(char),
}

/// A set of graphemes with greedy longest-match segmentation.
#[derive(Debug, Clone, Default)]
pub struct GraphemeSet {
    entries: HashSet<String>,
    max_chars: usize,
}

impl GraphemeSet {
    pub fn new(entries: impl IntoIterator<Item = String>) -> Self {
        let entries: HashSet<String> = entries.into_iter().filter(|g| !g.is_empty()).collect();
        let max_chars = entries.iter().map(|g| g.chars().count()).max().unwrap_or(0);
        Self { entries, max_chars }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, g: &str) -> bool {
        self.entries.contains(g)
    }

    pub fn insert(&mut self, g: impl Into<String>) {
        let g = g.into();
        if g.is_empty() {
            return;
        }
        self.max_chars = self.max_chars.max(g.chars().count());
        self.entries.insert(g);
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.entries.iter()
    }

    /// Greedy longest-match segmentation. Characters not starting any known
    /// grapheme come back as [`Segment::Unknown`].
    pub fn segment<'a>(&self, text: &'a str) -> Vec<Segment<'a>> {
        let bounds: Vec<usize> = text
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(text.len()))
            .collect();
        let n = bounds.len() - 1;
        let mut out = Vec::new();
        let mut i = 0;
        while i < n {
            let longest = (1..=self.max_chars.min(n - i))
                .rev()
                .find(|&len| self.entries.contains(&text[bounds[i]..bounds[i + len]]));
            match longest {
                Some(len) => {
                    out.push(Segment::Known(&text[bounds[i]..bounds[i + len]]));
                    i += len;
                }
                None => {
                    let c = text[bounds[i]..].chars().next().expect("in bounds");
                    out.push(Segment::Unknown(c));
                    i += 1;
                }
            }
        }
        out
    }

    /// The first character that cannot be covered by this set, ignoring the
    /// word-internal apostrophes and hyphens.
    pub fn first_foreign_char(&self, word: &str) -> Option<char> {
        self.segment(word).into_iter().find_map(|s| match s {
            Segment::Unknown(c) if !WORD_INTERNAL.contains(&c) => Some(c),
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_prefers_longest_grapheme() {
        let set = GraphemeSet::new(["n", "y", "ny", "a"].map(String::from));
        assert_eq!(
            set.segment("nya"),
            vec![Segment::Known("ny"), Segment::Known("a")]
        );
        assert_eq!(
            set.segment("nxa"),
            vec![
                Segment::Known("n"),
                Segment::Unknown('x'),
                Segment::Known("a")
            ]
        );
    }

    #[test]
    fn overlap_is_rejected() {
        let err = CharacterInventory::new("xx", ["a", "b"], ["b"]).unwrap_err();
        assert_eq!(err, InventoryError::Overlap("b".into()));
    }

    #[test]
    fn non_nfc_is_rejected() {
        let err = CharacterInventory::new("xx", ["e\u{301}"], Vec::<String>::new()).unwrap_err();
        assert!(matches!(err, InventoryError::NonNfc(_)));
    }

    #[test]
    fn hyphen_and_apostrophe_are_word_internal() {
        let set = GraphemeSet::new(["a", "k", "n", "m"].map(String::from));
        assert_eq!(set.first_foreign_char("makan-makan"), None);
        assert_eq!(set.first_foreign_char("makan2"), Some('2'));
    }

    #[test]
    fn parses_profile_style_document() {
        let doc = r#"
language_tag = "kr"
[inventory]
language_tag = "kr"
required = ["a", "ə"]
"#;
        let inv = CharacterInventory::from_toml(doc).unwrap();
        assert!(inv.required.contains("ə"));
    }
}
