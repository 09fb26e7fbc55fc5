//! Latin-script layout generation from a character inventory and corpus
//! frequencies.
//!
//! Grid letters stay where the chosen base grid puts them. Every other
//! grapheme is placed in descending corpus frequency (ties by codepoint):
//! frequent ones get a standalone key after the grid, the rest become
//! long-presses on the letter they decompose to, or on a fallback host when
//! they have none. Hosts that run out of long-press slots spill to page 1.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;
use unicode_script::{Script, UnicodeScript};

use crate::error::AutogenError;
use crate::inventory::{CharacterInventory, Segment};
use crate::layout::{BaseGrid, Key, Layout, Page};

const MAX_ROW_KEYS: usize = 12;
const PAGE_ONE_ROWS: u32 = 3;
const PAGE_ONE_COLS: u32 = 10;
const SWITCH_WIDTH: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutogenOptions {
    pub base_grid: BaseGrid,
    /// Relative frequency at or above which a grapheme gets its own key.
    pub standalone_threshold: f64,
    pub fallback_host_key: String,
    pub max_long_press_per_key: usize,
}

impl Default for AutogenOptions {
    fn default() -> Self {
        Self {
            base_grid: BaseGrid::Qwerty,
            standalone_threshold: 0.02,
            fallback_host_key: "e".into(),
            max_long_press_per_key: 8,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl FrequencyTable {
    pub fn count(&self, g: &str) -> u64 {
        self.counts.get(g).copied().unwrap_or(0)
    }

    pub fn relative(&self, g: &str) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(g) as f64 / self.total as f64
        }
    }
}

/// Counts inventory graphemes in the tokens by greedy longest match.
pub fn char_frequencies<'a>(
    corpus: impl IntoIterator<Item = &'a str>,
    inventory: &CharacterInventory,
) -> Result<FrequencyTable, AutogenError> {
    let set = inventory.grapheme_set();
    let mut counts: BTreeMap<String, u64> = inventory.all().map(|g| (g.clone(), 0)).collect();
    let mut tokens = 0usize;
    for token in corpus {
        tokens += 1;
        for seg in set.segment(token) {
            if let Segment::Known(g) = seg {
                *counts.get_mut(g).expect("segments come from the inventory") += 1;
            }
        }
    }
    if tokens == 0 {
        return Err(AutogenError::EmptyCorpus);
    }
    let total = counts.values().sum();
    Ok(FrequencyTable { counts, total })
}

/// The a–z letter a grapheme decomposes to once combining marks are
/// stripped, e.g. `é` → `e`.
pub fn base_of(grapheme: &str) -> Option<char> {
    let mut residue = grapheme.nfd().filter(|c| !is_combining_mark(*c));
    let c = residue.next()?;
    (residue.next().is_none() && c.is_ascii_lowercase()).then_some(c)
}

enum Placement {
    Standalone,
    LongPress(String),
}

pub fn generate_layout(
    options: &AutogenOptions,
    inventory: &CharacterInventory,
    freqs: &FrequencyTable,
) -> Result<Layout, AutogenError> {
    let rows = options
        .base_grid
        .rows()
        .ok_or_else(|| AutogenError::InvalidOptions("autogen needs a Latin base grid".into()))?;
    if !(0.0..=1.0).contains(&options.standalone_threshold) {
        return Err(AutogenError::InvalidOptions(format!(
            "standalone_threshold {} outside [0, 1]",
            options.standalone_threshold
        )));
    }
    if options.max_long_press_per_key == 0 {
        return Err(AutogenError::InvalidOptions("max_long_press_per_key must be ≥ 1".into()));
    }
    let grid: BTreeSet<char> = rows.iter().flat_map(|r| r.chars()).collect();
    let fallback = options.fallback_host_key.chars().next().filter(|c| {
        options.fallback_host_key.chars().count() == 1 && grid.contains(c)
    });
    let Some(fallback) = fallback else {
        return Err(AutogenError::InvalidOptions(format!(
            "fallback host {:?} is not a grid key",
            options.fallback_host_key
        )));
    };
    for g in inventory.all() {
        let latin = g.chars().all(|c| {
            matches!(c.script(), Script::Latin | Script::Common | Script::Inherited)
        });
        if !latin {
            return Err(AutogenError::NonLatinScript(g.clone()));
        }
    }

    // Graphemes that need a home, most frequent first.
    let is_upper_variant = |g: &str| {
        let lower = g.to_lowercase();
        lower != g && inventory.contains(&lower)
    };
    let mut placed: BTreeSet<String> = grid.iter().map(|c| c.to_string()).collect();
    let mut units: Vec<&String> = inventory
        .required
        .iter()
        .chain(inventory.optional_loanword.iter().filter(|g| freqs.count(g) > 0))
        .filter(|g| !placed.contains(*g) && !is_upper_variant(g))
        .collect();
    units.sort_by(|a, b| freqs.count(b).cmp(&freqs.count(a)).then_with(|| a.cmp(b)));

    let mut page0: Vec<Vec<Key>> = rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.chars()
                .enumerate()
                .map(|(c, ch)| {
                    let s = ch.to_string();
                    Key::letter(&s, r as u32, c as u32, 0.1, &s)
                })
                .collect()
        })
        .collect();
    let mut page1: Vec<Key> = Vec::new();

    for g in units {
        let chars: Vec<char> = g.chars().collect();
        if chars.len() > 1 && chars.iter().all(|c| placed.contains(&c.to_string())) {
            // digraphs are typed letter by letter
            continue;
        }
        let placement = if freqs.relative(g) >= options.standalone_threshold && freqs.count(g) > 0 {
            Placement::Standalone
        } else {
            let host = base_of(g).filter(|c| grid.contains(c)).unwrap_or(fallback);
            Placement::LongPress(host.to_string())
        };
        match placement {
            Placement::Standalone => {
                let row = [0usize, 1]
                    .into_iter()
                    .filter(|&r| page0[r].len() < MAX_ROW_KEYS)
                    .min_by_key(|&r| (page0[r].len(), r))
                    .or((page0[2].len() < MAX_ROW_KEYS).then_some(2));
                match row {
                    Some(r) => {
                        let col = page0[r].len() as u32;
                        page0[r].push(extra_key(g, r as u32, col, inventory));
                    }
                    None => spill(&mut page1, g, "grid", inventory)?,
                }
            }
            Placement::LongPress(host) => {
                let key = page0
                    .iter_mut()
                    .flatten()
                    .find(|k| k.key_id == host)
                    .expect("host is a grid key");
                if key.long_press.len() < options.max_long_press_per_key {
                    key.long_press.push(g.clone());
                    let upper = g.to_uppercase();
                    if upper != *g && inventory.contains(&upper) {
                        key.shift_long_press.push(upper);
                    }
                } else {
                    spill(&mut page1, g, &host, inventory)?;
                }
            }
        }
        placed.insert(g.clone());
    }

    for row in &mut page0 {
        let width = 1.0 / row.len().max(10) as f64;
        for k in row.iter_mut() {
            k.width = width;
        }
    }
    let mut keys: Vec<Key> = page0.into_iter().flatten().collect();
    let mut pages = Vec::new();
    if !page1.is_empty() {
        keys.push(switch_key("more", 3, 0, "…", 1));
        page1.push(switch_key("back", PAGE_ONE_ROWS, 0, "abc", 0));
    }
    pages.push(Page { keys });
    if !page1.is_empty() {
        pages.push(Page { keys: page1 });
    }

    let grid_name = format!("{:?}", options.base_grid).to_lowercase();
    let mut layout = Layout::new(
        format!("{}-{grid_name}-auto", inventory.language_tag),
        inventory.language_tag.clone(),
        "Latn",
        options.base_grid,
    );
    layout.pages = pages;
    layout
        .validate()
        .map_err(|e| AutogenError::InvalidOptions(format!("generated layout is invalid: {e}")))?;
    Ok(layout)
}

fn key_id(g: &str) -> String {
    g.chars()
        .map(|c| format!("u{:04x}", u32::from(c)))
        .collect::<Vec<_>>()
        .join("_")
}

fn extra_key(g: &str, row: u32, col: u32, inventory: &CharacterInventory) -> Key {
    let upper = g.to_uppercase();
    Key {
        shift_output: (upper != g && inventory.contains(&upper)).then_some(upper),
        ..Key::letter(&key_id(g), row, col, 0.1, g)
    }
}

fn switch_key(id: &str, row: u32, col: u32, face: &str, target: usize) -> Key {
    Key {
        key_id: id.into(),
        row,
        col,
        width: SWITCH_WIDTH,
        base_output: String::new(),
        shift_output: None,
        long_press: Vec::new(),
        shift_long_press: Vec::new(),
        face: face.into(),
        switch_to_page: Some(target),
    }
}

fn spill(page1: &mut Vec<Key>, g: &str, host: &str, inventory: &CharacterInventory) -> Result<(), AutogenError> {
    let n = page1.len() as u32;
    if n >= PAGE_ONE_ROWS * PAGE_ONE_COLS {
        return Err(AutogenError::HostOverflowUnresolvable {
            grapheme: g.to_string(),
            host: host.to_string(),
        });
    }
    page1.push(extra_key(g, n / PAGE_ONE_COLS, n % PAGE_ONE_COLS, inventory));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::coverage_report;

    fn letters(extra: &[&str]) -> Vec<String> {
        ('a'..='z').map(String::from).chain(extra.iter().map(|s| s.to_string())).collect()
    }

    #[test]
    fn counts_segments() {
        let inv = CharacterInventory::new("xx", ["a", "b"], Vec::<String>::new()).unwrap();
        let t = char_frequencies(["aa", "b"], &inv).unwrap();
        assert_eq!(t.count("a"), 2);
        assert_eq!(t.count("b"), 1);
        assert_eq!(t.total, 3);
        let zero = char_frequencies(["%%", "!"], &inv).unwrap();
        assert_eq!(zero.total, 0);
        assert_eq!(char_frequencies(Vec::<&str>::new(), &inv), Err(AutogenError::EmptyCorpus));
    }

    #[test]
    fn base_letters() {
        assert_eq!(base_of("é"), Some('e'));
        assert_eq!(base_of("ə"), None);
        assert_eq!(base_of("ǫ"), Some('o'));
        assert_eq!(base_of("ß"), None);
        assert_eq!(base_of("ny"), None);
    }

    #[test]
    fn plain_alphabet_gives_bare_grid() {
        let inv = CharacterInventory::new("xx", letters(&[]), Vec::<String>::new()).unwrap();
        let freqs = char_frequencies(["hello"], &inv).unwrap();
        let l = generate_layout(&AutogenOptions::default(), &inv, &freqs).unwrap();
        let mut bare = Layout::new("xx-qwerty-auto", "xx", "Latn", BaseGrid::Qwerty);
        for (r, row) in BaseGrid::Qwerty.rows().unwrap().iter().enumerate() {
            for (c, ch) in row.chars().enumerate() {
                let s = ch.to_string();
                bare.pages[0].keys.push(Key::letter(&s, r as u32, c as u32, 0.1, &s));
            }
        }
        assert_eq!(l, bare);
    }

    #[test]
    fn rare_schwa_goes_on_fallback_host() {
        let inv = CharacterInventory::new("kr", letters(&["ə", "Ə"]), Vec::<String>::new()).unwrap();
        let freqs = char_frequencies(["kəla", "banana", "kanuri", "tamanu"], &inv).unwrap();
        assert!(freqs.relative("ə") < 0.1);
        let opts = AutogenOptions {
            standalone_threshold: 0.1,
            ..AutogenOptions::default()
        };
        let l = generate_layout(&opts, &inv, &freqs).unwrap();
        let e = l.pages[0].key("e").unwrap();
        assert_eq!(e.long_press, ["ə"]);
        assert_eq!(e.shift_long_press, ["Ə"]);
        assert!(coverage_report(&l, &inv).complete);
    }

    #[test]
    fn frequent_umlauts_get_keys() {
        let inv = CharacterInventory::new("de-CH", letters(&["ä", "ö", "ü", "é"]), Vec::<String>::new()).unwrap();
        let freqs = char_frequencies(["über", "schön", "mädchen", "käse", "für", "café"], &inv).unwrap();
        let opts = AutogenOptions {
            base_grid: BaseGrid::Qwertz,
            ..AutogenOptions::default()
        };
        let l = generate_layout(&opts, &inv, &freqs).unwrap();
        for u in ["ä", "ö", "ü"] {
            assert!(l.pages[0].keys.iter().any(|k| k.base_output == u), "{u}");
        }
        assert!(freqs.relative("é") >= 0.02);
        assert!(coverage_report(&l, &inv).complete);
    }

    #[test]
    fn overflow_spills_to_second_page() {
        let extra = ["à", "á", "â", "ã", "ä", "å", "ā", "ă"];
        let inv = CharacterInventory::new("xx", letters(&extra), Vec::<String>::new()).unwrap();
        let freqs = char_frequencies(["a"], &inv).unwrap();
        let opts = AutogenOptions {
            max_long_press_per_key: 3,
            ..AutogenOptions::default()
        };
        let l = generate_layout(&opts, &inv, &freqs).unwrap();
        assert_eq!(l.pages[0].key("a").unwrap().long_press.len(), 3);
        assert_eq!(l.pages.len(), 2);
        assert_eq!(l.pages[1].keys.len(), 6);
        assert!(coverage_report(&l, &inv).complete);
    }

    #[test]
    fn non_latin_is_rejected() {
        let inv = CharacterInventory::new("ru", ["а"], Vec::<String>::new()).unwrap();
        let freqs = char_frequencies(["а"], &inv).unwrap();
        assert_eq!(
            generate_layout(&AutogenOptions::default(), &inv, &freqs),
            Err(AutogenError::NonLatinScript("а".into()))
        );
    }

    #[test]
    fn unplaceable_grapheme_overflows() {
        let extra: Vec<String> = (0..40u32)
            .map(|i| char::from_u32(0x0250 + i).unwrap().to_string())
            .collect();
        let refs: Vec<&str> = extra.iter().map(String::as_str).collect();
        let inv = CharacterInventory::new("xx", letters(&refs), Vec::<String>::new()).unwrap();
        let freqs = char_frequencies(["a"], &inv).unwrap();
        let opts = AutogenOptions {
            max_long_press_per_key: 1,
            ..AutogenOptions::default()
        };
        assert!(matches!(
            generate_layout(&opts, &inv, &freqs),
            Err(AutogenError::HostOverflowUnresolvable { .. })
        ));
    }
}
