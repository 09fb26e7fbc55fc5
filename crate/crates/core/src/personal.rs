//! Personal dictionary: words the user commits and corrections they
//! reverted.
//!
//! Persistence is a UTF-8 text file:
//!
//! ```text
//! [words]
//! akn<TAB>3<TAB>1700000000000
//! [blocklist]
//! akn<TAB>akin<TAB>1
//! ```
//!
//! Fields are tab-separated. Words carry a count and a last-used timestamp in milliseconds; blocklist
//! lines hold a literal, the rejected correction and a count.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{FormatError, PersonalError};
use crate::inventory::GraphemeSet;
use crate::lm::{share, LanguageModel};
use crate::text::UNK;

/// Counts are halved once the total passes this, when decay is enabled.
pub const DECAY_LIMIT: u64 = 10_000;

/// Personal mass saturates at this weight.
pub const MAX_PERSONAL_WEIGHT: f64 = 0.5;

const WEIGHT_PIVOT: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordStat {
    pub count: u64,
    pub last_used: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonalDict {
    words: BTreeMap<String, WordStat>,
    blocklist: BTreeMap<(String, String), u64>,
    #[serde(skip)]
    pub decay: bool,
}

impl PersonalDict {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, &WordStat)> {
        self.words.iter().map(|(w, s)| (w.as_str(), s))
    }

    pub fn blocklist(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.blocklist
            .iter()
            .map(|((l, c), n)| (l.as_str(), c.as_str(), *n))
    }

    pub fn count(&self, word: &str) -> u64 {
        self.words.get(word).map_or(0, |s| s.count)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains_key(word)
    }

    pub fn total(&self) -> u64 {
        self.words.values().map(|s| s.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty() && self.blocklist.is_empty()
    }

    pub fn clear(&mut self) {
        self.words.clear();
        self.blocklist.clear();
    }

    /// Mixture weight of the personal distribution.
    pub fn weight(&self) -> f64 {
        let t = self.total() as f64;
        MAX_PERSONAL_WEIGHT.min(t / (t + WEIGHT_PIVOT))
    }

    /// Relative frequency of `word` among personal words.
    pub fn unigram(&self, word: &str) -> f64 {
        let t = self.total();
        if t == 0 {
            0.0
        } else {
            self.count(word) as f64 / t as f64
        }
    }

    pub fn learn_commit(&mut self, word: &str, now: u64, inventory: &GraphemeSet) -> Result<(), PersonalError> {
        if word.is_empty() {
            return Err(PersonalError::EmptyWord);
        }
        if let Some(ch) = inventory.first_foreign_char(word) {
            return Err(PersonalError::InventoryViolation {
                word: word.to_string(),
                ch,
            });
        }
        let stat = self.words.entry(crate::inventory::nfc(word)).or_insert(WordStat {
            count: 0,
            last_used: now,
        });
        stat.count += 1;
        stat.last_used = stat.last_used.max(now);
        if self.decay && self.total() > DECAY_LIMIT {
            self.halve();
        }
        Ok(())
    }

    /// Records that the user undid `literal → correction`. The literal is
    /// learned as a commit when it fits the inventory; the correction's
    /// earlier commit is taken back.
    pub fn learn_revert(&mut self, literal: &str, correction: &str, now: u64, inventory: &GraphemeSet) {
        if literal.is_empty() || literal == correction {
            return;
        }
        *self
            .blocklist
            .entry((literal.to_string(), correction.to_string()))
            .or_default() += 1;
        let _ = self.learn_commit(literal, now, inventory);
    }

    /// Adds another dictionary's counts and blocklist into this one.
    pub fn merge(&mut self, other: &PersonalDict) {
        for (w, stat) in &other.words {
            let slot = self.words.entry(w.clone()).or_insert(WordStat {
                count: 0,
                last_used: stat.last_used,
            });
            slot.count += stat.count;
            slot.last_used = slot.last_used.max(stat.last_used);
        }
        for (pair, n) in &other.blocklist {
            *self.blocklist.entry(pair.clone()).or_default() += n;
        }
    }

    /// Removes one commit of `word`, dropping it at zero.
    pub fn forget_commit(&mut self, word: &str) {
        if let Some(stat) = self.words.get_mut(word) {
            stat.count -= 1;
            if stat.count == 0 {
                self.words.remove(word);
            }
        }
    }

    pub fn is_blocked(&self, literal: &str, correction: &str) -> bool {
        self.blocklist
            .contains_key(&(literal.to_string(), correction.to_string()))
    }

    pub fn blocked_count(&self, literal: &str, correction: &str) -> u64 {
        self.blocklist
            .get(&(literal.to_string(), correction.to_string()))
            .copied()
            .unwrap_or(0)
    }

    fn halve(&mut self) {
        for stat in self.words.values_mut() {
            stat.count /= 2;
        }
        self.words.retain(|_, s| s.count > 0);
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("[words]\n");
        for (w, s) in &self.words {
            out.push_str(&format!("{w}\t{}\t{}\n", s.count, s.last_used));
        }
        out.push_str("[blocklist]\n");
        for ((l, c), n) in &self.blocklist {
            out.push_str(&format!("{l}\t{c}\t{n}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, FormatError> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Words,
            Blocklist,
        }
        let mut dict = Self::default();
        let mut section = Section::None;
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            match line.trim() {
                "" => continue,
                "[words]" => {
                    section = Section::Words;
                    continue;
                }
                "[blocklist]" => {
                    section = Section::Blocklist;
                    continue;
                }
                _ => {}
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(FormatError::new(n, "expected three tab-separated fields"));
            }
            let num = |s: &str| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| FormatError::new(n, format!("bad number {s:?}")))
            };
            match section {
                Section::None => return Err(FormatError::new(n, "record outside a section")),
                Section::Words => {
                    let count = num(fields[1])?;
                    if count == 0 || fields[0].is_empty() {
                        return Err(FormatError::new(n, "word records need a word and a count ≥ 1"));
                    }
                    dict.words.insert(
                        fields[0].to_string(),
                        WordStat {
                            count,
                            last_used: num(fields[2])?,
                        },
                    );
                }
                Section::Blocklist => {
                    if fields[0] == fields[1] {
                        return Err(FormatError::new(n, "literal equals correction"));
                    }
                    dict.blocklist
                        .insert((fields[0].to_string(), fields[1].to_string()), num(fields[2])?);
                }
            }
        }
        Ok(dict)
    }

    pub fn load(path: &Path) -> Result<Self, PersonalError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text).map_err(PersonalError::Format)
    }

    /// Writes to a temporary file next to `path`, then renames it over.
    pub fn save(&self, path: &Path) -> Result<(), PersonalError> {
        let dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        std::fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(self.to_text().as_bytes())?;
        tmp.persist(path).map_err(|e| PersonalError::Io(e.error))?;
        Ok(())
    }
}

/// A base model blended with a personal dictionary:
/// `P = (1 − λ)·P_base + λ·P_personal`.
pub struct Personalized<'a> {
    base: &'a dyn LanguageModel,
    dict: &'a PersonalDict,
    lambda: f64,
    absent: usize,
}

impl<'a> Personalized<'a> {
    pub fn new(base: &'a dyn LanguageModel, dict: &'a PersonalDict) -> Self {
        let absent = dict.words().filter(|(w, _)| !base.has_event(w)).count();
        Self {
            base,
            dict,
            lambda: dict.weight(),
            absent,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl LanguageModel for Personalized<'_> {
    fn language_tag(&self) -> &str {
        self.base.language_tag()
    }

    fn script(&self) -> &str {
        self.base.script()
    }

    fn prob(&self, token: &str, context: &[String]) -> f64 {
        let base = share(self.base, token, context, self.absent);
        let personal = if token == UNK { 0.0 } else { self.dict.unigram(token) };
        (1.0 - self.lambda) * base + self.lambda * personal
    }

    fn has_event(&self, token: &str) -> bool {
        self.base.has_event(token) || self.dict.contains(token)
    }

    fn events(&self) -> Vec<String> {
        let mut all: BTreeSet<String> = self.base.events().into_iter().collect();
        all.extend(self.dict.words().map(|(w, _)| w.to_string()));
        all.into_iter().collect()
    }
}

/// `(1 − λ)·P_base(word | context) + λ·count(word) / total`.
pub fn personalized_prob(base: &dyn LanguageModel, dict: &PersonalDict, word: &str, context: &[String]) -> f64 {
    Personalized::new(base, dict).prob(word, context)
}
