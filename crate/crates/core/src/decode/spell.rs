//! Spell-checking with Damerau-Levenshtein suggestions.
//!
//! Candidates come from a symmetric-delete index: every lexicon word is
//! stored under all strings reachable by up to two deletions, and a probe
//! looks up its own deletions. Each edit removes at most one character
//! from either side, so this finds every word within distance 2; the true
//! distance is then computed exactly.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::personal::PersonalDict;
use crate::profile::LanguageProfile;
use crate::text::Wordlist;

pub const MAX_SPELL_DISTANCE: usize = 2;
pub const MAX_SPELL_SUGGESTIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpellResult {
    pub flagged: bool,
    pub suggestions: Vec<String>,
}

/// A wordlist indexed for suggestion lookup.
#[derive(Debug, Clone)]
pub struct SpellChecker {
    words: Vec<(String, u64)>,
    deletes: HashMap<String, Vec<u32>>,
}

impl SpellChecker {
    pub fn new(lexicon: &Wordlist) -> Self {
        let words: Vec<(String, u64)> = lexicon.counts.iter().map(|(w, c)| (w.clone(), *c)).collect();
        let mut deletes: HashMap<String, Vec<u32>> = HashMap::new();
        for (id, (w, _)) in words.iter().enumerate() {
            for d in deletions(w, MAX_SPELL_DISTANCE) {
                deletes.entry(d).or_default().push(id as u32);
            }
        }
        Self { words, deletes }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.binary_search_by(|(w, _)| w.as_str().cmp(word)).is_ok()
    }

    pub fn check(&self, word: &str, personal: Option<&PersonalDict>, profile: &LanguageProfile) -> SpellResult {
        let folded = profile.fold(word);
        let known = |w: &str| self.contains(w) || personal.is_some_and(|p| p.contains(w));
        let flagged = !(known(word) || known(&folded));
        SpellResult {
            flagged,
            suggestions: self.suggest(&folded),
        }
    }

    /// Lexicon words within distance 2 of `word`, other than `word`,
    /// ranked by distance, then frequency, then spelling.
    pub fn suggest(&self, word: &str) -> Vec<String> {
        let mut ids = BTreeSet::new();
        for d in deletions(word, MAX_SPELL_DISTANCE) {
            if let Some(list) = self.deletes.get(&d) {
                ids.extend(list.iter().copied());
            }
        }
        let mut ranked: Vec<(usize, u64, &str)> = ids
            .into_iter()
            .filter_map(|id| {
                let (w, c) = &self.words[id as usize];
                let d = damerau_levenshtein(word, w);
                (1..=MAX_SPELL_DISTANCE).contains(&d).then_some((d, *c, w.as_str()))
            })
            .collect();
        ranked.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(b.2)));
        ranked
            .into_iter()
            .take(MAX_SPELL_SUGGESTIONS)
            .map(|(_, _, w)| w.to_string())
            .collect()
    }
}

/// One-shot check that builds an index for `lexicon`.
pub fn spell_check(word: &str, lexicon: &Wordlist, personal: Option<&PersonalDict>, profile: &LanguageProfile) -> SpellResult {
    SpellChecker::new(lexicon).check(word, personal, profile)
}

/// `word` and every string obtained from it by up to `max` deletions.
fn deletions(word: &str, max: usize) -> BTreeSet<String> {
    let mut all = BTreeSet::from([word.to_string()]);
    let mut layer = vec![word.chars().collect::<Vec<char>>()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for i in 0..w.len() {
                let mut v = w.clone();
                v.remove(i);
                if all.insert(v.iter().collect()) {
                    next.push(v);
                }
            }
        }
        layer = next;
    }
    all
}

/// Unrestricted Damerau-Levenshtein distance over characters.
pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    let inf = n + m;
    let mut last_row: HashMap<char, usize> = HashMap::new();
    let w = m + 2;
    let mut d = vec![0usize; (n + 2) * w];
    d[0] = inf;
    for i in 0..=n {
        d[(i + 1) * w] = inf;
        d[(i + 1) * w + 1] = i;
    }
    for j in 0..=m {
        d[j + 1] = inf;
        d[w + j + 1] = j;
    }
    for i in 1..=n {
        let mut last_col = 0;
        for j in 1..=m {
            let i1 = *last_row.get(&b[j - 1]).unwrap_or(&0);
            let j1 = last_col;
            let cost = usize::from(a[i - 1] != b[j - 1]);
            if cost == 0 {
                last_col = j;
            }
            let sub = d[i * w + j] + cost;
            let ins = d[(i + 1) * w + j] + 1;
            let del = d[i * w + j + 1] + 1;
            let trans = d[i1 * w + j1] + (i - i1 - 1) + 1 + (j - j1 - 1);
            d[(i + 1) * w + j + 1] = sub.min(ins).min(del).min(trans);
        }
        last_row.insert(a[i - 1], i);
    }
    d[(n + 1) * w + m + 1]
}
