//! Corpus normalization.
//!
//! Text is NFC-normalized and split on whitespace. Whitespace chunks that
//! look like URLs or e-mail addresses are dropped whole; the rest are split
//! on punctuation, keeping apostrophes and hyphens inside words. Tokens are
//! case-folded for cased languages and must be covered by the inventory.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;

use crate::inventory::{nfc, WORD_INTERNAL};
use crate::profile::LanguageProfile;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Folded form used for counting and lookup.
    pub text: String,
    /// The form as written, for suggestion display.
    pub surface: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Url,
    Email,
    DigitRun,
    ForeignCharacter,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::Url => "url",
            RejectReason::Email => "email",
            RejectReason::DigitRun => "digit_run",
            RejectReason::ForeignCharacter => "foreign_character",
        })
    }
}

/// Counts of dropped tokens by reason, and of the characters that caused
/// inventory rejections.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionReport {
    pub by_reason: BTreeMap<RejectReason, usize>,
    pub by_char: BTreeMap<char, usize>,
}

impl RejectionReport {
    pub fn total(&self) -> usize {
        self.by_reason.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_reason.is_empty()
    }

    pub fn merge(&mut self, other: &RejectionReport) {
        for (r, n) in &other.by_reason {
            *self.by_reason.entry(*r).or_default() += n;
        }
        for (c, n) in &other.by_char {
            *self.by_char.entry(*c).or_default() += n;
        }
    }

    fn reject(&mut self, reason: RejectReason) {
        *self.by_reason.entry(reason).or_default() += 1;
    }
}

impl fmt::Display for RejectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rejected tokens: {}", self.total())?;
        for (reason, n) in &self.by_reason {
            writeln!(f, "  reason\t{reason}\t{n}")?;
        }
        for (c, n) in &self.by_char {
            writeln!(f, "  char\t{c}\tU+{:04X}\t{n}", u32::from(*c))?;
        }
        Ok(())
    }
}

/// Tokenizes one piece of text.
pub fn normalize(raw_text: &str, profile: &LanguageProfile) -> (Vec<Token>, RejectionReport) {
    let set = profile.grapheme_set();
    let text = nfc(raw_text);
    let mut tokens = Vec::new();
    let mut report = RejectionReport::default();
    for chunk in text.split_whitespace() {
        if is_url(chunk) {
            report.reject(RejectReason::Url);
            continue;
        }
        if is_email(chunk) {
            report.reject(RejectReason::Email);
            continue;
        }
        for piece in chunk.split(|c: char| !is_word_char(c)) {
            let word = piece.trim_matches(|c| WORD_INTERNAL.contains(&c));
            if word.is_empty() {
                continue;
            }
            if word.chars().all(|c| c.is_numeric() || WORD_INTERNAL.contains(&c)) {
                report.reject(RejectReason::DigitRun);
                continue;
            }
            let folded = profile.fold(word);
            let foreign: Vec<char> = set
                .segment(&folded)
                .into_iter()
                .filter_map(|s| match s {
                    crate::inventory::Segment::Unknown(c) if !WORD_INTERNAL.contains(&c) => Some(c),
                    _ => None,
                })
                .collect();
            if foreign.is_empty() {
                tokens.push(Token {
                    text: folded,
                    surface: word.to_string(),
                });
            } else {
                report.reject(RejectReason::ForeignCharacter);
                let mut seen = foreign;
                seen.sort_unstable();
                seen.dedup();
                for c in seen {
                    *report.by_char.entry(c).or_default() += 1;
                }
            }
        }
    }
    (tokens, report)
}

/// Normalizes a corpus with one sentence per line. Lines left without
/// tokens are dropped.
pub fn normalize_corpus(corpus: &str, profile: &LanguageProfile) -> (Vec<Vec<Token>>, RejectionReport) {
    let mut sentences = Vec::new();
    let mut report = RejectionReport::default();
    for line in corpus.lines() {
        let (tokens, r) = normalize(line, profile);
        report.merge(&r);
        if !tokens.is_empty() {
            sentences.push(tokens);
        }
    }
    (sentences, report)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c) || WORD_INTERNAL.contains(&c)
}

fn is_url(chunk: &str) -> bool {
    let lower = chunk.to_lowercase();
    lower.contains("://") || lower.starts_with("www.")
}

fn is_email(chunk: &str) -> bool {
    match chunk.split_once('@') {
        Some((user, host)) => !user.is_empty() && host.contains('.') && !host.ends_with('.'),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inventory::CharacterInventory;

    fn latin() -> LanguageProfile {
        let mut letters: Vec<String> = ('a'..='z').map(String::from).collect();
        letters.push("é".into());
        LanguageProfile::new("xx", "Latn", CharacterInventory::new("xx", letters, Vec::<String>::new()).unwrap())
    }

    fn texts(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn url_is_dropped_and_reported() {
        let (tokens, report) = normalize("Héllo!! visit http://x.y", &latin());
        assert_eq!(texts(&tokens), ["héllo", "visit"]);
        assert_eq!(tokens[0].surface, "Héllo");
        assert_eq!(report.total(), 1);
        assert_eq!(report.by_reason[&RejectReason::Url], 1);
    }

    #[test]
    fn decomposed_input_is_composed() {
        let (tokens, report) = normalize("he\u{301}llo", &latin());
        assert_eq!(texts(&tokens), ["héllo"]);
        assert!(report.is_empty());
    }

    #[test]
    fn empty_input() {
        let (tokens, report) = normalize("", &latin());
        assert!(tokens.is_empty());
        assert!(report.is_empty());
    }

    #[test]
    fn emails_digits_and_hyphens() {
        let (tokens, report) = normalize("mail me@x.org 2024 -- rock-'n'-roll, 'quoted'", &latin());
        assert_eq!(texts(&tokens), ["mail", "rock-'n'-roll", "quoted"]);
        assert_eq!(report.by_reason[&RejectReason::Email], 1);
        assert_eq!(report.by_reason[&RejectReason::DigitRun], 1);
    }

    #[test]
    fn foreign_character_is_named() {
        let (tokens, report) = normalize("ok naïve", &latin());
        assert_eq!(texts(&tokens), ["ok"]);
        assert_eq!(report.by_char[&'ï'], 1);
    }

    #[test]
    fn uncased_profile_keeps_case() {
        let mut p = latin();
        p.casing = crate::profile::Casing::Uncased;
        let (tokens, report) = normalize("Ab", &p);
        assert!(tokens.is_empty());
        assert_eq!(report.by_char[&'A'], 1);
    }
}
