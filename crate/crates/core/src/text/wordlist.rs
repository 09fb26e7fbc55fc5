use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::FormatError;

/// Word frequencies from a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wordlist {
    pub counts: BTreeMap<String, u64>,
    pub source: String,
}

pub fn build_wordlist<'a>(tokens: impl IntoIterator<Item = &'a str>) -> Wordlist {
    let mut counts = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.to_string()).or_insert(0) += 1;
    }
    Wordlist {
        counts,
        source: String::new(),
    }
}

impl Wordlist {
    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `# source: ...` header, then `word<TAB>count` per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# source: {}\n", self.source);
        for (w, c) in &self.counts {
            out.push_str(&format!("{w}\t{c}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut list = Wordlist::default();
        for (i, line) in text.lines().enumerate() {
            if let Some(src) = line.strip_prefix("# source:") {
                list.source = src.trim().to_string();
                continue;
            }
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (w, c) = line
                .split_once('\t')
                .ok_or_else(|| FormatError::new(i + 1, "expected word<TAB>count"))?;
            let c: u64 = c
                .trim()
                .parse()
                .map_err(|_| FormatError::new(i + 1, format!("bad count {c:?}")))?;
            if c == 0 {
                return Err(FormatError::new(i + 1, "count must be at least 1"));
            }
            list.counts.insert(w.to_string(), c);
        }
        Ok(list)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_tokens() {
        let wl = build_wordlist(["a", "b", "a"]);
        assert_eq!(wl.count("a"), 2);
        assert_eq!(wl.count("b"), 1);
        assert_eq!(wl.total(), 3);
        assert!(build_wordlist(Vec::<&str>::new()).is_empty());
    }

    #[test]
    fn text_round_trip() {
        let wl = build_wordlist(["ə", "b", "ə"]).with_source("kr");
        assert_eq!(Wordlist::from_text(&wl.to_text()).unwrap(), wl);
    }
}
