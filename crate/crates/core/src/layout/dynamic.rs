//! Dynamic key rules: context-triggered overrides of key output and face.
//!
//! Each rule matches a suffix of the committed text. Among rules targeting
//! the same key, the longest matched suffix wins and list order breaks
//! ties. Rules only ever see committed text, so a rule's output cannot feed
//! another rule within the same evaluation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ContextElement, Key, Layout, CONTEXT_PLACEHOLDER};

/// What a key shows and types in a given context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyView {
    pub page: usize,
    pub key_id: String,
    /// `None` for inert keys (blank, or page switches).
    pub output: Option<String>,
    pub face: String,
    /// Index of the dynamic rule currently applied, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<usize>,
}

impl KeyView {
    /// Blank keys with no active rule can't be hit.
    pub fn is_active(&self) -> bool {
        !self.face.is_empty()
    }
}

/// Per-key state for every key of every page, aligned with `Layout::pages`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyStates {
    pub pages: Vec<Vec<KeyView>>,
}

impl KeyStates {
    pub fn get(&self, page: usize, key_id: &str) -> Option<&KeyView> {
        self.pages.get(page)?.iter().find(|k| k.key_id == key_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &KeyView> {
        self.pages.iter().flatten()
    }

    /// Keys whose output or face differ from `previous`.
    pub fn delta(&self, previous: &KeyStates) -> Vec<KeyView> {
        self.iter()
            .zip(previous.iter())
            .filter(|(now, before)| now != before)
            .map(|(now, _)| now.clone())
            .collect()
    }
}

impl Layout {
    /// Output and face of every key after `committed_text`, honouring shift.
    pub fn key_state(&self, committed_text: &str, shift: bool) -> KeyStates {
        let active = self.active_rules(committed_text);
        let pages = self
            .pages
            .iter()
            .enumerate()
            .map(|(p, page)| {
                page.keys
                    .iter()
                    .map(|key| match active.get(key.key_id.as_str()) {
                        Some(&(index, matched)) => {
                            let rule = &self.dynamic_rules[index];
                            KeyView {
                                page: p,
                                key_id: key.key_id.clone(),
                                output: Some(rule.new_output.clone()),
                                face: rule.new_face.replace(CONTEXT_PLACEHOLDER, matched),
                                rule: Some(index),
                            }
                        }
                        None => static_view(p, key, shift),
                    })
                    .collect()
            })
            .collect();
        KeyStates { pages }
    }

    /// Winning rule per target key, with the matched context text.
    fn active_rules<'t>(&self, text: &'t str) -> HashMap<&str, (usize, &'t str)> {
        let mut best: HashMap<&str, (usize, usize)> = HashMap::new();
        for (index, rule) in self.dynamic_rules.iter().enumerate() {
            let Some(len) = self.match_suffix(&rule.context_pattern, text) else {
                continue;
            };
            let slot = best.entry(rule.target_key_id.as_str()).or_insert((index, len));
            if len > slot.1 {
                *slot = (index, len);
            }
        }
        best.into_iter()
            .map(|(k, (index, len))| (k, (index, &text[text.len() - len..])))
            .collect()
    }

    /// Length in bytes of the longest suffix of `text` matching `pattern`.
    pub fn match_suffix(&self, pattern: &[ContextElement], text: &str) -> Option<usize> {
        self.match_from(pattern, text, text.len())
            .map(|start| text.len() - start)
    }

    // Returns the smallest start offset at which pattern[..] matches text[..end].
    fn match_from(&self, pattern: &[ContextElement], text: &str, end: usize) -> Option<usize> {
        let Some((last, rest)) = pattern.split_last() else {
            return Some(end);
        };
        let head = &text[..end];
        match last {
            ContextElement::Literal(lit) => {
                if head.ends_with(lit.as_str()) {
                    self.match_from(rest, text, end - lit.len())
                } else {
                    None
                }
            }
            ContextElement::Class(name) => {
                let members = self.classes.get(name)?;
                members
                    .iter()
                    .filter(|m| !m.is_empty() && head.ends_with(m.as_str()))
                    .filter_map(|m| self.match_from(rest, text, end - m.len()))
                    .min()
            }
        }
    }
}

fn static_view(page: usize, key: &Key, shift: bool) -> KeyView {
    if key.is_blank() || key.switch_to_page.is_some() || key.base_output.is_empty() {
        return KeyView {
            page,
            key_id: key.key_id.clone(),
            output: None,
            face: key.face.clone(),
            rule: None,
        };
    }
    let (output, face) = match (&key.shift_output, shift) {
        (Some(s), true) => (s.clone(), s.clone()),
        _ => (key.base_output.clone(), key.face.clone()),
    };
    KeyView {
        page,
        key_id: key.key_id.clone(),
        output: Some(output),
        face,
        rule: None,
    }
}
