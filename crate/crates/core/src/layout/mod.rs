//! Keyboard layouts: data model, file format and validation.
//!
//! A layout file is TOML with a top-level `format = 1`. Keys live on pages
//! and are laid out row by row; each row is centred horizontally and rows
//! have a fixed height expressed as a fraction of the keyboard width.
//!
//! ```toml
//! format = 1
//! layout_id = "de-CH-qwertz"
//! language_tag = "de-CH"
//! script = "Latn"
//! base_grid = "qwertz"
//! version = 1
//!
//! [[pages]]
//! [[pages.keys]]
//! key_id = "q"
//! row = 0
//! col = 0
//! width = 0.0909
//! base_output = "q"
//! shift_output = "Q"
//! face = "q"
//! ```

mod coverage;
mod dynamic;
mod geometry;
mod render;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use unicode_normalization::is_nfc;

use crate::error::LayoutError;
use crate::inventory::{GraphemeSet, Segment};

pub use coverage::{coverage_report, CoverageReport, ReachPath};
pub use dynamic::{KeyStates, KeyView};
pub use geometry::{KeyGeometry, PageGeometry};
pub use render::render_layout;

pub const FORMAT_VERSION: u32 = 1;

/// Placeholder in a rule's `new_face` replaced by the matched context.
pub const CONTEXT_PLACEHOLDER: &str = "{context}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseGrid {
    Qwerty,
    Azerty,
    Qwertz,
    ScriptNative,
}

impl BaseGrid {
    /// Letter rows of the Latin base grids.
    pub fn rows(self) -> Option<[&'static str; 3]> {
        match self {
            BaseGrid::Qwerty => Some(["qwertyuiop", "asdfghjkl", "zxcvbnm"]),
            BaseGrid::Azerty => Some(["azertyuiop", "qsdfghjklm", "wxcvbn"]),
            BaseGrid::Qwertz => Some(["qwertzuiop", "asdfghjkl", "yxcvbnm"]),
            BaseGrid::ScriptNative => None,
        }
    }
}

impl std::str::FromStr for BaseGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qwerty" => Ok(BaseGrid::Qwerty),
            "azerty" => Ok(BaseGrid::Azerty),
            "qwertz" => Ok(BaseGrid::Qwertz),
            "script_native" => Ok(BaseGrid::ScriptNative),
            other => Err(format!("unknown base grid {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Key {
    pub key_id: String,
    pub row: u32,
    pub col: u32,
    pub width: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub base_output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_output: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub long_press: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shift_long_press: Vec<String>,
    #[serde(default)]
    pub face: String,
    /// Marks a page-switch key; it produces no text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_to_page: Option<usize>,
}

impl Key {
    pub fn letter(key_id: &str, row: u32, col: u32, width: f64, output: &str) -> Self {
        let upper = output.to_uppercase();
        Self {
            key_id: key_id.to_string(),
            row,
            col,
            width,
            base_output: output.to_string(),
            shift_output: (upper != output).then_some(upper),
            long_press: Vec::new(),
            shift_long_press: Vec::new(),
            face: output.to_string(),
            switch_to_page: None,
        }
    }

    /// Blank keys have no face; they stay inert until a dynamic rule
    /// activates them.
    pub fn is_blank(&self) -> bool {
        self.face.is_empty()
    }

    /// Every output this key can produce without dynamic rules.
    pub fn static_outputs(&self) -> impl Iterator<Item = &String> {
        let base = (!self.is_blank() && !self.base_output.is_empty()).then_some(&self.base_output);
        base.into_iter()
            .chain(self.shift_output.iter())
            .chain(self.long_press.iter())
            .chain(self.shift_long_press.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Page {
    #[serde(default)]
    pub keys: Vec<Key>,
}

impl Page {
    pub fn key(&self, key_id: &str) -> Option<&Key> {
        self.keys.iter().find(|k| k.key_id == key_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ContextElement {
    Literal(String),
    Class(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicRule {
    /// Matched as a suffix of the committed text, last element rightmost.
    pub context_pattern: Vec<ContextElement>,
    pub target_key_id: String,
    pub new_output: String,
    pub new_face: String,
}

fn default_row_height() -> f64 {
    0.14
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layout {
    pub format: u32,
    pub layout_id: String,
    pub language_tag: String,
    pub script: String,
    pub base_grid: BaseGrid,
    pub version: u32,
    /// Row height as a fraction of the keyboard width.
    #[serde(default = "default_row_height")]
    pub row_height: f64,
    /// Named grapheme classes referenced by dynamic rule contexts.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub classes: BTreeMap<String, Vec<String>>,
    pub pages: Vec<Page>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dynamic_rules: Vec<DynamicRule>,
}

impl Layout {
    pub fn new(
        layout_id: impl Into<String>,
        language_tag: impl Into<String>,
        script: impl Into<String>,
        base_grid: BaseGrid,
    ) -> Self {
        Self {
            format: FORMAT_VERSION,
            layout_id: layout_id.into(),
            language_tag: language_tag.into(),
            script: script.into(),
            base_grid,
            version: 1,
            row_height: default_row_height(),
            classes: BTreeMap::new(),
            pages: vec![Page::default()],
            dynamic_rules: Vec::new(),
        }
    }

    /// Parses and validates a layout file.
    pub fn load(serialized: &[u8]) -> Result<Self, LayoutError> {
        let text = std::str::from_utf8(serialized)
            .map_err(|e| LayoutError::Schema(format!("not UTF-8: {e}")))?;
        let layout: Layout = toml::from_str(text).map_err(|e| LayoutError::Schema(e.to_string()))?;
        layout.validate()?;
        Ok(layout)
    }

    pub fn serialize(&self) -> String {
        toml::to_string_pretty(self).expect("layout serializes")
    }

    pub fn validate(&self) -> Result<(), LayoutError> {
        if self.format != FORMAT_VERSION {
            return Err(LayoutError::Schema(format!(
                "unsupported format version {}",
                self.format
            )));
        }
        if self.pages.is_empty() {
            return Err(LayoutError::Schema("layout has no pages".into()));
        }
        if !(self.row_height > 0.0 && self.row_height.is_finite()) {
            return Err(LayoutError::Geometry {
                element: "layout".into(),
                reason: format!("row_height {} must be positive", self.row_height),
            });
        }
        let mut all_ids = HashSet::new();
        for (p, page) in self.pages.iter().enumerate() {
            let mut ids = HashSet::new();
            for key in &page.keys {
                if !ids.insert(key.key_id.as_str()) {
                    return Err(LayoutError::DuplicateKeyId {
                        page: p,
                        key_id: key.key_id.clone(),
                    });
                }
                all_ids.insert(key.key_id.as_str());
                self.validate_key(key)?;
            }
            PageGeometry::new(page, self.row_height)?;
        }
        for (name, members) in &self.classes {
            for m in members {
                check_output(&format!("class {name}"), m)?;
            }
        }
        let closure = self.static_inventory();
        for (i, rule) in self.dynamic_rules.iter().enumerate() {
            if !all_ids.contains(rule.target_key_id.as_str()) {
                return Err(LayoutError::DanglingRuleTarget(rule.target_key_id.clone()));
            }
            check_output(&format!("dynamic rule {i}"), &rule.new_output)?;
            for el in &rule.context_pattern {
                match el {
                    ContextElement::Class(c) if !self.classes.contains_key(c) => {
                        return Err(LayoutError::UnknownClass {
                            index: i,
                            class: c.clone(),
                        })
                    }
                    ContextElement::Literal(l) if l.is_empty() || !is_nfc(l) => {
                        return Err(LayoutError::NonNfcOutput {
                            element: format!("dynamic rule {i} context"),
                            text: l.clone(),
                        })
                    }
                    _ => {}
                }
            }
            let outside = closure
                .segment(&rule.new_output)
                .iter()
                .any(|s| matches!(s, Segment::Unknown(_)));
            if outside {
                return Err(LayoutError::RuleOutsideInventory {
                    index: i,
                    output: rule.new_output.clone(),
                });
            }
        }
        Ok(())
    }

    fn validate_key(&self, key: &Key) -> Result<(), LayoutError> {
        let element = format!("key {}", key.key_id);
        if !(key.width > 0.0 && key.width <= 1.0) {
            return Err(LayoutError::Geometry {
                element,
                reason: format!("width {} outside (0, 1]", key.width),
            });
        }
        if let Some(target) = key.switch_to_page {
            if target >= self.pages.len() {
                return Err(LayoutError::UnknownPage(target));
            }
        } else if !key.is_blank() && key.base_output.is_empty() {
            return Err(LayoutError::NonNfcOutput {
                element,
                text: String::new(),
            });
        }
        if !key.base_output.is_empty() {
            check_output(&element, &key.base_output)?;
        }
        if let Some(s) = &key.shift_output {
            check_output(&element, s)?;
        }
        for set in [&key.long_press, &key.shift_long_press] {
            let mut seen = HashSet::new();
            for lp in set {
                check_output(&element, lp)?;
                if !seen.insert(lp) {
                    return Err(LayoutError::Schema(format!(
                        "{element}: duplicate long-press entry {lp:?}"
                    )));
                }
            }
        }
        if !is_nfc(&key.face) {
            return Err(LayoutError::NonNfcOutput {
                element,
                text: key.face.clone(),
            });
        }
        Ok(())
    }

    /// Graphemes the layout declares: every static key output and every
    /// class member. Dynamic rule outputs must be built from these.
    pub fn static_inventory(&self) -> GraphemeSet {
        let mut set = GraphemeSet::default();
        for page in &self.pages {
            for key in &page.keys {
                for out in key.static_outputs() {
                    set.insert(out.clone());
                }
            }
        }
        for members in self.classes.values() {
            for m in members {
                set.insert(m.clone());
            }
        }
        set
    }

    /// Everything any key can produce, including dynamic rule outputs.
    pub fn typeable_units(&self) -> BTreeSet<String> {
        let mut units: BTreeSet<String> = self
            .pages
            .iter()
            .flat_map(|p| p.keys.iter())
            .flat_map(|k| k.static_outputs().cloned())
            .collect();
        units.extend(self.dynamic_rules.iter().map(|r| r.new_output.clone()));
        units
    }

    pub fn page(&self, index: usize) -> Result<&Page, LayoutError> {
        self.pages.get(index).ok_or(LayoutError::UnknownPage(index))
    }

    pub fn geometry(&self, page: usize) -> Result<PageGeometry, LayoutError> {
        PageGeometry::new(self.page(page)?, self.row_height)
    }

    pub fn key_count(&self) -> usize {
        self.pages.iter().map(|p| p.keys.len()).sum()
    }
}

fn check_output(element: &str, text: &str) -> Result<(), LayoutError> {
    if text.is_empty() || !is_nfc(text) {
        return Err(LayoutError::NonNfcOutput {
            element: element.to_string(),
            text: text.to_string(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests;
