//! Per-language configuration: scripts, inventory, casing and autocorrect
//! leniency.

use serde::{Deserialize, Serialize};

use crate::error::ProfileError;
use crate::inventory::{CharacterInventory, GraphemeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptUsage {
    Everyday,
    Heritage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptUse {
    /// ISO 15924 code, e.g. `Latn`.
    pub code: String,
    pub usage: ScriptUsage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Casing {
    #[default]
    Cased,
    Uncased,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageProfile {
    pub language_tag: String,
    #[serde(default)]
    pub name: String,
    pub scripts: Vec<ScriptUse>,
    pub inventory: CharacterInventory,
    #[serde(default)]
    pub casing: Casing,
    #[serde(default)]
    pub leniency: f64,
    #[serde(default)]
    pub reduplication_enabled: bool,
}

impl LanguageProfile {
    pub fn new(
        language_tag: impl Into<String>,
        script: impl Into<String>,
        inventory: CharacterInventory,
    ) -> Self {
        Self {
            language_tag: language_tag.into(),
            name: String::new(),
            scripts: vec![ScriptUse {
                code: script.into(),
                usage: ScriptUsage::Everyday,
            }],
            inventory,
            casing: Casing::Cased,
            leniency: 0.0,
            reduplication_enabled: false,
        }
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        if !self.scripts.iter().any(|s| s.usage == ScriptUsage::Everyday) {
            return Err(ProfileError::NoEverydayScript(self.language_tag.clone()));
        }
        if !(0.0..=1.0).contains(&self.leniency) {
            return Err(ProfileError::Leniency(self.leniency));
        }
        self.inventory.validate()?;
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self, ProfileError> {
        let profile: Self = toml::from_str(text).map_err(|e| ProfileError::Parse(e.to_string()))?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("profile serializes")
    }

    /// The first everyday script; languages are typed in this script.
    pub fn primary_script(&self) -> &str {
        self.scripts
            .iter()
            .find(|s| s.usage == ScriptUsage::Everyday)
            .map(|s| s.code.as_str())
            .unwrap_or("Zyyy")
    }

    /// Case folding applied to tokens before lookup and counting.
    pub fn fold(&self, word: &str) -> String {
        match self.casing {
            Casing::Cased => word.to_lowercase(),
            Casing::Uncased => word.to_string(),
        }
    }

    pub fn grapheme_set(&self) -> GraphemeSet {
        self.inventory.grapheme_set()
    }

    /// The first character of `word` (after folding) outside the inventory.
    pub fn foreign_char(&self, word: &str) -> Option<char> {
        self.grapheme_set().first_foreign_char(&self.fold(word))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LanguageProfile {
        let inv = CharacterInventory::new("id", ["a", "k", "m", "n"], Vec::<String>::new()).unwrap();
        LanguageProfile::new("id", "Latn", inv)
    }

    #[test]
    fn requires_an_everyday_script() {
        let mut p = sample();
        p.scripts[0].usage = ScriptUsage::Heritage;
        assert!(matches!(p.validate(), Err(ProfileError::NoEverydayScript(_))));
    }

    #[test]
    fn leniency_range_is_checked() {
        let mut p = sample();
        p.leniency = 1.5;
        assert_eq!(p.validate(), Err(ProfileError::Leniency(1.5)));
    }

    #[test]
    fn toml_round_trip() {
        let mut p = sample();
        p.reduplication_enabled = true;
        p.leniency = 0.25;
        let back = LanguageProfile::from_toml(&p.to_toml()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn folding_respects_casing() {
        let mut p = sample();
        assert_eq!(p.fold("MaKan"), "makan");
        p.casing = Casing::Uncased;
        assert_eq!(p.fold("MaKan"), "MaKan");
    }
}
