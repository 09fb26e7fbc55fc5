//! Local session service: an [`Engine`] of immutable per-language assets,
//! per-client [`Session`]s, and a line-oriented JSON protocol over stdio or
//! TCP.

mod protocol;
mod server;
mod session;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub use protocol::{Request, Response, PROTOCOL_VERSION};
pub use server::{serve_lines, serve_tcp, Service};
pub use session::{EventResponse, Session, SessionEvent, TextDelta, STRIP_SIZE};

use crate::decode::{DecodeConfig, Lexicon, SpatialModel};
use crate::error::ServiceError;
use crate::layout::Layout;
use crate::profile::LanguageProfile;
use crate::text::NGramModel;

/// Everything needed to type one language. Shared read-only by sessions.
pub struct LanguagePack {
    pub profile: LanguageProfile,
    pub layout: Arc<Layout>,
    pub model: Arc<NGramModel>,
    pub lexicon: Arc<Lexicon>,
    pub spatial: Arc<SpatialModel>,
}

impl LanguagePack {
    pub fn new(profile: LanguageProfile, layout: Layout, model: NGramModel, config: &DecodeConfig) -> Result<Self, ServiceError> {
        let spatial = SpatialModel::new(&layout, config)?;
        let model = model.with_meta(profile.language_tag.clone(), profile.primary_script().to_string());
        let lexicon = Lexicon::from_words(model.words());
        Ok(Self {
            profile,
            layout: Arc::new(layout),
            model: Arc::new(model),
            lexicon: Arc::new(lexicon),
            spatial: Arc::new(spatial),
        })
    }
}

pub struct Engine {
    packs: BTreeMap<String, Arc<LanguagePack>>,
    pub config: DecodeConfig,
    /// Where personal dictionaries are kept, one file per user.
    pub personal_dir: Option<PathBuf>,
}

impl Engine {
    pub fn new(config: DecodeConfig) -> Self {
        Self {
            packs: BTreeMap::new(),
            config,
            personal_dir: None,
        }
    }

    pub fn add(&mut self, pack: LanguagePack) {
        self.packs.insert(pack.profile.language_tag.clone(), Arc::new(pack));
    }

    /// Loads `profiles/<tag>.toml`, `layouts/<tag>.toml` and
    /// `models/<tag>.arpa` for each requested tag, or for every profile
    /// when `only` is `None`.
    pub fn load(data_dir: &Path, only: Option<&[String]>, config: DecodeConfig) -> Result<Self, ServiceError> {
        let tags: Vec<String> = match only {
            Some(tags) => tags.to_vec(),
            None => {
                let dir = data_dir.join("profiles");
                let mut tags: Vec<String> = std::fs::read_dir(&dir)
                    .map_err(|e| ServiceError::Asset {
                        path: dir.display().to_string(),
                        message: e.to_string(),
                    })?
                    .filter_map(|e| e.ok()?.path().file_name()?.to_str()?.strip_suffix(".toml").map(String::from))
                    .collect();
                tags.sort();
                tags
            }
        };
        let mut engine = Self::new(config);
        for tag in tags {
            let read = |kind: &'static str, rel: String| {
                let path = data_dir.join(rel);
                std::fs::read_to_string(&path).map_err(|_| ServiceError::MissingAsset {
                    language: tag.clone(),
                    kind,
                    path: path.display().to_string(),
                })
            };
            let invalid = |rel: String, e: &dyn std::fmt::Display| ServiceError::Asset {
                path: data_dir.join(rel).display().to_string(),
                message: e.to_string(),
            };
            let profile_rel = format!("profiles/{tag}.toml");
            let layout_rel = format!("layouts/{tag}.toml");
            let model_rel = format!("models/{tag}.arpa");
            let profile = LanguageProfile::from_toml(&read("profile", profile_rel.clone())?)
                .map_err(|e| invalid(profile_rel, &e))?;
            let layout = Layout::load(read("layout", layout_rel.clone())?.as_bytes())
                .map_err(|e| invalid(layout_rel, &e))?;
            let model = NGramModel::from_arpa(&read("model", model_rel.clone())?)
                .map_err(|e| invalid(model_rel, &e))?;
            engine.add(LanguagePack::new(profile, layout, model, &engine.config)?);
        }
        Ok(engine)
    }

    pub fn languages(&self) -> Vec<String> {
        self.packs.keys().cloned().collect()
    }

    pub fn pack(&self, tag: &str) -> Result<Arc<LanguagePack>, ServiceError> {
        self.packs
            .get(tag)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownLanguage(tag.to_string()))
    }
}

#[cfg(test)]
mod tests;
