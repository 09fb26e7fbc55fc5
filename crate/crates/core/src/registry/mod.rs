//! Language metadata, prioritization scores and rollout dashboards.
//!
//! Records live as one TOML file per language under `languages/` and
//! `status/` in a registry directory, so the dashboard is always rebuilt
//! from version-controlled source files.

mod dashboard;
mod score;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::RegistryError;
use crate::profile::ScriptUse;

pub use dashboard::{dashboard_report, infer_status, Dashboard, DashboardRow, SubtaskSummary};
pub use score::{bucket_for, priority_score, ScoreWeights, BUCKET_THRESHOLDS, DEFAULT_WEIGHTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    #[default]
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factors {
    /// 0–3
    pub online_evidence: u8,
    /// 0–2
    pub formal_publications: u8,
    /// 0–2
    pub smartphone_trend: u8,
    pub i18n_ready: bool,
    pub feature_requests: u32,
    pub usable_alternative_exists: bool,
    pub official_status: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageRecord {
    pub language_tag: String,
    #[serde(default)]
    pub autonym: String,
    #[serde(default)]
    pub exonym: String,
    #[serde(default)]
    pub scripts: Vec<ScriptUse>,
    pub speaker_estimate: u64,
    #[serde(default)]
    pub speaker_confidence: Confidence,
    pub factors: Factors,
}

impl LanguageRecord {
    pub fn validate(&self) -> Result<(), RegistryError> {
        let f = &self.factors;
        for (field, value, max) in [
            ("online_evidence", f.online_evidence, 3),
            ("formal_publications", f.formal_publications, 2),
            ("smartphone_trend", f.smartphone_trend, 2),
        ] {
            if value > max {
                return Err(RegistryError::InvalidFactorRange {
                    language: self.language_tag.clone(),
                    field,
                    value: value.to_string(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subtask {
    InventoryDefined,
    LayoutDesigned,
    CorpusReady,
    ModelTrained,
    Tested,
    Released,
}

impl Subtask {
    pub const ALL: [Subtask; 6] = [
        Subtask::InventoryDefined,
        Subtask::LayoutDesigned,
        Subtask::CorpusReady,
        Subtask::ModelTrained,
        Subtask::Tested,
        Subtask::Released,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Subtask::InventoryDefined => "inventory_defined",
            Subtask::LayoutDesigned => "layout_designed",
            Subtask::CorpusReady => "corpus_ready",
            Subtask::ModelTrained => "model_trained",
            Subtask::Tested => "tested",
            Subtask::Released => "released",
        }
    }
}

impl fmt::Display for Subtask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Subtask {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Subtask::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| RegistryError::UnknownSubtask(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "state")]
pub enum TaskState {
    #[default]
    Todo,
    InProgress {
        owner: String,
        #[serde(default)]
        issue_id: String,
    },
    Done,
}

impl TaskState {
    pub fn label(&self) -> &'static str {
        match self {
            TaskState::Todo => "todo",
            TaskState::InProgress { .. } => "in_progress",
            TaskState::Done => "done",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SubtaskStatus {
    #[serde(flatten)]
    pub state: TaskState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_link: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusRecord {
    pub language_tag: String,
    #[serde(default)]
    pub subtasks: BTreeMap<Subtask, SubtaskStatus>,
}

impl StatusRecord {
    pub fn new(language_tag: impl Into<String>) -> Self {
        Self {
            language_tag: language_tag.into(),
            subtasks: BTreeMap::new(),
        }
    }

    pub fn get(&self, t: Subtask) -> SubtaskStatus {
        self.subtasks.get(&t).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, t: Subtask, state: TaskState) {
        self.subtasks.entry(t).or_default().state = state;
    }

    /// Released requires every other subtask done.
    pub fn validate(&self) -> Result<(), RegistryError> {
        if self.get(Subtask::Released).state == TaskState::Done
            && Subtask::ALL[..5].iter().any(|t| self.get(*t).state != TaskState::Done)
        {
            return Err(RegistryError::PrematureRelease(self.language_tag.clone()));
        }
        Ok(())
    }
}

/// All records and statuses of a registry directory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Registry {
    pub records: Vec<LanguageRecord>,
    pub statuses: Vec<StatusRecord>,
}

impl Registry {
    pub fn load(dir: &Path) -> Result<Self, RegistryError> {
        let records: Vec<LanguageRecord> = read_dir_toml(&dir.join("languages"))?;
        for r in &records {
            r.validate()?;
        }
        let statuses: Vec<StatusRecord> = read_dir_toml(&dir.join("status"))?;
        for s in &statuses {
            s.validate()?;
        }
        Ok(Self { records, statuses })
    }

    pub fn record(&self, tag: &str) -> Option<&LanguageRecord> {
        self.records.iter().find(|r| r.language_tag == tag)
    }

    pub fn dashboard(&self) -> Result<Dashboard, RegistryError> {
        dashboard_report(&self.records, &self.statuses)
    }
}

fn read_dir_toml<T: serde::de::DeserializeOwned>(dir: &Path) -> Result<Vec<T>, RegistryError> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p)?;
            toml::from_str(&text).map_err(|e| RegistryError::Parse {
                path: p.display().to_string(),
                message: e.to_string(),
            })
        })
        .collect()
}
