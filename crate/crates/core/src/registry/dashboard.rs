use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{priority_score, LanguageRecord, StatusRecord, Subtask, TaskState};
use crate::error::RegistryError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DashboardRow {
    pub language_tag: String,
    pub bucket: u8,
    pub score: f64,
    pub state: String,
    pub owner: Option<String>,
    pub issue_id: Option<String>,
    pub doc_link: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubtaskSummary {
    pub subtask: Subtask,
    pub done: usize,
    pub in_progress: usize,
    pub todo: usize,
    /// Languages still needing this subtask, most urgent first.
    pub next_up: Vec<DashboardRow>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dashboard {
    pub subtasks: Vec<SubtaskSummary>,
}

impl Dashboard {
    pub fn only(mut self, subtask: Subtask) -> Self {
        self.subtasks.retain(|s| s.subtask == subtask);
        self
    }
}

/// Builds the per-subtask dashboard. Languages without a status file count
/// as not started.
pub fn dashboard_report(records: &[LanguageRecord], statuses: &[StatusRecord]) -> Result<Dashboard, RegistryError> {
    let mut by_tag: BTreeMap<&str, &StatusRecord> = BTreeMap::new();
    for s in statuses {
        if !records.iter().any(|r| r.language_tag == s.language_tag) {
            return Err(RegistryError::OrphanStatus(s.language_tag.clone()));
        }
        s.validate()?;
        by_tag.insert(&s.language_tag, s);
    }
    if records.is_empty() {
        return Ok(Dashboard::default());
    }
    let mut scored = Vec::with_capacity(records.len());
    for r in records {
        let (score, bucket) = priority_score(r)?;
        scored.push((r, score, bucket));
    }
    scored.sort_by(|a, b| {
        a.2.cmp(&b.2)
            .then(b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.0.language_tag.cmp(&b.0.language_tag))
    });
    let empty = StatusRecord::new("");
    let subtasks = Subtask::ALL
        .into_iter()
        .map(|t| {
            let mut summary = SubtaskSummary {
                subtask: t,
                done: 0,
                in_progress: 0,
                todo: 0,
                next_up: Vec::new(),
            };
            for (r, score, bucket) in &scored {
                let status = by_tag.get(r.language_tag.as_str()).copied().unwrap_or(&empty).get(t);
                let (owner, issue_id) = match &status.state {
                    TaskState::Done => {
                        summary.done += 1;
                        continue;
                    }
                    TaskState::Todo => {
                        summary.todo += 1;
                        (None, None)
                    }
                    TaskState::InProgress { owner, issue_id } => {
                        summary.in_progress += 1;
                        (Some(owner.clone()), (!issue_id.is_empty()).then(|| issue_id.clone()))
                    }
                };
                summary.next_up.push(DashboardRow {
                    language_tag: r.language_tag.clone(),
                    bucket: *bucket,
                    score: *score,
                    state: status.state.label().to_string(),
                    owner,
                    issue_id,
                    doc_link: status
                        .doc_link
                        .clone()
                        .unwrap_or_else(|| format!("docs/process/{t}.md")),
                });
            }
            summary
        })
        .collect();
    Ok(Dashboard { subtasks })
}

/// Marks subtasks done when the matching asset exists in a data
/// directory: a profile, a layout, a corpus and a model for `tag`.
/// Explicit in-progress or done states are kept.
pub fn infer_status(status: &StatusRecord, data_dir: &Path) -> StatusRecord {
    let mut out = status.clone();
    let tag = &status.language_tag;
    let assets = [
        (Subtask::InventoryDefined, data_dir.join("profiles").join(format!("{tag}.toml"))),
        (Subtask::LayoutDesigned, data_dir.join("layouts").join(format!("{tag}.toml"))),
        (Subtask::CorpusReady, data_dir.join("corpora").join(format!("{tag}.txt"))),
        (Subtask::ModelTrained, data_dir.join("models").join(format!("{tag}.arpa"))),
    ];
    for (t, path) in assets {
        if out.get(t).state == TaskState::Todo && path.exists() {
            out.set(t, TaskState::Done);
        }
    }
    out
}

impl fmt::Display for Dashboard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.subtasks.is_empty() {
            return writeln!(f, "(no languages registered)");
        }
        for s in &self.subtasks {
            writeln!(
                f,
                "## {}  done {} · in progress {} · todo {}",
                s.subtask, s.done, s.in_progress, s.todo
            )?;
            if s.next_up.is_empty() {
                continue;
            }
            writeln!(f, "| language | bucket | score | state | owner | issue | doc |")?;
            writeln!(f, "|---|---|---|---|---|---|---|")?;
            for r in &s.next_up {
                writeln!(
                    f,
                    "| {} | {} | {:.2} | {} | {} | {} | {} |",
                    r.language_tag,
                    r.bucket,
                    r.score,
                    r.state,
                    r.owner.as_deref().unwrap_or("-"),
                    r.issue_id.as_deref().unwrap_or("-"),
                    r.doc_link
                )?;
            }
        }
        Ok(())
    }
}
