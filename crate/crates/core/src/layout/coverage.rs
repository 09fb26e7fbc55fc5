use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::Layout;
use crate::inventory::CharacterInventory;

/// How a grapheme can be typed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReachPath {
    Base,
    Shift,
    LongPress,
    Dynamic,
    /// A key on a secondary page reachable through page-switch keys.
    Page(usize),
}

impl std::fmt::Display for ReachPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReachPath::Base => f.write_str("base"),
            ReachPath::Shift => f.write_str("shift"),
            ReachPath::LongPress => f.write_str("long_press"),
            ReachPath::Dynamic => f.write_str("dynamic"),
            ReachPath::Page(n) => write!(f, "page_{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub layout_id: String,
    pub language_tag: String,
    pub reachable: BTreeMap<String, ReachPath>,
    pub missing: BTreeSet<String>,
    pub complete: bool,
}

impl std::fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "coverage of {} by {}: {}",
            self.language_tag,
            self.layout_id,
            if self.complete { "complete" } else { "INCOMPLETE" }
        )?;
        for (g, path) in &self.reachable {
            writeln!(f, "  {g}\t{path}")?;
        }
        for g in &self.missing {
            writeln!(f, "  {g}\tMISSING (U+{:04X})", g.chars().next().map_or(0, u32::from))?;
        }
        Ok(())
    }
}

/// Checks that every required grapheme of `inventory` can be typed.
pub fn coverage_report(layout: &Layout, inventory: &CharacterInventory) -> CoverageReport {
    let paths = reach_paths(layout);
    let mut reachable = BTreeMap::new();
    let mut missing = BTreeSet::new();
    for g in &inventory.required {
        match paths.get(g.as_str()) {
            Some(p) => {
                reachable.insert(g.clone(), *p);
            }
            None => match spelled_path(&paths, g) {
                Some(p) => {
                    reachable.insert(g.clone(), p);
                }
                None => {
                    missing.insert(g.clone());
                }
            },
        }
    }
    CoverageReport {
        layout_id: layout.layout_id.clone(),
        language_tag: inventory.language_tag.clone(),
        complete: missing.is_empty(),
        reachable,
        missing,
    }
}

/// For a multi-character grapheme typed as a sequence of outputs (a
/// digraph such as `ny`), the least convenient path among its pieces.
fn spelled_path(paths: &BTreeMap<String, ReachPath>, grapheme: &str) -> Option<ReachPath> {
    let bounds: Vec<usize> = grapheme
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(grapheme.len()))
        .collect();
    if bounds.len() <= 2 {
        return None;
    }
    // best[j]: cheapest worst-piece path spelling the first j characters
    let mut best: Vec<Option<ReachPath>> = vec![None; bounds.len()];
    best[0] = Some(ReachPath::Base);
    for j in 1..bounds.len() {
        for i in 0..j {
            if i == 0 && j == bounds.len() - 1 {
                continue;
            }
            let (Some(prefix), Some(piece)) = (best[i], paths.get(&grapheme[bounds[i]..bounds[j]])) else {
                continue;
            };
            let worst = prefix.max(*piece);
            if best[j].is_none_or(|b| worst < b) {
                best[j] = Some(worst);
            }
        }
    }
    best[bounds.len() - 1]
}

/// The cheapest path to every typeable output.
fn reach_paths(layout: &Layout) -> BTreeMap<String, ReachPath> {
    let mut out: BTreeMap<String, ReachPath> = BTreeMap::new();
    let mut add = |g: &str, path: ReachPath| {
        let slot = out.entry(g.to_string()).or_insert(path);
        if path < *slot {
            *slot = path;
        }
    };
    let pages = reachable_pages(layout);
    for (p, page) in layout.pages.iter().enumerate() {
        if !pages.contains(&p) {
            continue;
        }
        let on_page = |path| if p == 0 { path } else { ReachPath::Page(p) };
        for key in &page.keys {
            if !key.is_blank() && !key.base_output.is_empty() {
                add(&key.base_output, on_page(ReachPath::Base));
            }
            if let Some(s) = &key.shift_output {
                add(s, on_page(ReachPath::Shift));
            }
            for lp in key.long_press.iter().chain(&key.shift_long_press) {
                add(lp, on_page(ReachPath::LongPress));
            }
        }
    }
    for rule in &layout.dynamic_rules {
        add(&rule.new_output, ReachPath::Dynamic);
    }
    out
}

/// Pages reachable from page 0 through page-switch keys.
fn reachable_pages(layout: &Layout) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([0]);
    let mut queue = VecDeque::from([0]);
    while let Some(p) = queue.pop_front() {
        for key in &layout.pages[p].keys {
            if let Some(t) = key.switch_to_page {
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
    }
    seen
}
