//! Tap decoding, autocorrect, prediction and spell-checking.
//!
//! A word is decoded by aligning its taps against a lexicon trie. Each tap
//! emits key outputs with a log-Gaussian spatial score; alignments may use
//! a limited number of edits (substitution, insertion, deletion, adjacent
//! transposition) at a fixed log10 penalty each. A candidate's score is
//! `α·spatial + log10 P_lm(word | context)`.

mod commit;
mod lexicon;
mod predict;
mod search;
mod spatial;
mod spell;

use serde::{Deserialize, Serialize};

pub use commit::{commit_policy, correction_threshold, Commit};
pub use lexicon::Lexicon;
pub use predict::{expand_shorthand, next_words};
pub use search::{beam_search, edit_budget, Alignment};
pub use spatial::{Emission, SpatialModel};
pub use spell::{damerau_levenshtein, spell_check, SpellChecker, SpellResult, MAX_SPELL_DISTANCE, MAX_SPELL_SUGGESTIONS};

use crate::error::DecodeError;
use crate::lm::LanguageModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "index")]
pub enum TapKind {
    Tap,
    LongPressSelect(usize),
    Backspace,
    Space,
    Commit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TapEvent {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub timestamp: u64,
    pub kind: TapKind,
    /// Layout page the tap landed on.
    #[serde(default)]
    pub page: usize,
}

impl TapEvent {
    pub fn tap(x: f64, y: f64) -> Self {
        Self {
            x,
            y,
            timestamp: 0,
            kind: TapKind::Tap,
            page: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuggestionKind {
    Literal,
    Correction,
    Prediction,
    Personal,
    Reduplication,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub surface: String,
    /// log10 probability-like score; higher is better.
    pub score: f64,
    pub kind: SuggestionKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeConfig {
    /// Weight of the spatial score against the language model.
    pub alpha: f64,
    /// Touch noise as a multiple of the narrowest key width.
    pub sigma_factor: f64,
    /// log10 cost of one edit.
    pub edit_penalty: f64,
    /// log10 cost of reaching a long-press character through its host key.
    pub long_press_penalty: f64,
    /// Trie nodes kept per depth.
    pub beam_width: usize,
    /// Taps per allowed edit.
    pub taps_per_edit: usize,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            sigma_factor: 0.4,
            edit_penalty: -2.0,
            long_press_penalty: -1.5,
            beam_width: 512,
            taps_per_edit: 4,
        }
    }
}

/// Decodes one word.
///
/// `literal` overrides the nearest-key reading of the taps, for callers
/// that track dynamic key state themselves. `personal_words` are searched
/// in addition to `lexicon` and reported with kind `personal` when the
/// base lexicon lacks them.
#[allow(clippy::too_many_arguments)]
pub fn decode_word(
    taps: &[TapEvent],
    literal: Option<&str>,
    context: &[String],
    model: &dyn LanguageModel,
    spatial: &SpatialModel,
    lexicons: &[&Lexicon],
    config: &DecodeConfig,
    k: usize,
) -> Result<Vec<Suggestion>, DecodeError> {
    let taps: Vec<&TapEvent> = taps
        .iter()
        .filter(|t| matches!(t.kind, TapKind::Tap | TapKind::LongPressSelect(_)))
        .collect();
    if taps.is_empty() {
        return Err(DecodeError::EmptyTapSequence);
    }
    let emissions = taps
        .iter()
        .map(|t| spatial.emission(t))
        .collect::<Result<Vec<_>, _>>()?;
    let direct_literal: String = emissions.iter().map(|e| e.nearest.as_str()).collect();
    let literal = literal.unwrap_or(&direct_literal).to_string();
    let direct_spatial: f64 = if literal == direct_literal {
        emissions.iter().map(|e| e.nearest_score).sum()
    } else {
        f64::NEG_INFINITY
    };

    let mut best: std::collections::HashMap<String, (f64, SuggestionKind)> = std::collections::HashMap::new();
    for (li, lexicon) in lexicons.iter().enumerate() {
        for a in beam_search(lexicon, &emissions, config) {
            let kind = if li == 0 || lexicons[0].contains(&a.word) {
                SuggestionKind::Correction
            } else {
                SuggestionKind::Personal
            };
            let entry = best.entry(a.word).or_insert((f64::NEG_INFINITY, kind));
            if a.spatial > entry.0 {
                entry.0 = a.spatial;
            }
        }
    }
    let lit_spatial = best
        .remove(&literal)
        .map_or(direct_spatial, |(s, _)| s.max(direct_spatial));

    let score = |word: &str, spatial: f64| config.alpha * spatial + model.log10_prob(word, context);
    let mut out: Vec<Suggestion> = best
        .into_iter()
        .map(|(word, (spatial, kind))| Suggestion {
            score: score(&word, spatial),
            surface: word,
            kind,
        })
        .filter(|s| s.score.is_finite())
        .collect();
    let mut lit_score = score(&literal, lit_spatial);
    if !lit_score.is_finite() {
        lit_score = f64::MIN;
    }
    out.push(Suggestion {
        surface: literal.clone(),
        score: lit_score,
        kind: SuggestionKind::Literal,
    });
    sort_suggestions(&mut out);
    truncate_keeping_literal(&mut out, k);
    Ok(out)
}

/// Score descending, then surface ascending.
pub fn sort_suggestions(s: &mut [Suggestion]) {
    s.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.surface.cmp(&b.surface))
    });
}

fn truncate_keeping_literal(out: &mut Vec<Suggestion>, k: usize) {
    let k = k.max(1);
    if out.len() <= k {
        return;
    }
    let lit = out.iter().position(|s| s.kind == SuggestionKind::Literal);
    match lit {
        Some(i) if i >= k => {
            let literal = out.remove(i);
            out.truncate(k - 1);
            out.push(literal);
        }
        _ => out.truncate(k),
    }
}
