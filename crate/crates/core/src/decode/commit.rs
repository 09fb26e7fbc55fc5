use serde::{Deserialize, Serialize};

use super::{Suggestion, SuggestionKind};
use crate::personal::PersonalDict;
use crate::profile::LanguageProfile;

/// Base correction margin in log10 units.
pub const TAU_0: f64 = 0.5;
/// How strongly leniency scales the margin.
pub const LENIENCY_SCALE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commit {
    pub text: String,
    pub literal: String,
    /// The correction that replaced the literal, if any.
    pub correction: Option<String>,
}

/// `τ = τ₀·(1 + λ·leniency)`.
pub fn correction_threshold(leniency: f64) -> f64 {
    TAU_0 * (1.0 + LENIENCY_SCALE * leniency)
}

/// Picks what a word commits as: the best correction when it beats the
/// literal by more than the profile's margin and the user has not reverted
/// that exact correction before, otherwise the literal.
pub fn commit_policy(suggestions: &[Suggestion], profile: &LanguageProfile, personal: Option<&PersonalDict>) -> Commit {
    let literal = suggestions
        .iter()
        .find(|s| s.kind == SuggestionKind::Literal);
    let Some(literal) = literal else {
        return Commit {
            text: suggestions.first().map(|s| s.surface.clone()).unwrap_or_default(),
            literal: String::new(),
            correction: None,
        };
    };
    let keep = Commit {
        text: literal.surface.clone(),
        literal: literal.surface.clone(),
        correction: None,
    };
    let best = suggestions
        .iter()
        .filter(|s| matches!(s.kind, SuggestionKind::Correction | SuggestionKind::Personal))
        .filter(|s| s.surface != literal.surface)
        .max_by(|a, b| {
            a.score
                .partial_cmp(&b.score)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| b.surface.cmp(&a.surface))
        });
    let Some(best) = best else {
        return keep;
    };
    if personal.is_some_and(|p| p.is_blocked(&literal.surface, &best.surface)) {
        return keep;
    }
    if best.score - literal.score > correction_threshold(profile.leniency) {
        Commit {
            text: best.surface.clone(),
            literal: literal.surface.clone(),
            correction: Some(best.surface.clone()),
        }
    } else {
        keep
    }
}
