use super::{sort_suggestions, Suggestion, SuggestionKind};
use crate::lm::LanguageModel;
use crate::profile::LanguageProfile;

/// Likeliest next words. With reduplication enabled, `w-w` for the last
/// context word `w` always gets a slot: it is scored by the model when the
/// model knows the form, otherwise by the probability that `w` repeats,
/// and replaces the weakest prediction when it would not rank on its own.
pub fn next_words(context: &[String], model: &dyn LanguageModel, profile: &LanguageProfile, k: usize) -> Vec<Suggestion> {
    if k == 0 {
        return Vec::new();
    }
    let doubled = context
        .last()
        .filter(|w| profile.reduplication_enabled && model.contains_word(w))
        .map(|last| {
            let surface = format!("{last}-{last}");
            let known = model.log10_prob(&surface, context);
            let repeat = model.log10_prob(last, context);
            Suggestion {
                score: if model.contains_word(&surface) { known.max(repeat) } else { repeat },
                surface,
                kind: SuggestionKind::Prediction,
            }
        });
    let mut out: Vec<Suggestion> = model
        .words()
        .into_iter()
        .filter(|w| doubled.as_ref().is_none_or(|d| &d.surface != w))
        .map(|w| Suggestion {
            score: model.log10_prob(&w, context),
            surface: w,
            kind: SuggestionKind::Prediction,
        })
        .filter(|s| s.score.is_finite())
        .collect();
    sort_suggestions(&mut out);
    out.truncate(k);
    if let Some(d) = doubled.filter(|d| d.score.is_finite()) {
        if out.len() == k {
            out.pop();
        }
        out.push(d);
        sort_suggestions(&mut out);
    }
    out
}

/// `makan2` → `makan-makan` for languages that write reduplication with a
/// trailing 2.
pub fn expand_shorthand(token: &str, profile: &LanguageProfile) -> Option<Suggestion> {
    if !profile.reduplication_enabled {
        return None;
    }
    let stem = token.strip_suffix('2')?;
    if stem.is_empty() || !stem.chars().all(|c| c.is_alphabetic() || crate::inventory::WORD_INTERNAL.contains(&c) || unicode_normalization::char::is_combining_mark(c)) {
        return None;
    }
    Some(Suggestion {
        surface: format!("{stem}-{}", profile.fold(stem)),
        score: 0.0,
        kind: SuggestionKind::Reduplication,
    })
}
