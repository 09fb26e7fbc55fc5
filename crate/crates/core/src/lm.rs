//! The language-model interface shared by n-gram models, mixtures and the
//! personalized view used while decoding.

use crate::text::{NGramModel, EOS, UNK};

pub trait LanguageModel: Send + Sync {
    fn language_tag(&self) -> &str;

    fn script(&self) -> &str;

    /// P(token | context). Tokens the model does not predict get its
    /// unknown-word mass. Only the trailing words of `context` are used.
    fn prob(&self, token: &str, context: &[String]) -> f64;

    fn log10_prob(&self, token: &str, context: &[String]) -> f64 {
        self.prob(token, context).log10()
    }

    /// Whether the model has its own entry for this token.
    fn has_event(&self, token: &str) -> bool;

    /// Every predicted token, including `</s>` where modelled and `<unk>`.
    fn events(&self) -> Vec<String>;

    /// Real words, without `<unk>` and `</s>`.
    fn words(&self) -> Vec<String> {
        self.events()
            .into_iter()
            .filter(|w| w != UNK && w != EOS)
            .collect()
    }

    fn contains_word(&self, word: &str) -> bool {
        word != UNK && word != EOS && self.has_event(word)
    }
}

impl LanguageModel for NGramModel {
    fn language_tag(&self) -> &str {
        &self.language_tag
    }

    fn script(&self) -> &str {
        &self.script
    }

    fn prob(&self, token: &str, context: &[String]) -> f64 {
        NGramModel::prob(self, token, context)
    }

    fn log10_prob(&self, token: &str, context: &[String]) -> f64 {
        NGramModel::log10_prob(self, token, context)
    }

    fn has_event(&self, token: &str) -> bool {
        self.id(token).is_some_and(|id| self.is_event_id(id))
    }

    fn events(&self) -> Vec<String> {
        NGramModel::events(self).map(String::from).collect()
    }

    fn words(&self) -> Vec<String> {
        NGramModel::words(self).map(String::from).collect()
    }
}

/// Probability a model gives `token` inside a larger event space.
///
/// When several models are combined over a union vocabulary, each model's
/// `<unk>` mass is shared evenly between `<unk>` itself and the `absent`
/// union tokens it has no entry for, so every combined distribution stays
/// normalized.
pub(crate) fn share(model: &dyn LanguageModel, token: &str, context: &[String], absent: usize) -> f64 {
    if token != UNK && model.has_event(token) {
        model.prob(token, context)
    } else {
        model.prob(UNK, context) / (absent + 1) as f64
    }
}
