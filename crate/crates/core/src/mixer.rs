//! Same-script mixing of monolingual models.
//!
//! `P_mix(w | c) = Σᵢ λᵢ·Pᵢ(w | c)` over the union of the components'
//! events. A component's `<unk>` mass is shared between `<unk>` and the
//! union tokens it lacks, which keeps the mixture normalized.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::MixError;
use crate::lm::{share, LanguageModel};

/// No component weight drops below this after adaptation.
pub const WEIGHT_FLOOR: f64 = 0.05;

const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Clone)]
pub struct MixedModel {
    components: Vec<Arc<dyn LanguageModel>>,
    weights: Vec<f64>,
    events: BTreeSet<String>,
    absent: Vec<usize>,
    tag: String,
}

impl std::fmt::Debug for MixedModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MixedModel")
            .field("languages", &self.tag)
            .field("weights", &self.weights)
            .finish()
    }
}

pub fn mix(models: Vec<Arc<dyn LanguageModel>>, initial_weights: Option<Vec<f64>>) -> Result<MixedModel, MixError> {
    let first = models.first().ok_or(MixError::EmptyModelList)?;
    if let Some(other) = models.iter().find(|m| m.script() != first.script()) {
        return Err(MixError::CrossScriptMix {
            first_tag: first.language_tag().to_string(),
            first_script: first.script().to_string(),
            second_tag: other.language_tag().to_string(),
            second_script: other.script().to_string(),
        });
    }
    let n = models.len();
    let weights = match initial_weights {
        None => vec![1.0 / n as f64; n],
        Some(w) => {
            if w.len() != n {
                return Err(MixError::InvalidWeights(format!("{} weights for {n} models", w.len())));
            }
            if w.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(MixError::InvalidWeights("weights must be positive".into()));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
                return Err(MixError::InvalidWeights(format!("weights sum to {sum}, not 1")));
            }
            w
        }
    };
    let events: BTreeSet<String> = models.iter().flat_map(|m| m.events()).collect();
    let absent = models
        .iter()
        .map(|m| events.iter().filter(|e| !m.has_event(e)).count())
        .collect();
    let tag = models
        .iter()
        .map(|m| m.language_tag())
        .collect::<Vec<_>>()
        .join("+");
    Ok(MixedModel {
        components: models,
        weights,
        events,
        absent,
        tag,
    })
}

impl MixedModel {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[Arc<dyn LanguageModel>] {
        &self.components
    }

    /// Component `i`'s probability for `token` within the union vocabulary.
    pub fn component_prob(&self, i: usize, token: &str, context: &[String]) -> f64 {
        share(self.components[i].as_ref(), token, context, self.absent[i])
    }

    /// One Bayesian step towards the components that explain
    /// `committed_word` best, followed by the weight floor.
    pub fn adapt_weights(&self, committed_word: &str) -> MixedModel {
        let raw: Vec<f64> = (0..self.components.len())
            .map(|i| self.weights[i] * self.component_prob(i, committed_word, &[]))
            .collect();
        let sum: f64 = raw.iter().sum();
        let mut next = self.clone();
        if sum > 0.0 && sum.is_finite() {
            let posterior: Vec<f64> = raw.iter().map(|r| r / sum).collect();
            next.weights = apply_floor(&posterior, WEIGHT_FLOOR);
        }
        next
    }
}

/// Raises weights below `floor` to it and scales the rest so the total
/// stays 1, repeating until no weight is below the floor.
pub fn apply_floor(weights: &[f64], floor: f64) -> Vec<f64> {
    let n = weights.len();
    let floor = floor.min(1.0 / n as f64);
    let mut fixed = vec![false; n];
    let mut w = weights.to_vec();
    loop {
        let pinned = fixed.iter().filter(|f| **f).count() as f64;
        let free_mass: f64 = (0..n).filter(|&i| !fixed[i]).map(|i| weights[i]).sum();
        let target = 1.0 - floor * pinned;
        for i in 0..n {
            w[i] = if fixed[i] {
                floor
            } else if free_mass > 0.0 {
                weights[i] / free_mass * target
            } else {
                target / (n as f64 - pinned)
            };
        }
        let mut changed = false;
        for i in 0..n {
            if !fixed[i] && w[i] < floor {
                fixed[i] = true;
                changed = true;
            }
        }
        if !changed {
            return w;
        }
    }
}

impl LanguageModel for MixedModel {
    fn language_tag(&self) -> &str {
        &self.tag
    }

    fn script(&self) -> &str {
        self.components[0].script()
    }

    fn prob(&self, token: &str, context: &[String]) -> f64 {
        if self.components.len() == 1 {
            return self.components[0].prob(token, context);
        }
        (0..self.components.len())
            .map(|i| self.weights[i] * self.component_prob(i, token, context))
            .sum()
    }

    fn has_event(&self, token: &str) -> bool {
        self.events.contains(token)
    }

    fn events(&self) -> Vec<String> {
        self.events.iter().cloned().collect()
    }
}
