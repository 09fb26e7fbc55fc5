//! Backoff n-gram models with absolute discounting.
//!
//! Every observed n-gram `h w` of order k ≥ 2 gets `(c(h w) − D) / c(h)`,
//! where `c(h)` sums the continuation counts of `h`. The freed mass
//! `D · types(h) / c(h)` goes to unseen continuations through the backoff
//! weight `bow(h) = freed / (1 − Σ_seen P_lower(w | h'))`. Unigrams are
//! discounted the same way and the freed mass is spread uniformly over all
//! events, so `<unk>` always keeps some probability.
//!
//! Order-1 models predict words only. Higher orders also predict `</s>`.

use std::collections::{BTreeMap, HashMap};

use crate::error::TrainError;

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

/// log10 probability marking a vocabulary entry that is never predicted.
pub(crate) const NO_EVENT: f64 = -99.0;

pub const MAX_ORDER: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    pub discount: f64,
    pub max_vocab: usize,
    /// Minimum word count for the vocabulary. `None` picks 2 for corpora
    /// above a million tokens and 1 otherwise.
    pub min_count: Option<u64>,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            discount: 0.75,
            max_vocab: 50_000,
            min_count: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Entry {
    pub log_prob: f64,
    pub log_bow: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    pub(crate) order: usize,
    pub(crate) vocab: Vec<String>,
    pub(crate) index: HashMap<String, u32>,
    /// `grams[k - 1]` holds the k-grams.
    pub(crate) grams: Vec<HashMap<Vec<u32>, Entry>>,
    pub(crate) training_tokens: u64,
    pub language_tag: String,
    pub script: String,
}

impl NGramModel {
    /// Trains on tokenized sentences.
    pub fn train(sentences: &[Vec<String>], order: usize, params: &TrainParams) -> Result<Self, TrainError> {
        if order > MAX_ORDER {
            return Err(TrainError::OrderTooLarge(order));
        }
        if order == 0 {
            return Err(TrainError::InvalidParams("order must be at least 1".into()));
        }
        if !(params.discount > 0.0 && params.discount < 1.0) {
            return Err(TrainError::InvalidParams(format!(
                "discount {} outside (0, 1)",
                params.discount
            )));
        }
        if params.max_vocab == 0 {
            return Err(TrainError::InvalidParams("max_vocab must be positive".into()));
        }
        let total: usize = sentences.iter().map(Vec::len).sum();
        if total == 0 {
            return Err(TrainError::EmptyCorpus);
        }

        let mut word_counts: BTreeMap<&str, u64> = BTreeMap::new();
        for w in sentences.iter().flatten() {
            *word_counts.entry(w.as_str()).or_default() += 1;
        }
        let min_count = params
            .min_count
            .unwrap_or(if total > 1_000_000 { 2 } else { 1 });
        let mut kept: Vec<(&str, u64)> = word_counts
            .into_iter()
            .filter(|&(w, c)| c >= min_count && ![UNK, BOS, EOS].contains(&w))
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        kept.truncate(params.max_vocab);
        let mut words: Vec<&str> = kept.into_iter().map(|(w, _)| w).collect();
        words.sort_unstable();

        let vocab: Vec<String> = [UNK, BOS, EOS]
            .into_iter()
            .chain(words)
            .map(String::from)
            .collect();
        let index: HashMap<String, u32> = vocab
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        let (unk, bos, eos) = (0u32, 1u32, 2u32);

        // counts[k - 1]: k-gram -> count, keyed by predicted position
        let mut counts: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); order];
        for sentence in sentences {
            let mut seq: Vec<u32> = Vec::with_capacity(sentence.len() + 2);
            if order > 1 {
                seq.push(bos);
            }
            seq.extend(sentence.iter().map(|w| index.get(w).copied().unwrap_or(unk)));
            if order > 1 {
                seq.push(eos);
            }
            let first = usize::from(order > 1);
            for j in first..seq.len() {
                for k in 1..=order.min(j + 1) {
                    *counts[k - 1].entry(seq[j + 1 - k..=j].to_vec()).or_default() += 1;
                }
            }
        }

        let d = params.discount;
        let is_event = |id: u32| id != bos && (order > 1 || id != eos);
        let events: Vec<u32> = (0..vocab.len() as u32).filter(|&i| is_event(i)).collect();

        let mut grams: Vec<HashMap<Vec<u32>, Entry>> = vec![HashMap::new(); order];
        // unigrams
        let n: u64 = counts[0].values().sum();
        let types = counts[0].len() as f64;
        let floor = d * types / n as f64 / events.len() as f64;
        for id in 0..vocab.len() as u32 {
            let log_prob = if is_event(id) {
                let c = counts[0].get(&vec![id]).copied().unwrap_or(0) as f64;
                (((c - d).max(0.0)) / n as f64 + floor).log10()
            } else {
                NO_EVENT
            };
            grams[0].insert(vec![id], Entry { log_prob, log_bow: 0.0 });
        }

        for k in 2..=order {
            let mut by_context: BTreeMap<&[u32], Vec<(u32, u64)>> = BTreeMap::new();
            for (gram, &c) in &counts[k - 1] {
                by_context.entry(&gram[..k - 1]).or_default().push((gram[k - 1], c));
            }
            let mut layer = HashMap::new();
            let mut bows = Vec::new();
            for (h, conts) in by_context {
                let ch: u64 = conts.iter().map(|&(_, c)| c).sum();
                let seen_lower: f64 = conts
                    .iter()
                    .map(|&(w, _)| 10f64.powf(backoff_lookup(&grams, w, &h[1..])))
                    .sum();
                let denom = 1.0 - seen_lower;
                let freed = d * conts.len() as f64 / ch as f64;
                let ml = denom <= 1e-12;
                for &(w, c) in &conts {
                    let p = if ml {
                        c as f64 / ch as f64
                    } else {
                        (c as f64 - d) / ch as f64
                    };
                    let mut gram = h.to_vec();
                    gram.push(w);
                    layer.insert(gram, Entry { log_prob: p.log10(), log_bow: 0.0 });
                }
                let log_bow = if ml { 0.0 } else { (freed / denom).log10() };
                bows.push((h.to_vec(), log_bow));
            }
            for (h, log_bow) in bows {
                grams[k - 2]
                    .entry(h)
                    .or_insert(Entry {
                        log_prob: NO_EVENT,
                        log_bow: 0.0,
                    })
                    .log_bow = log_bow;
            }
            grams[k - 1] = layer;
        }

        Ok(Self {
            order,
            vocab,
            index,
            grams,
            training_tokens: total as u64,
            language_tag: String::new(),
            script: String::new(),
        })
    }

    pub fn with_meta(mut self, language_tag: impl Into<String>, script: impl Into<String>) -> Self {
        self.language_tag = language_tag.into();
        self.script = script.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn training_tokens(&self) -> u64 {
        self.training_tokens
    }

    /// Vocabulary size including `<unk>` and the sentence markers.
    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.vocab[id as usize]
    }

    fn unk_id(&self) -> u32 {
        self.index[UNK]
    }

    /// Whether the model assigns probability to this vocabulary entry.
    pub fn is_event_id(&self, id: u32) -> bool {
        self.grams[0]
            .get(&vec![id])
            .is_some_and(|e| e.log_prob > NO_EVENT / 2.0)
    }

    /// Every predicted token, including `</s>` and `<unk>`.
    pub fn events(&self) -> impl Iterator<Item = &str> {
        (0..self.vocab.len() as u32)
            .filter(|&i| self.is_event_id(i))
            .map(|i| self.word(i))
    }

    /// Real words: events other than `<unk>` and `</s>`.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.events().filter(|w| *w != UNK && *w != EOS)
    }

    pub fn contains_word(&self, word: &str) -> bool {
        word != UNK && word != EOS && self.id(word).is_some_and(|i| self.is_event_id(i))
    }

    /// Maps words to ids, unknown words to `<unk>`.
    pub fn ids<S: AsRef<str>>(&self, words: &[S]) -> Vec<u32> {
        words
            .iter()
            .map(|w| self.id(w.as_ref()).unwrap_or_else(|| self.unk_id()))
            .collect()
    }

    /// log10 P(word | context); only the last `order − 1` context words
    /// matter. Out-of-vocabulary words get the `<unk>` probability.
    pub fn log10_prob<S: AsRef<str>>(&self, word: &str, context: &[S]) -> f64 {
        let w = self.id(word).unwrap_or_else(|| self.unk_id());
        let ctx = self.ids(context);
        self.log10_prob_ids(w, &ctx)
    }

    pub fn log10_prob_ids(&self, word: u32, context: &[u32]) -> f64 {
        if !self.is_event_id(word) {
            return NO_EVENT;
        }
        let keep = context.len().min(self.order - 1);
        backoff_lookup(&self.grams, word, &context[context.len() - keep..])
    }

    pub fn prob<S: AsRef<str>>(&self, word: &str, context: &[S]) -> f64 {
        10f64.powf(self.log10_prob(word, context))
    }

    /// Contexts that have at least one observed continuation.
    pub fn observed_contexts(&self) -> Vec<Vec<&str>> {
        let mut out: Vec<Vec<&str>> = vec![Vec::new()];
        for layer in &self.grams[1..] {
            let mut hs: Vec<&[u32]> = layer.keys().map(|g| &g[..g.len() - 1]).collect();
            hs.sort_unstable();
            hs.dedup();
            out.extend(hs.into_iter().map(|h| h.iter().map(|&i| self.word(i)).collect()));
        }
        out
    }

    /// Per-token perplexity over the given sentences, counting `</s>` for
    /// models of order ≥ 2.
    pub fn perplexity(&self, sentences: &[Vec<String>]) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for s in sentences {
            let mut seq = Vec::new();
            if self.order > 1 {
                seq.push(self.index[BOS]);
            }
            seq.extend(self.ids(s));
            if self.order > 1 {
                seq.push(self.index[EOS]);
            }
            let first = usize::from(self.order > 1);
            for j in first..seq.len() {
                sum -= self.log10_prob_ids(seq[j], &seq[..j]);
                n += 1;
            }
        }
        if n == 0 {
            return 1.0;
        }
        10f64.powf(sum / n as f64)
    }
}

/// Standard backoff: the longest observed n-gram ending in `word`, plus the
/// backoff weights of every longer context that was skipped.
fn backoff_lookup(grams: &[HashMap<Vec<u32>, Entry>], word: u32, context: &[u32]) -> f64 {
    let mut acc = 0.0;
    let mut key = Vec::with_capacity(context.len() + 1);
    for start in 0..=context.len() {
        let h = &context[start..];
        key.clear();
        key.extend_from_slice(h);
        key.push(word);
        if let Some(e) = grams[h.len()].get(&key) {
            return acc + e.log_prob;
        }
        if !h.is_empty() {
            if let Some(e) = grams[h.len() - 1].get(h) {
                acc += e.log_bow;
            }
        }
    }
    NO_EVENT
}
