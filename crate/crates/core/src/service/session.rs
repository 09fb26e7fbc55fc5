use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;

use super::{Engine, LanguagePack};
use crate::decode::{
    commit_policy, decode_word, expand_shorthand, next_words, Commit, Lexicon, Suggestion, TapEvent,
    TapKind,
};
use crate::error::ServiceError;
use crate::inventory::{GraphemeSet, WORD_INTERNAL};
use crate::layout::{KeyStates, KeyView, Layout};
use crate::lm::LanguageModel;
use crate::mixer::{mix, MixedModel};
use crate::personal::{PersonalDict, Personalized};
use crate::text::BOS;

/// Slots in the suggestion strip.
pub const STRIP_SIZE: usize = 3;

/// Context words handed to the model.
const CONTEXT_WORDS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum SessionEvent {
    Tap {
        x: f64,
        y: f64,
        #[serde(default)]
        page: usize,
        #[serde(default)]
        timestamp: u64,
    },
    LongPressSelect {
        x: f64,
        y: f64,
        #[serde(default)]
        page: usize,
        index: usize,
        #[serde(default)]
        timestamp: u64,
    },
    /// One-shot shift for the next tap.
    Shift,
    Backspace,
    Space,
    /// Finishes the pending word without a trailing space.
    Commit,
    /// Undoes the autocorrection applied by the last commit.
    Revert,
    SetLanguages {
        languages: Vec<String>,
    },
    RequestSuggestions,
    /// Commits strip entry `index`.
    Pick {
        index: usize,
    },
}

/// Edit to the committed text: drop `delete` characters from the end,
/// then append `insert`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextDelta {
    pub delete: usize,
    pub insert: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventResponse {
    pub session_id: String,
    /// Events handled so far in this session, including this one.
    pub seq: u64,
    pub strip: Vec<Suggestion>,
    pub key_state_delta: Vec<KeyView>,
    pub committed_delta: TextDelta,
    pub committed_text: String,
    /// Literal reading of the taps not yet committed.
    pub pending: String,
    pub page: usize,
    /// Set when this event committed a word.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commit: Option<Commit>,
}

struct LastCommit {
    commit: Commit,
    /// Byte offset of the committed word in the text.
    start: usize,
    /// Exactly what was appended, word plus any space.
    appended: String,
    capitalized: bool,
}

pub struct Session {
    pub id: String,
    engine: Arc<Engine>,
    languages: Vec<String>,
    packs: Vec<Arc<LanguagePack>>,
    model: MixedModel,
    lexicon: Arc<Lexicon>,
    inventory: GraphemeSet,
    personal: Arc<Mutex<PersonalDict>>,
    personal_lexicon: Lexicon,
    committed: String,
    taps: Vec<TapEvent>,
    pieces: Vec<String>,
    capitalize: bool,
    shift: bool,
    page: usize,
    states: KeyStates,
    strip: Vec<Suggestion>,
    last_commit: Option<LastCommit>,
    seq: u64,
}

impl Session {
    pub fn open(
        engine: Arc<Engine>,
        id: impl Into<String>,
        languages: &[String],
        personal: Arc<Mutex<PersonalDict>>,
    ) -> Result<Self, ServiceError> {
        let (packs, model, lexicon, inventory) = build_languages(&engine, languages)?;
        let personal_lexicon = Lexicon::from_words(lock(&personal).words().map(|(w, _)| w));
        let states = packs[0].layout.key_state("", false);
        let mut session = Self {
            id: id.into(),
            engine,
            languages: languages.to_vec(),
            packs,
            model,
            lexicon,
            inventory,
            personal,
            personal_lexicon,
            committed: String::new(),
            taps: Vec::new(),
            pieces: Vec::new(),
            capitalize: false,
            shift: false,
            page: 0,
            states,
            strip: Vec::new(),
            last_commit: None,
            seq: 0,
        };
        session.strip = session.predictions();
        Ok(session)
    }

    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.packs[0].layout
    }

    pub fn key_state(&self) -> &KeyStates {
        &self.states
    }

    pub fn page(&self) -> usize {
        self.page
    }

    pub fn committed_text(&self) -> &str {
        &self.committed
    }

    pub fn mixture_weights(&self) -> &[f64] {
        self.model.weights()
    }

    pub fn handle(&mut self, event: SessionEvent) -> Result<EventResponse, ServiceError> {
        let before_states = self.states.clone();
        let before_len = self.committed.chars().count();
        let before_text = self.committed.clone();
        let commit = self.apply(event)?;
        self.seq += 1;
        self.states = self.layout().key_state(&self.visible_text(), self.shift);
        self.strip = if self.taps.is_empty() {
            self.predictions()
        } else {
            self.corrections()?
        };
        let common = common_prefix_chars(&before_text, &self.committed);
        Ok(EventResponse {
            session_id: self.id.clone(),
            seq: self.seq,
            strip: self.strip.clone(),
            key_state_delta: self.states.delta(&before_states),
            committed_delta: TextDelta {
                delete: before_len - common,
                insert: self.committed.chars().skip(common).collect(),
            },
            committed_text: self.committed.clone(),
            pending: self.pending(),
            page: self.page,
            commit,
        })
    }

    fn apply(&mut self, event: SessionEvent) -> Result<Option<Commit>, ServiceError> {
        match event {
            SessionEvent::Tap { x, y, page, timestamp } => {
                check_point(x, y)?;
                let view = self.view_at(page, x, y)?;
                let key = self.layout().page(page)?.key(&view.key_id).cloned();
                if let Some(target) = key.and_then(|k| k.switch_to_page) {
                    self.page = target;
                    return Ok(None);
                }
                let Some(output) = view.output else {
                    return Ok(None);
                };
                // Shifted faces are shown, but decoding runs on the base letters.
                let output = if self.shift && view.rule.is_none() {
                    self.base_output(page, &view.key_id).unwrap_or(output)
                } else {
                    output
                };
                self.push_tap(
                    TapEvent {
                        x,
                        y,
                        timestamp,
                        kind: TapKind::Tap,
                        page,
                    },
                    output,
                );
            }
            SessionEvent::LongPressSelect {
                x,
                y,
                page,
                index,
                timestamp,
            } => {
                check_point(x, y)?;
                let (key_id, _) = self.layout().hit_test(page, x, y)?;
                let key = self.layout().page(page)?.key(&key_id).cloned();
                let choice = key.and_then(|k| k.long_press.get(index).cloned()).ok_or_else(|| {
                    ServiceError::InvalidEvent(format!("key {key_id} has no long-press entry {index}"))
                })?;
                self.push_tap(
                    TapEvent {
                        x,
                        y,
                        timestamp,
                        kind: TapKind::LongPressSelect(index),
                        page,
                    },
                    choice,
                );
            }
            SessionEvent::Shift => self.shift = !self.shift,
            SessionEvent::Backspace => {
                if self.taps.pop().is_some() {
                    self.pieces.pop();
                    if self.taps.is_empty() {
                        self.capitalize = false;
                    }
                } else {
                    self.committed.pop();
                    self.last_commit = None;
                }
            }
            SessionEvent::Space => return self.finish_word(" "),
            SessionEvent::Commit => return self.finish_word(""),
            SessionEvent::Revert => self.revert()?,
            SessionEvent::SetLanguages { languages } => {
                let (packs, model, lexicon, inventory) = build_languages(&self.engine, &languages)?;
                self.packs = packs;
                self.model = model;
                self.lexicon = lexicon;
                self.inventory = inventory;
                self.languages = languages;
                self.page = 0;
            }
            SessionEvent::RequestSuggestions => {}
            SessionEvent::Pick { index } => {
                let pick = self
                    .strip
                    .get(index)
                    .cloned()
                    .ok_or_else(|| ServiceError::InvalidEvent(format!("no suggestion at {index}")))?;
                let literal = self.pending();
                let correction = (pick.surface != literal && !literal.is_empty()).then(|| pick.surface.clone());
                let commit = Commit {
                    text: pick.surface,
                    literal,
                    correction,
                };
                return Ok(Some(self.commit_word(commit, " ")));
            }
        }
        Ok(None)
    }

    fn push_tap(&mut self, tap: TapEvent, output: String) {
        if self.taps.is_empty() {
            self.capitalize = self.shift;
        }
        self.shift = false;
        self.taps.push(tap);
        self.pieces.push(output);
    }

    fn view_at(&self, page: usize, x: f64, y: f64) -> Result<KeyView, ServiceError> {
        let (key_id, _) = self.layout().hit_test_state(page, x, y, &self.states)?;
        self.states
            .get(page, &key_id)
            .cloned()
            .ok_or(ServiceError::InvalidEvent(format!("no key at page {page}")))
    }

    fn base_output(&self, page: usize, key_id: &str) -> Option<String> {
        let key = self.layout().page(page).ok()?.key(key_id)?;
        (!key.base_output.is_empty()).then(|| key.base_output.clone())
    }

    fn pending(&self) -> String {
        self.pieces.concat()
    }

    fn visible_text(&self) -> String {
        format!("{}{}", self.committed, self.pending())
    }

    fn profile(&self) -> &crate::profile::LanguageProfile {
        &self.packs[0].profile
    }

    fn context(&self) -> Vec<String> {
        context_words(&self.committed, self.profile())
    }

    fn corrections(&self) -> Result<Vec<Suggestion>, ServiceError> {
        let literal = self.pending();
        let dict = lock(&self.personal);
        let model = Personalized::new(&self.model, &dict);
        let mut strip = decode_word(
            &self.taps,
            Some(&literal),
            &self.context(),
            &model,
            &self.packs[0].spatial,
            &[&self.lexicon, &self.personal_lexicon],
            &self.engine.config,
            STRIP_SIZE,
        )?;
        if let Some(expanded) = expand_shorthand(&literal, self.profile()) {
            strip.insert(0, expanded);
            strip.truncate(STRIP_SIZE);
        }
        Ok(strip)
    }

    fn predictions(&self) -> Vec<Suggestion> {
        let dict = lock(&self.personal);
        let model = Personalized::new(&self.model, &dict);
        next_words(&self.context(), &model, self.profile(), STRIP_SIZE)
    }

    fn finish_word(&mut self, separator: &str) -> Result<Option<Commit>, ServiceError> {
        if self.taps.is_empty() {
            self.committed.push_str(separator);
            self.last_commit = None;
            return Ok(None);
        }
        let literal = self.pending();
        let commit = if let Some(expanded) = expand_shorthand(&literal, self.profile()) {
            Commit {
                text: expanded.surface,
                literal,
                correction: None,
            }
        } else {
            let suggestions = self.corrections()?;
            let dict = lock(&self.personal);
            commit_policy(&suggestions, self.profile(), Some(&dict))
        };
        Ok(Some(self.commit_word(commit, separator)))
    }

    fn commit_word(&mut self, commit: Commit, separator: &str) -> Commit {
        let word = if self.capitalize { capitalize(&commit.text) } else { commit.text.clone() };
        let start = self.committed.len();
        let appended = format!("{word}{separator}");
        self.committed.push_str(&appended);
        self.learn(&commit.text);
        self.taps.clear();
        self.pieces.clear();
        self.last_commit = Some(LastCommit {
            commit: commit.clone(),
            start,
            appended,
            capitalized: self.capitalize,
        });
        self.capitalize = false;
        commit
    }

    fn learn(&mut self, word: &str) {
        let folded = self.profile().fold(word);
        let now = self.seq;
        let learned = lock(&self.personal).learn_commit(&folded, now, &self.inventory).is_ok();
        if learned {
            self.personal_lexicon.insert(&folded);
        }
        if self.model.components().len() > 1 {
            self.model = self.model.adapt_weights(&folded);
        }
    }

    fn revert(&mut self) -> Result<(), ServiceError> {
        let nothing = || ServiceError::InvalidEvent("no autocorrection to revert".into());
        let last = self.last_commit.take().ok_or_else(nothing)?;
        let Some(correction) = last.commit.correction.clone() else {
            return Err(nothing());
        };
        if !self.taps.is_empty() || !self.committed[last.start..].eq(&last.appended) {
            return Err(nothing());
        }
        let separator = &last.appended[last.appended.len() - trailing_separator_len(&last.appended)..];
        let literal = if last.capitalized { capitalize(&last.commit.literal) } else { last.commit.literal.clone() };
        let replacement = format!("{literal}{separator}");
        self.committed.truncate(last.start);
        self.committed.push_str(&replacement);
        let fold = |w: &str| self.profile().fold(w);
        let (lit, cor) = (fold(&last.commit.literal), fold(&correction));
        {
            let mut dict = lock(&self.personal);
            dict.forget_commit(&cor);
            dict.learn_revert(&lit, &cor, self.seq, &self.inventory);
            if dict.contains(&lit) {
                self.personal_lexicon.insert(&lit);
            }
        }
        Ok(())
    }
}

type Built = (Vec<Arc<LanguagePack>>, MixedModel, Arc<Lexicon>, GraphemeSet);

fn build_languages(engine: &Engine, languages: &[String]) -> Result<Built, ServiceError> {
    let packs = languages
        .iter()
        .map(|t| engine.pack(t))
        .collect::<Result<Vec<_>, _>>()?;
    build(packs)
}

fn build(packs: Vec<Arc<LanguagePack>>) -> Result<Built, ServiceError> {
    let models: Vec<Arc<dyn LanguageModel>> = packs
        .iter()
        .map(|p| p.model.clone() as Arc<dyn LanguageModel>)
        .collect();
    let model = mix(models, None)?;
    let lexicon = if packs.len() == 1 {
        packs[0].lexicon.clone()
    } else {
        Arc::new(Lexicon::from_words(packs.iter().flat_map(|p| p.lexicon.words().map(String::from).collect::<Vec<_>>())))
    };
    let mut inventory = GraphemeSet::default();
    for p in &packs {
        for g in p.profile.grapheme_set().iter() {
            inventory.insert(g.clone());
        }
    }
    Ok((packs, model, lexicon, inventory))
}

fn lock(m: &Mutex<PersonalDict>) -> std::sync::MutexGuard<'_, PersonalDict> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

fn check_point(x: f64, y: f64) -> Result<(), ServiceError> {
    if x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(ServiceError::InvalidEvent("tap coordinates must be finite".into()))
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn trailing_separator_len(s: &str) -> usize {
    s.len() - s.trim_end_matches(' ').len()
}

fn common_prefix_chars(a: &str, b: &str) -> usize {
    a.chars().zip(b.chars()).take_while(|(x, y)| x == y).count()
}

/// Folded words of the current sentence, after a `<s>` marker, keeping
/// the last few.
pub(crate) fn context_words(text: &str, profile: &crate::profile::LanguageProfile) -> Vec<String> {
    let mut ctx = vec![BOS.to_string()];
    for chunk in text.split_whitespace() {
        let word = chunk.trim_matches(|c: char| !(c.is_alphanumeric() || is_combining_mark(c)) || WORD_INTERNAL.contains(&c));
        if !word.is_empty() {
            ctx.push(profile.fold(word));
        }
        if chunk.ends_with(['.', '!', '?', '।']) {
            ctx.truncate(1);
        }
    }
    let skip = ctx.len().saturating_sub(CONTEXT_WORDS);
    ctx.split_off(skip)
}
