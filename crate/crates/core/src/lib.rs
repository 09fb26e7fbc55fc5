//! Multilingual input-method engine.
//!
//! The crate covers the whole path from language data to typed text:
//!
//! * [`layout`]: declarative keyboard layouts with long-press sets, extra
//!   pages and ordered dynamic rules for complex scripts, plus coverage
//!   checks against a language's character inventory.
//! * [`autogen`]: Latin-script layout generation from a corpus.
//! * [`text`]: corpus normalization, wordlists and backoff n-gram models.
//! * [`decode`]: tap decoding, autocorrect, prediction and spell-checking.
//! * [`personal`]: personal dictionary and revert learning.
//! * [`mixer`]: same-script multilingual model mixing.
//! * [`registry`]: language prioritization and status dashboards.
//! * [`service`]: sessions and the line-delimited JSON protocol.

pub mod autogen;
pub mod decode;
pub mod error;
pub mod inventory;
pub mod layout;
pub mod lm;
pub mod mixer;
pub mod personal;
pub mod profile;
pub mod registry;
pub mod service;
pub mod text;

pub use error::*;
pub use inventory::{CharacterInventory, GraphemeSet};
pub use layout::Layout;

pub use lm::LanguageModel;
pub use profile::LanguageProfile;
