//! Corpus processing: normalization, wordlists and n-gram models.

mod arpa;
mod ngram;
mod normalize;
mod wordlist;

pub use ngram::{NGramModel, TrainParams, BOS, EOS, UNK};
pub use normalize::{normalize, normalize_corpus, RejectReason, RejectionReport, Token};
pub use wordlist::{build_wordlist, Wordlist};
