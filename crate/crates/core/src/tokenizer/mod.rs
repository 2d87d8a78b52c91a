//! Token representations of a note list.
//!
//! Two notations share NOTE_ON, TIME_SHIFT and VELOCITY families. The
//! on/off notation ends notes with NOTE_OFF events; the explicit notation
//! puts a DURATION token right after each NOTE_ON instead.

mod codec;
mod format;
mod quantize;
mod stats;
mod vocab;

pub use codec::{decode, encode, DecodeAnomalies, Decoded};
pub use format::{from_binary, from_text, to_binary, to_text, BINARY_MAGIC, BINARY_VERSION};
pub use quantize::{
    dequantize_velocity, duration_bin_seconds, duration_bin_steps, duration_half_width,
    quantize_duration, quantize_time_shift, quantize_velocity, seconds_to_steps,
    steps_to_seconds, time_shift_steps, DEFAULT_VELOCITY_BIN, MAX_DURATION_BIN, MAX_TIME_SHIFT,
    STEPS_PER_SECOND, VELOCITY_BINS,
};
pub use stats::{corpus_stats, CorpusStats};
pub use vocab::{Family, FamilyRange, RepresentationKind, Token, TokenId, Vocabulary};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TokenError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("corpus mixes representation kinds")]
    MixedKinds,
    #[error("not a token file (bad magic)")]
    BadMagic,
    #[error("unsupported token file version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown representation code {0}")]
    UnknownKind(u8),
    #[error("token file ends in the middle of an id")]
    TruncatedId,
    #[error("token id {id} outside vocabulary of size {size}")]
    IdOutOfRange { id: u16, size: usize },
    #[error("line {line}: cannot read token '{text}'")]
    BadTokenText { line: usize, text: String },
}

/// Token ids of one piece under one notation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub kind: RepresentationKind,
    pub ids: Vec<TokenId>,
    /// Opaque identifier of where the sequence came from.
    pub source: String,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}
