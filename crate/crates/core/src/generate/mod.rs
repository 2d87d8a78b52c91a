//! Continuation of token primers to a fixed length, with an order-k Markov
//! model as the reference next-token model.

mod harness;
mod markov;
mod sample;

pub use harness::{run_harness, Generated, HarnessConfig, HarnessOutput};
pub use markov::{train_markov, MarkovModel, DEFAULT_ALPHA, DEFAULT_ORDER, MODEL_MAGIC, MODEL_VERSION};
pub use sample::{sample_continuation, Sampling};

use crate::tokenizer::{RepresentationKind, TokenId};

/// A next-token model over one notation's vocabulary.
pub trait GeneratorModel: Sync {
    fn kind(&self) -> RepresentationKind;

    fn vocab_size(&self) -> usize;

    /// Probability of every token id given the tokens so far; sums to 1.
    fn distribution(&self, context: &[TokenId]) -> Vec<f64>;
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerateError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("sequences mix representation kinds")]
    MixedKinds,
    #[error("model is for {model} but the corpus is {corpus}")]
    KindMismatch {
        model: RepresentationKind,
        corpus: RepresentationKind,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("only {0} files are long enough to serve as primers")]
    InsufficientCorpus(usize),
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("unsupported model file version {0}")]
    UnsupportedVersion(u8),
    #[error("model file is truncated or malformed")]
    Malformed,
}
