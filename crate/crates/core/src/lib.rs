//! Tokenization of MIDI under two unannotated notations, structural quality
//! metrics for generated music, and the statistics used to compare them.

pub mod generate;
pub mod metrics;
pub mod smf;
pub mod stats;
pub mod tokenizer;
