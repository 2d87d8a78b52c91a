use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::vocab::{RepresentationKind, Vocabulary};
use super::{TokenError, TokenSequence};

/// Per-corpus token statistics: mean piece length and mean number of distinct
/// ids per piece.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub kind: RepresentationKind,
    pub file_count: usize,
    pub mean_length: f64,
    pub mean_unique: f64,
    /// Total tokens per family name over the whole corpus.
    pub family_counts: BTreeMap<String, u64>,
}

pub fn corpus_stats(seqs: &[TokenSequence]) -> Result<CorpusStats, TokenError> {
    let first = seqs.first().ok_or(TokenError::EmptyCorpus)?;
    let kind = first.kind;
    if seqs.iter().any(|s| s.kind != kind) {
        return Err(TokenError::MixedKinds);
    }
    let vocab = Vocabulary::new(kind);
    let mut family_counts: BTreeMap<String, u64> = vocab
        .families()
        .iter()
        .map(|r| (r.family.name().to_string(), 0))
        .collect();
    let mut total_len = 0usize;
    let mut total_unique = 0usize;
    for seq in seqs {
        total_len += seq.ids.len();
        total_unique += seq.ids.iter().collect::<HashSet<_>>().len();
        for tok in seq.ids.iter().filter_map(|&id| vocab.token(id)) {
            *family_counts.entry(tok.family.name().to_string()).or_default() += 1;
        }
    }
    let n = seqs.len() as f64;
    Ok(CorpusStats {
        kind,
        file_count: seqs.len(),
        mean_length: total_len as f64 / n,
        mean_unique: total_unique as f64 / n,
        family_counts,
    })
}
