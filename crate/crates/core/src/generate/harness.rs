use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sample::{sample_continuation, Sampling};
use super::{GenerateError, GeneratorModel};
use crate::stats::derive_seed;
use crate::tokenizer::TokenSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarnessConfig {
    pub primer_len: usize,
    pub total_len: usize,
    pub continuations_per_primer: usize,
    pub primers_per_dataset: usize,
    pub sampling: Sampling,
    pub seed: u64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            primer_len: 256,
            total_len: 2048,
            continuations_per_primer: 3,
            primers_per_dataset: 10,
            sampling: Sampling::default(),
            seed: 0,
        }
    }
}

/// One generated piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    /// Source id of the corpus file the primer came from.
    pub primer_source: String,
    pub primer_index: usize,
    pub continuation: usize,
    pub seed: u64,
    pub sequence: TokenSequence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessOutput {
    pub pieces: Vec<Generated>,
    /// Corpus files shorter than the primer.
    pub skipped: Vec<String>,
}

/// Picks primer files without replacement and continues each of them
/// `continuations_per_primer` times.
///
/// Primer selection uses a stream derived from `cfg.seed`; continuation `c`
/// of primer `p` uses seed `derive_seed(cfg.seed, [1, p, c])`, so output does
/// not depend on thread count.
pub fn run_harness(
    model: &dyn GeneratorModel,
    corpus: &[TokenSequence],
    cfg: &HarnessConfig,
) -> Result<HarnessOutput, GenerateError> {
    if cfg.primer_len >= cfg.total_len {
        return Err(GenerateError::InvalidConfig(format!(
            "primer length {} must be below total length {}",
            cfg.primer_len, cfg.total_len
        )));
    }
    if let Some(s) = corpus.iter().find(|s| s.kind != model.kind()) {
        return Err(GenerateError::KindMismatch {
            model: model.kind(),
            corpus: s.kind,
        });
    }
    let (eligible, short): (Vec<&TokenSequence>, Vec<&TokenSequence>) =
        corpus.iter().partition(|s| s.len() >= cfg.primer_len);
    if eligible.len() < cfg.primers_per_dataset {
        return Err(GenerateError::InsufficientCorpus(eligible.len()));
    }
    let mut order: Vec<usize> = (0..eligible.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0])));
    let chosen: Vec<&TokenSequence> = order[..cfg.primers_per_dataset]
        .iter()
        .map(|&i| eligible[i])
        .collect();

    let jobs: Vec<(usize, usize)> = (0..chosen.len())
        .flat_map(|p| (0..cfg.continuations_per_primer).map(move |c| (p, c)))
        .collect();
    let pieces = jobs
        .into_par_iter()
        .map(|(p, c)| {
            let source = chosen[p];
            let seed = derive_seed(cfg.seed, &[1, p as u64, c as u64]);
            let ids = sample_continuation(
                model,
                &source.ids[..cfg.primer_len],
                cfg.total_len,
                &cfg.sampling,
                seed,
            )?;
            Ok(Generated {
                primer_source: source.source.clone(),
                primer_index: p,
                continuation: c,
                seed,
                sequence: TokenSequence {
                    kind: model.kind(),
                    ids,
                    source: format!("{}#{c}", source.source),
                },
            })
        })
        .collect::<Result<Vec<_>, GenerateError>>()?;
    Ok(HarnessOutput {
        pieces,
        skipped: short.iter().map(|s| s.source.clone()).collect(),
    })
}
