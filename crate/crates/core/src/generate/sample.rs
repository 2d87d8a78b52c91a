use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GenerateError, GeneratorModel};
use crate::tokenizer::TokenId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sampling {
    /// Divides log-probabilities before renormalizing.
    pub temperature: f64,
    /// Always take the most probable token (lowest id on ties).
    pub greedy: bool,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            temperature: 1.0,
            greedy: false,
        }
    }
}

fn argmax(p: &[f64]) -> usize {
    p.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
        .0
}

/// Extends `primer` autoregressively until it holds `total_len` ids.
pub fn sample_continuation(
    model: &dyn GeneratorModel,
    primer: &[TokenId],
    total_len: usize,
    sampling: &Sampling,
    seed: u64,
) -> Result<Vec<TokenId>, GenerateError> {
    if primer.len() >= total_len {
        return Err(GenerateError::InvalidConfig(format!(
            "primer of {} tokens is not shorter than the target length {total_len}",
            primer.len()
        )));
    }
    if !sampling.greedy && !(sampling.temperature > 0.0 && sampling.temperature.is_finite()) {
        return Err(GenerateError::InvalidConfig(format!(
            "temperature must be positive, got {}",
            sampling.temperature
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(total_len);
    out.extend_from_slice(primer);
    let inv_t = 1.0 / sampling.temperature;
    while out.len() < total_len {
        let mut p = model.distribution(&out);
        let next = if sampling.greedy {
            argmax(&p)
        } else {
            if inv_t != 1.0 {
                // Work relative to the largest probability so p^(1/T) cannot
                // underflow to an all-zero vector.
                let max = p.iter().copied().fold(0.0, f64::max);
                for v in p.iter_mut() {
                    *v = (*v / max).powf(inv_t);
                }
            }
            let total: f64 = p.iter().sum();
            let mut u = rng.gen::<f64>() * total;
            let mut pick = p.len() - 1;
            for (i, &v) in p.iter().enumerate() {
                if u < v {
                    pick = i;
                    break;
                }
                u -= v;
            }
            pick
        };
        out.push(next as TokenId);
    }
    Ok(out)
}
