use serde::Serialize;

use super::MetricError;
use crate::smf::NoteList;

pub const PITCH_CLASSES: usize = 12;
/// Additive smoothing applied to window histograms before KL divergence.
pub const KL_EPSILON: f64 = 1e-6;
pub const DEFAULT_WINDOWS: usize = 10;

/// Onset-count pitch-class distribution. All zeros when built from no notes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PitchClassHistogram {
    pub p: [f64; PITCH_CLASSES],
}

impl PitchClassHistogram {
    pub fn from_counts(counts: &[u64; PITCH_CLASSES]) -> Self {
        let total: u64 = counts.iter().sum();
        let mut p = [0.0; PITCH_CLASSES];
        if total > 0 {
            for (pi, &c) in p.iter_mut().zip(counts) {
                *pi = c as f64 / total as f64;
            }
        }
        Self { p }
    }

    pub fn is_empty(&self) -> bool {
        self.p.iter().all(|&v| v == 0.0)
    }

    /// Adds `epsilon` to every class and renormalizes.
    pub fn smoothed(&self, epsilon: f64) -> Self {
        let total: f64 = self.p.iter().map(|v| v + epsilon).sum();
        let mut p = self.p;
        for v in &mut p {
            *v = (*v + epsilon) / total;
        }
        Self { p }
    }
}

fn class_counts<'a>(notes: impl IntoIterator<Item = &'a crate::smf::Note>) -> [u64; PITCH_CLASSES] {
    let mut counts = [0u64; PITCH_CLASSES];
    for n in notes {
        counts[usize::from(n.pitch) % PITCH_CLASSES] += 1;
    }
    counts
}

pub fn pitch_class_histogram(notes: &NoteList) -> PitchClassHistogram {
    PitchClassHistogram::from_counts(&class_counts(notes.iter()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entropy {
    pub bits: f64,
    /// Set when the histogram was all zeros; `bits` is then 0.
    pub empty: bool,
}

/// Shannon entropy of the histogram in bits.
pub fn pitch_class_entropy(h: &PitchClassHistogram) -> Entropy {
    if h.is_empty() {
        return Entropy {
            bits: 0.0,
            empty: true,
        };
    }
    let bits = -h
        .p
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.log2())
        .sum::<f64>();
    Entropy {
        bits: bits.max(0.0),
        empty: false,
    }
}

/// KL(p ‖ q) in bits. `q` must be strictly positive wherever `p` is.
pub fn kl_divergence_bits(p: &PitchClassHistogram, q: &PitchClassHistogram) -> f64 {
    p.p.iter()
        .zip(&q.p)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| a * (a / b).log2())
        .sum()
}

/// Mean KL divergence between consecutive non-empty windows.
///
/// The piece is cut into `windows` windows of equal duration and notes are
/// assigned by onset. Each window histogram is smoothed with [`KL_EPSILON`]
/// and the divergence is taken in the forward direction, window t against
/// window t + 1. Lower means more tonally consistent.
pub fn pitch_class_consistency(notes: &NoteList, windows: usize) -> Result<f64, MetricError> {
    if windows < 2 {
        return Err(MetricError::InvalidParameter(format!(
            "consistency needs at least 2 windows, got {windows}"
        )));
    }
    let duration = notes.total_duration_s;
    if !(duration > 0.0) {
        return Err(MetricError::InsufficientContent);
    }
    let mut counts = vec![[0u64; PITCH_CLASSES]; windows];
    for n in notes.iter() {
        let w = ((n.onset_s / duration * windows as f64).floor() as usize).min(windows - 1);
        counts[w][usize::from(n.pitch) % PITCH_CLASSES] += 1;
    }
    let hists: Vec<PitchClassHistogram> = counts
        .iter()
        .map(PitchClassHistogram::from_counts)
        .filter(|h| !h.is_empty())
        .map(|h| h.smoothed(KL_EPSILON))
        .collect();
    if hists.len() < 2 {
        return Err(MetricError::InsufficientContent);
    }
    let total: f64 = hists
        .windows(2)
        .map(|w| kl_divergence_bits(&w[0], &w[1]))
        .sum();
    Ok((total / (hists.len() - 1) as f64).max(0.0))
}
