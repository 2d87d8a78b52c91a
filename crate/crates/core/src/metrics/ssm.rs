use serde::Serialize;

use super::chroma::Chromagram;

/// Square similarity matrix over chroma frames, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ssm {
    n: usize,
    pub frame_rate: f64,
    data: Vec<f64>,
}

impl Ssm {
    pub fn from_fn(n: usize, frame_rate: f64, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self {
            n,
            frame_rate,
            data,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>], frame_rate: f64) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self::from_fn(n, frame_rate, |i, j| rows[i][j])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Cosine similarity between every pair of frames. Pairs involving a silent
/// frame are 0.
pub fn compute_ssm(c: &Chromagram) -> Ssm {
    let frames = &c.frames;
    let nonzero: Vec<bool> = frames.iter().map(|f| f.iter().any(|&v| v > 0.0)).collect();
    Ssm::from_fn(frames.len(), c.frame_rate, |i, j| {
        if !nonzero[i] || !nonzero[j] {
            0.0
        } else if i == j || frames[i] == frames[j] {
            1.0
        } else {
            let dot: f64 = frames[i].iter().zip(&frames[j]).map(|(a, b)| a * b).sum();
            dot.clamp(0.0, 1.0)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct EnhanceParams {
    /// Diagonal smoothing window in seconds.
    pub smooth_s: f64,
    /// Fraction of cells kept by the threshold.
    pub keep_fraction: f64,
    /// Value assigned to discarded cells.
    pub penalty: f64,
}

impl Default for EnhanceParams {
    fn default() -> Self {
        Self {
            smooth_s: 2.0,
            keep_fraction: 0.2,
            penalty: -2.0,
        }
    }
}

/// Diagonal smoothing, thresholding and rescaling.
///
/// Each cell becomes the mean of the forward and backward diagonal moving
/// averages over `round(smooth_s * frame_rate)` frames (windows truncated at
/// the matrix edge). Cells below the `keep_fraction` upper quantile, or not
/// positive, become `penalty`; the rest are min-max rescaled to [0, 1], with a
/// constant kept set mapping to 1.
pub fn enhance_ssm(s: &Ssm, params: &EnhanceParams) -> Ssm {
    let n = s.n;
    let window = ((params.smooth_s * s.frame_rate).round() as usize).max(1);
    let smoothed = Ssm::from_fn(n, s.frame_rate, |i, j| {
        let fwd_len = window.min(n - i).min(n - j);
        let fwd: f64 = (0..fwd_len).map(|k| s.get(i + k, j + k)).sum::<f64>() / fwd_len as f64;
        let bwd_len = window.min(i + 1).min(j + 1);
        let bwd: f64 = (0..bwd_len).map(|k| s.get(i - k, j - k)).sum::<f64>() / bwd_len as f64;
        (fwd + bwd) / 2.0
    });
    if n == 0 {
        return smoothed;
    }

    let mut sorted = smoothed.data.clone();
    sorted.sort_by(f64::total_cmp);
    let keep = params.keep_fraction.clamp(0.0, 1.0);
    let cut = (((1.0 - keep) * sorted.len() as f64).floor() as usize).min(sorted.len() - 1);
    let threshold = sorted[cut];
    let kept = |v: f64| v >= threshold && v > 0.0;

    let (lo, hi) = smoothed
        .data
        .iter()
        .copied()
        .filter(|&v| kept(v))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let data = smoothed
        .data
        .iter()
        .map(|&v| {
            if !kept(v) {
                params.penalty
            } else if hi > lo {
                ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
            } else {
                1.0
            }
        })
        .collect();
    Ssm {
        n,
        frame_rate: s.frame_rate,
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::chroma::chromagram;
    use crate::smf::{Note, NoteList};

    #[test]
    fn identical_frames_all_ones() {
        let c = chromagram(&NoteList::from_notes(vec![Note::new(0.0, 1.0, 60, 64)]), 10.0);
        let s = compute_ssm(&c);
        assert!(s.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn orthogonal_frames() {
        let notes: Vec<Note> = (0..4).map(|i| Note::new(i as f64 * 0.1, 0.1, 60 + i, 64)).collect();
        let s = compute_ssm(&chromagram(&NoteList::from_notes(notes), 10.0));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn constant_one_stays_one() {
        let s = Ssm::from_fn(12, 2.0, |_, _| 1.0);
        let e = enhance_ssm(&s, &EnhanceParams::default());
        assert!(e.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn all_zero_becomes_penalty() {
        let s = Ssm::from_fn(12, 2.0, |_, _| 0.0);
        let e = enhance_ssm(&s, &EnhanceParams::default());
        assert!(e.values().iter().all(|&v| v == -2.0));
    }

    #[test]
    fn diagonal_in_noise_survives() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 40;
        let noise: Vec<f64> = (0..n * n).map(|_| rng.gen_range(0.0..0.3)).collect();
        let s = Ssm::from_fn(n, 2.0, |i, j| {
            if i == j {
                1.0
            } else {
                let (a, b) = (i.min(j), i.max(j));
                noise[a * n + b]
            }
        });
        let e = enhance_ssm(&s, &EnhanceParams::default());
        for i in 0..n {
            assert!(e.get(i, i) > 0.5, "diagonal {i} = {}", e.get(i, i));
        }
        let far_penalized = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i.abs_diff(j) > 6)
            .filter(|&(i, j)| e.get(i, j) == -2.0)
            .count();
        let far_total = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i.abs_diff(j) > 6)
            .count();
        assert!(far_penalized * 10 >= far_total * 8, "{far_penalized}/{far_total}");
    }
}
