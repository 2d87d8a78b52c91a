use serde::Serialize;

use super::pitch::PITCH_CLASSES;
use crate::smf::NoteList;

pub const DEFAULT_FRAME_RATE: f64 = 10.0;

/// Tolerance for frame-boundary arithmetic so that onsets on the frame grid
/// land in the frame they start rather than the one before.
const EDGE_EPS: f64 = 1e-9;

/// Per-frame pitch-class activity, each frame L2-normalized or all zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chromagram {
    pub frame_rate: f64,
    pub frames: Vec<[f64; PITCH_CLASSES]>,
}

fn normalize(v: &mut [f64; PITCH_CLASSES]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

pub fn frame_count(duration_s: f64, frame_rate: f64) -> usize {
    (duration_s * frame_rate - EDGE_EPS).ceil().max(0.0) as usize
}

/// Counts, per frame and pitch class, the notes sounding in
/// `[f / r, (f + 1) / r)`.
pub fn chromagram(notes: &NoteList, frame_rate: f64) -> Chromagram {
    assert!(frame_rate > 0.0, "frame rate must be positive");
    let n = frame_count(notes.total_duration_s, frame_rate);
    let mut frames = vec![[0.0; PITCH_CLASSES]; n];
    for note in notes.iter() {
        let first = (note.onset_s * frame_rate + EDGE_EPS).floor().max(0.0) as usize;
        let last = ((note.end_s() * frame_rate - EDGE_EPS).ceil().max(0.0) as usize).min(n);
        let pc = usize::from(note.pitch) % PITCH_CLASSES;
        for frame in frames.iter_mut().take(last).skip(first) {
            frame[pc] += 1.0;
        }
    }
    frames.iter_mut().for_each(normalize);
    Chromagram { frame_rate, frames }
}

impl Chromagram {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Sums blocks of `factor` frames (the last block may be partial) and
    /// renormalizes, giving a chromagram at `frame_rate / factor`.
    pub fn downsample(&self, factor: usize) -> Chromagram {
        assert!(factor >= 1, "downsample factor must be at least 1");
        if factor == 1 {
            return self.clone();
        }
        let frames = self
            .frames
            .chunks(factor)
            .map(|block| {
                let mut acc = [0.0; PITCH_CLASSES];
                for f in block {
                    for (a, v) in acc.iter_mut().zip(f) {
                        *a += v;
                    }
                }
                normalize(&mut acc);
                acc
            })
            .collect();
        Chromagram {
            frame_rate: self.frame_rate / factor as f64,
            frames,
        }
    }
}
