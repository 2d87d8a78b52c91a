//! Deterministic synthetic corpus used for tests and demos.
//!
//! Each piece is a small song in AABA form: a sustained chord pad, a walking
//! bass and a melody motif that is transposed along the chord progression.
//! Sections repeat with light variation, so the pieces carry real long-range
//! structure while the sustained pad makes note-off events frequent.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use structok_core::smf::{notes_to_document, write_smf, Note, NoteList};
use structok_core::stats::derive_seed;

use crate::manifest::{DatasetManifest, ManifestEntry, Split};

pub const DEFAULT_CORPUS_SEED: u64 = 0x5EED_2024;

/// File counts per split of the bundled corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusLayout {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

impl Default for CorpusLayout {
    fn default() -> Self {
        Self {
            train: 14,
            validation: 2,
            test: 10,
        }
    }
}

const MAJOR: [i32; 7] = [0, 2, 4, 5, 7, 9, 11];
const MINOR: [i32; 7] = [0, 2, 3, 5, 7, 8, 10];

const PROGRESSIONS: [[i32; 4]; 6] = [
    [0, 3, 4, 0],
    [0, 5, 3, 4],
    [0, 4, 5, 3],
    [5, 3, 0, 4],
    [0, 1, 4, 0],
    [3, 4, 0, 0],
];

/// Pitch of scale degree `degree` (any integer) above `root`.
fn degree_pitch(scale: &[i32; 7], root: i32, degree: i32) -> i32 {
    let octave = degree.div_euclid(7);
    root + 12 * octave + scale[degree.rem_euclid(7) as usize]
}

/// Seconds rounded to the 10 ms grid.
fn grid(s: f64) -> f64 {
    (s * 100.0).round() / 100.0
}

struct Motif {
    /// (offset in beats, length in beats, scale degree relative to chord root)
    notes: Vec<(f64, f64, i32)>,
}

fn motif(rng: &mut ChaCha8Rng) -> Motif {
    const LENGTHS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
    let mut notes = Vec::new();
    let mut t = 0.0;
    let mut degree: i32 = rng.gen_range(0..5);
    while t < 8.0 {
        let len = (*LENGTHS.choose(rng).unwrap()).min(8.0 - t);
        notes.push((t, len, degree));
        t += len;
        degree = (degree + rng.gen_range(-2..=2)).clamp(-2, 9);
    }
    Motif { notes }
}

/// One synthetic piece.
pub fn synth_piece(seed: u64) -> NoteList {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beat = [0.4, 0.5, 0.6][rng.gen_range(0..3)];
    let scale = if rng.gen_bool(0.5) { &MAJOR } else { &MINOR };
    let root = rng.gen_range(48..60);
    let sections = [
        (*PROGRESSIONS.choose(&mut rng).unwrap(), motif(&mut rng)),
        (*PROGRESSIONS.choose(&mut rng).unwrap(), motif(&mut rng)),
    ];
    let form = [0usize, 0, 1, 0];

    let mut notes = Vec::new();
    let mut bar_beat = 0.0;
    for (rep, &s) in form.iter().enumerate() {
        let (progression, motif) = &sections[s];
        for &chord in progression {
            let start = bar_beat * beat;
            // Pad: the triad held for a bar, struck twice per chord.
            for half in 0..2 {
                let onset = start + half as f64 * 4.0 * beat;
                for k in [0, 2, 4] {
                    let p = degree_pitch(scale, root + 12, chord + k);
                    notes.push(Note::new(grid(onset), grid(4.0 * beat - 0.05), p as u8, 56));
                }
            }
            // Bass: chord root every two beats.
            for b in 0..4 {
                let onset = start + b as f64 * 2.0 * beat;
                let p = degree_pitch(scale, root - 12, chord);
                notes.push(Note::new(grid(onset), grid(1.8 * beat), p as u8, 72));
            }
            // Melody: the section motif on this chord, lightly varied on repeats.
            for &(off, len, deg) in &motif.notes {
                let deg = if rep > 0 && rng.gen_bool(0.15) {
                    deg + rng.gen_range(-1..=1)
                } else {
                    deg
                };
                let p = degree_pitch(scale, root + 24, chord + deg);
                let vel = rng.gen_range(84..=100);
                notes.push(Note::new(
                    grid(start + off * beat),
                    grid(len * beat * 0.9),
                    p as u8,
                    vel,
                ));
            }
            bar_beat += 8.0;
        }
    }
    NoteList::new(notes, grid(bar_beat * beat))
}

/// Writes the corpus MIDI files and `manifest.json` into `dir`.
pub fn write_corpus(dir: &Path, layout: CorpusLayout, seed: u64) -> Result<DatasetManifest> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let splits = std::iter::repeat(Split::Train)
        .take(layout.train)
        .chain(std::iter::repeat(Split::Validation).take(layout.validation))
        .chain(std::iter::repeat(Split::Test).take(layout.test));
    let mut files = Vec::new();
    for (i, split) in splits.enumerate() {
        let name = format!("piece_{i:02}.mid");
        let notes = synth_piece(derive_seed(seed, &[i as u64]));
        let bytes = write_smf(&notes_to_document(&notes));
        fs::write(dir.join(&name), bytes).with_context(|| format!("writing {name}"))?;
        files.push(ManifestEntry { path: name, split });
    }
    let manifest = DatasetManifest {
        name: "mini".into(),
        files,
        kind: None,
        notes: Some(format!(
            "synthetic AABA songs with sustained pads, seed {seed:#x}"
        )),
    };
    manifest.save(&dir.join("manifest.json"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use structok_core::tokenizer::{encode, RepresentationKind};

    #[test]
    fn pieces_are_deterministic_and_long_enough() {
        let a = synth_piece(7);
        assert_eq!(a, synth_piece(7));
        assert_ne!(a, synth_piece(8));
        for kind in RepresentationKind::ALL {
            assert!(encode(&a, kind, "x").len() >= 256);
        }
    }

    #[test]
    fn explicit_is_shorter() {
        let n = synth_piece(11);
        let on = encode(&n, RepresentationKind::OnOff, "x").len();
        let ex = encode(&n, RepresentationKind::ExplicitDuration, "x").len();
        assert!(ex < on, "{ex} vs {on}");
    }
}
