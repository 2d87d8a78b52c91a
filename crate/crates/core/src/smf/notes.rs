use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::tempo::build_tempo_map;
use super::{EventKind, MidiDocument};

/// MIDI channel 10 (zero-based 9) carries General MIDI percussion.
pub const PERCUSSION_CHANNEL: u8 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Note {
    pub onset_s: f64,
    pub duration_s: f64,
    pub pitch: u8,
    pub velocity: u8,
}

impl Note {
    pub fn new(onset_s: f64, duration_s: f64, pitch: u8, velocity: u8) -> Self {
        Self {
            onset_s,
            duration_s,
            pitch,
            velocity,
        }
    }

    pub fn end_s(&self) -> f64 {
        self.onset_s + self.duration_s
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.onset_s
            .total_cmp(&other.onset_s)
            .then(self.pitch.cmp(&other.pitch))
            .then(self.duration_s.total_cmp(&other.duration_s))
            .then(self.velocity.cmp(&other.velocity))
    }
}

/// A flat, single-instrument list of notes in seconds.
///
/// Notes are kept sorted by onset, then pitch (duration and velocity break
/// the remaining ties), and `total_duration_s` is never shorter than the last
/// note end.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NoteList {
    pub notes: Vec<Note>,
    pub total_duration_s: f64,
}

impl NoteList {
    pub fn new(mut notes: Vec<Note>, total_duration_s: f64) -> Self {
        notes.sort_by(Note::canonical_cmp);
        let last_end = notes.iter().map(Note::end_s).fold(0.0, f64::max);
        Self {
            notes,
            total_duration_s: total_duration_s.max(last_end),
        }
    }

    pub fn from_notes(notes: Vec<Note>) -> Self {
        Self::new(notes, 0.0)
    }

    pub fn len(&self) -> usize {
        self.notes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.notes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Note> {
        self.notes.iter()
    }
}

/// Anomalies met while flattening a document into notes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExtractWarnings {
    /// NoteOff with no sounding note of that channel and pitch.
    pub unmatched_note_offs: usize,
    /// NoteOn still open at the end of the file, closed at the final event time.
    pub unclosed_note_ons: usize,
    /// Notes whose start and end fell on the same tick; these are dropped.
    pub zero_length_notes: usize,
    /// Note events on the percussion channel, discarded.
    pub percussion_events: usize,
}

impl ExtractWarnings {
    pub fn total(&self) -> usize {
        self.unmatched_note_offs + self.unclosed_note_ons + self.zero_length_notes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub notes: NoteList,
    pub warnings: ExtractWarnings,
}

/// Merges every track into one percussion-free note list.
///
/// NoteOn/NoteOff pairs are matched per (channel, pitch) in first-in
/// first-out order across all tracks, with events at equal ticks taken in
/// track order. Notes left open are closed at the last event of the file.
/// Stored velocities are clamped to at least 1.
pub fn extract_notes(doc: &MidiDocument) -> Extraction {
    let map = build_tempo_map(doc);
    let ppq = doc.ticks_per_quarter;
    let mut warnings = ExtractWarnings::default();

    let mut events: Vec<(u64, usize, usize, bool, u8, u8, u8)> = Vec::new();
    for (ti, track) in doc.tracks.iter().enumerate() {
        for (ei, (tick, ev)) in track.absolute().enumerate() {
            let (on, channel, pitch, velocity) = match ev.kind {
                EventKind::NoteOn {
                    channel,
                    pitch,
                    velocity,
                } => (velocity > 0, channel, pitch, velocity),
                EventKind::NoteOff { channel, pitch, .. } => (false, channel, pitch, 0),
                _ => continue,
            };
            if channel == PERCUSSION_CHANNEL {
                warnings.percussion_events += 1;
                continue;
            }
            events.push((tick, ti, ei, on, channel, pitch, velocity));
        }
    }
    events.sort_by_key(|&(tick, ti, ei, ..)| (tick, ti, ei));

    let mut open: BTreeMap<(u8, u8), VecDeque<(u64, u8)>> = BTreeMap::new();
    let mut spans: Vec<(u64, u64, u8, u8)> = Vec::new();
    for (tick, _, _, on, channel, pitch, velocity) in events {
        let queue = open.entry((channel, pitch)).or_default();
        if on {
            queue.push_back((tick, velocity));
        } else if let Some((start, vel)) = queue.pop_front() {
            if tick > start {
                spans.push((start, tick, pitch, vel));
            } else {
                warnings.zero_length_notes += 1;
            }
        } else {
            warnings.unmatched_note_offs += 1;
        }
    }

    let end_tick = doc.end_tick();
    for ((_, pitch), queue) in open {
        for (start, vel) in queue {
            warnings.unclosed_note_ons += 1;
            if end_tick > start {
                spans.push((start, end_tick, pitch, vel));
            } else {
                warnings.zero_length_notes += 1;
            }
        }
    }

    let notes = spans
        .into_iter()
        .map(|(start, end, pitch, vel)| {
            let onset = map.seconds_at(start, ppq);
            let offset = map.seconds_at(end, ppq);
            Note::new(onset, offset - onset, pitch, vel.max(1))
        })
        .collect();

    Extraction {
        notes: NoteList::new(notes, map.seconds_at(end_tick, ppq)),
        warnings,
    }
}
