//! Standard MIDI File reading and writing, plus the flattening step that turns
//! a multi-track file into one percussion-free list of notes in seconds.
//!
//! Only PPQ (ticks per quarter note) division is supported. Files with SMPTE
//! division or format 2 are rejected at parse time.

mod notes;
mod parse;
mod tempo;
mod vlq;
mod write;

pub use notes::{extract_notes, ExtractWarnings, Extraction, Note, NoteList, PERCUSSION_CHANNEL};
pub use parse::parse_smf;
pub use tempo::{build_tempo_map, ticks_to_seconds, TempoChange, TempoMap, DEFAULT_US_PER_QUARTER};
pub use vlq::{read_vlq, write_vlq, VLQ_MAX};
pub use write::{notes_to_document, write_smf, WRITE_PPQ};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmfError {
    #[error("unexpected end of data")]
    UnexpectedEof,
    #[error("variable-length quantity longer than 4 bytes")]
    MalformedVlq,
    #[error("missing MThd header chunk")]
    MissingHeader,
    #[error("SMPTE time division {0:#06x} is not supported")]
    UnsupportedDivision(u16),
    #[error("MIDI format {0} is not supported")]
    UnsupportedFormat(u16),
    #[error("data byte {byte:#04x} at offset {offset} with no running status")]
    MissingRunningStatus { byte: u8, offset: usize },
    #[error("status byte {byte:#04x} at offset {offset} is not valid inside a track")]
    InvalidStatus { byte: u8, offset: usize },
}

/// SMF format word. Format 2 (sequential tracks) is not represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Format 0: a single multi-channel track.
    Single,
    /// Format 1: simultaneous tracks sharing one tempo map.
    Parallel,
}

impl Format {
    pub fn code(self) -> u16 {
        match self {
            Format::Single => 0,
            Format::Parallel => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    NoteOn { channel: u8, pitch: u8, velocity: u8 },
    NoteOff { channel: u8, pitch: u8, velocity: u8 },
    Tempo { us_per_quarter: u32 },
    ProgramChange { channel: u8, program: u8 },
    /// Any other channel voice message; `status` keeps the channel nibble.
    OtherChannel { status: u8, data: Vec<u8> },
    /// Any meta event other than tempo and end-of-track.
    OtherMeta { meta_type: u8, data: Vec<u8> },
    /// `F0` or `F7` system exclusive payload, carried uninterpreted.
    SysEx { status: u8, data: Vec<u8> },
    EndOfTrack,
}

impl EventKind {
    pub fn channel(&self) -> Option<u8> {
        match *self {
            EventKind::NoteOn { channel, .. }
            | EventKind::NoteOff { channel, .. }
            | EventKind::ProgramChange { channel, .. } => Some(channel),
            EventKind::OtherChannel { status, .. } => Some(status & 0x0F),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedEvent {
    pub delta_ticks: u32,
    pub kind: EventKind,
}

impl TimedEvent {
    pub fn new(delta_ticks: u32, kind: EventKind) -> Self {
        Self { delta_ticks, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Track {
    pub events: Vec<TimedEvent>,
}

impl Track {
    /// Events paired with their absolute tick positions.
    pub fn absolute(&self) -> impl Iterator<Item = (u64, &TimedEvent)> {
        self.events.iter().scan(0u64, |tick, ev| {
            *tick += u64::from(ev.delta_ticks);
            Some((*tick, ev))
        })
    }

    /// Absolute tick of the last event (normally the end-of-track marker).
    pub fn end_tick(&self) -> u64 {
        self.events.iter().map(|e| u64::from(e.delta_ticks)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MidiDocument {
    pub format: Format,
    pub ticks_per_quarter: u16,
    pub tracks: Vec<Track>,
}

impl MidiDocument {
    /// Latest absolute tick over all tracks.
    pub fn end_tick(&self) -> u64 {
        self.tracks.iter().map(Track::end_tick).max().unwrap_or(0)
    }
}
