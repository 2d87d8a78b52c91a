use super::tempo::DEFAULT_US_PER_QUARTER;
use super::vlq::write_vlq;
use super::{EventKind, Format, MidiDocument, NoteList, TimedEvent, Track};

/// Division used when rendering a note list. With the default tempo this is
/// 2000 ticks per second, so any 10 ms grid position lands on a whole tick.
pub const WRITE_PPQ: u16 = 1000;

/// Serializes a document. Channel messages use running status; the status
/// byte is repeated after any meta or system-exclusive event.
pub fn write_smf(doc: &MidiDocument) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(b"MThd");
    out.extend_from_slice(&6u32.to_be_bytes());
    out.extend_from_slice(&doc.format.code().to_be_bytes());
    out.extend_from_slice(&(doc.tracks.len() as u16).to_be_bytes());
    out.extend_from_slice(&doc.ticks_per_quarter.to_be_bytes());
    for track in &doc.tracks {
        let body = write_track(track);
        out.extend_from_slice(b"MTrk");
        out.extend_from_slice(&(body.len() as u32).to_be_bytes());
        out.extend_from_slice(&body);
    }
    out
}

fn write_track(track: &Track) -> Vec<u8> {
    let mut out = Vec::new();
    let mut running: Option<u8> = None;
    let mut ended = false;
    for ev in &track.events {
        write_vlq(ev.delta_ticks, &mut out);
        match &ev.kind {
            EventKind::NoteOn {
                channel,
                pitch,
                velocity,
            } => channel_msg(&mut out, &mut running, 0x90 | channel, &[*pitch, *velocity]),
            EventKind::NoteOff {
                channel,
                pitch,
                velocity,
            } => channel_msg(&mut out, &mut running, 0x80 | channel, &[*pitch, *velocity]),
            EventKind::ProgramChange { channel, program } => {
                channel_msg(&mut out, &mut running, 0xC0 | channel, &[*program])
            }
            EventKind::OtherChannel { status, data } => {
                channel_msg(&mut out, &mut running, *status, data)
            }
            EventKind::Tempo { us_per_quarter } => {
                let b = us_per_quarter.to_be_bytes();
                meta(&mut out, &mut running, 0x51, &b[1..]);
            }
            EventKind::OtherMeta { meta_type, data } => {
                meta(&mut out, &mut running, *meta_type, data)
            }
            EventKind::SysEx { status, data } => {
                out.push(*status);
                write_vlq(data.len() as u32, &mut out);
                out.extend_from_slice(data);
                running = None;
            }
            EventKind::EndOfTrack => {
                meta(&mut out, &mut running, 0x2F, &[]);
                ended = true;
                break;
            }
        }
    }
    if !ended {
        write_vlq(0, &mut out);
        meta(&mut out, &mut running, 0x2F, &[]);
    }
    out
}

fn channel_msg(out: &mut Vec<u8>, running: &mut Option<u8>, status: u8, data: &[u8]) {
    if *running != Some(status) {
        out.push(status);
        *running = Some(status);
    }
    out.extend(data.iter().map(|b| b & 0x7F));
}

fn meta(out: &mut Vec<u8>, running: &mut Option<u8>, meta_type: u8, data: &[u8]) {
    out.push(0xFF);
    out.push(meta_type);
    write_vlq(data.len() as u32, out);
    out.extend_from_slice(data);
    *running = None;
}

/// Renders a note list as a format 1 file: a tempo track followed by one
/// piano track (program 0) holding every note on channel 0.
///
/// At equal ticks NoteOff events precede NoteOn events so that a re-struck
/// pitch is not cut short.
pub fn notes_to_document(notes: &NoteList) -> MidiDocument {
    let ticks_per_s = 1e6 / f64::from(DEFAULT_US_PER_QUARTER) * f64::from(WRITE_PPQ);
    let to_tick = |s: f64| (s * ticks_per_s).round().max(0.0) as u64;

    let mut timeline: Vec<(u64, u8, u8, u8)> = Vec::with_capacity(notes.len() * 2);
    for n in &notes.notes {
        let start = to_tick(n.onset_s);
        let end = to_tick(n.end_s()).max(start + 1);
        timeline.push((start, 1, n.pitch, n.velocity.max(1)));
        timeline.push((end, 0, n.pitch, 0));
    }
    timeline.sort();
    let end_tick = to_tick(notes.total_duration_s).max(timeline.last().map_or(0, |e| e.0));

    let tempo_track = Track {
        events: vec![
            TimedEvent::new(
                0,
                EventKind::Tempo {
                    us_per_quarter: DEFAULT_US_PER_QUARTER,
                },
            ),
            TimedEvent::new(0, EventKind::EndOfTrack),
        ],
    };

    let mut events = vec![TimedEvent::new(
        0,
        EventKind::ProgramChange {
            channel: 0,
            program: 0,
        },
    )];
    let mut now = 0u64;
    for (tick, is_on, pitch, velocity) in timeline {
        let kind = if is_on == 1 {
            EventKind::NoteOn {
                channel: 0,
                pitch,
                velocity,
            }
        } else {
            EventKind::NoteOff {
                channel: 0,
                pitch,
                velocity: 0,
            }
        };
        events.push(TimedEvent::new((tick - now) as u32, kind));
        now = tick;
    }
    events.push(TimedEvent::new((end_tick - now) as u32, EventKind::EndOfTrack));

    MidiDocument {
        format: Format::Parallel,
        ticks_per_quarter: WRITE_PPQ,
        tracks: vec![tempo_track, Track { events }],
    }
}
