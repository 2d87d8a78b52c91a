use super::vlq::read_vlq;
use super::{EventKind, Format, MidiDocument, SmfError, TimedEvent, Track};

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], SmfError> {
        if self.remaining() < n {
            return Err(SmfError::UnexpectedEof);
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, SmfError> {
        Ok(self.take(1)?[0])
    }

    fn peek(&self) -> Result<u8, SmfError> {
        self.data.get(self.pos).copied().ok_or(SmfError::UnexpectedEof)
    }

    fn u32(&mut self) -> Result<u32, SmfError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn vlq(&mut self) -> Result<u32, SmfError> {
        let (v, used) = read_vlq(&self.data[self.pos..])?;
        self.pos += used;
        Ok(v)
    }
}

/// Decodes a format 0 or 1 Standard MIDI File.
///
/// Running status is honoured for channel messages, chunks other than `MTrk`
/// are skipped by their declared length, and a NoteOn with velocity 0 comes
/// back as a NoteOff. A track whose data ends without an end-of-track marker
/// gets one appended; anything after the marker is discarded.
pub fn parse_smf(bytes: &[u8]) -> Result<MidiDocument, SmfError> {
    let mut cur = Cursor::new(bytes);
    if cur.remaining() < 8 || cur.take(4)? != b"MThd" {
        return Err(SmfError::MissingHeader);
    }
    let header_len = cur.u32()? as usize;
    if header_len < 6 {
        return Err(SmfError::MissingHeader);
    }
    let header = cur.take(header_len)?;
    let format_code = u16::from_be_bytes([header[0], header[1]]);
    let ntracks = u16::from_be_bytes([header[2], header[3]]) as usize;
    let division = u16::from_be_bytes([header[4], header[5]]);
    let format = match format_code {
        0 => Format::Single,
        1 => Format::Parallel,
        other => return Err(SmfError::UnsupportedFormat(other)),
    };
    if division & 0x8000 != 0 {
        return Err(SmfError::UnsupportedDivision(division));
    }
    if division == 0 {
        return Err(SmfError::UnsupportedDivision(division));
    }

    let mut tracks = Vec::with_capacity(ntracks);
    while tracks.len() < ntracks {
        if cur.remaining() < 8 {
            return Err(SmfError::UnexpectedEof);
        }
        let id = cur.take(4)?;
        let len = cur.u32()? as usize;
        let body = cur.take(len)?;
        if id == b"MTrk" {
            tracks.push(parse_track(body, cur.pos - len)?);
        }
    }

    Ok(MidiDocument {
        format,
        ticks_per_quarter: division,
        tracks,
    })
}

fn channel_data_len(status: u8) -> usize {
    match status & 0xF0 {
        0xC0 | 0xD0 => 1,
        _ => 2,
    }
}

fn parse_track(body: &[u8], base: usize) -> Result<Track, SmfError> {
    let mut cur = Cursor::new(body);
    let mut events = Vec::new();
    let mut running: Option<u8> = None;
    let mut ended = false;

    while cur.remaining() > 0 {
        let delta = cur.vlq()?;
        let offset = base + cur.pos;
        let first = cur.peek()?;
        let kind = if first < 0x80 {
            let status = running.ok_or(SmfError::MissingRunningStatus {
                byte: first,
                offset,
            })?;
            channel_event(status, &mut cur)?
        } else {
            cur.pos += 1;
            match first {
                0xFF => {
                    let meta_type = cur.u8()?;
                    let len = cur.vlq()? as usize;
                    let data = cur.take(len)?;
                    match meta_type {
                        0x2F => EventKind::EndOfTrack,
                        0x51 if len == 3 => EventKind::Tempo {
                            us_per_quarter: u32::from_be_bytes([0, data[0], data[1], data[2]]),
                        },
                        _ => EventKind::OtherMeta {
                            meta_type,
                            data: data.to_vec(),
                        },
                    }
                }
                0xF0 | 0xF7 => {
                    let len = cur.vlq()? as usize;
                    EventKind::SysEx {
                        status: first,
                        data: cur.take(len)?.to_vec(),
                    }
                }
                0x80..=0xEF => {
                    running = Some(first);
                    channel_event(first, &mut cur)?
                }
                _ => return Err(SmfError::InvalidStatus { byte: first, offset }),
            }
        };
        let is_end = kind == EventKind::EndOfTrack;
        events.push(TimedEvent::new(delta, kind));
        if is_end {
            ended = true;
            break;
        }
    }
    if !ended {
        events.push(TimedEvent::new(0, EventKind::EndOfTrack));
    }
    Ok(Track { events })
}

fn channel_event(status: u8, cur: &mut Cursor<'_>) -> Result<EventKind, SmfError> {
    let data = cur.take(channel_data_len(status))?;
    let channel = status & 0x0F;
    Ok(match status & 0xF0 {
        0x80 => EventKind::NoteOff {
            channel,
            pitch: data[0] & 0x7F,
            velocity: data[1] & 0x7F,
        },
        0x90 if data[1] == 0 => EventKind::NoteOff {
            channel,
            pitch: data[0] & 0x7F,
            velocity: 0,
        },
        0x90 => EventKind::NoteOn {
            channel,
            pitch: data[0] & 0x7F,
            velocity: data[1] & 0x7F,
        },
        0xC0 => EventKind::ProgramChange {
            channel,
            program: data[0] & 0x7F,
        },
        _ => EventKind::OtherChannel {
            status,
            data: data.to_vec(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(format: u16, ntracks: u16, division: u16) -> Vec<u8> {
        let mut v = b"MThd".to_vec();
        v.extend_from_slice(&6u32.to_be_bytes());
        v.extend_from_slice(&format.to_be_bytes());
        v.extend_from_slice(&ntracks.to_be_bytes());
        v.extend_from_slice(&division.to_be_bytes());
        v
    }

    fn chunk(id: &[u8; 4], body: &[u8]) -> Vec<u8> {
        let mut v = id.to_vec();
        v.extend_from_slice(&(body.len() as u32).to_be_bytes());
        v.extend_from_slice(body);
        v
    }

    #[test]
    fn minimal_file_has_one_empty_track() {
        let mut bytes = header(0, 1, 480);
        bytes.extend(chunk(b"MTrk", &[0x00, 0xFF, 0x2F, 0x00]));
        let doc = parse_smf(&bytes).unwrap();
        assert_eq!(doc.format, Format::Single);
        assert_eq!(doc.ticks_per_quarter, 480);
        assert_eq!(doc.tracks.len(), 1);
        assert_eq!(doc.tracks[0].events, vec![TimedEvent::new(0, EventKind::EndOfTrack)]);
    }

    #[test]
    fn velocity_zero_note_on_becomes_note_off() {
        let mut bytes = header(0, 1, 480);
        // NoteOn(60, 80) at 0, NoteOn(60, 0) at 480 via running status.
        bytes.extend(chunk(
            b"MTrk",
            &[0x00, 0x90, 60, 80, 0x83, 0x60, 60, 0, 0x00, 0xFF, 0x2F, 0x00],
        ));
        let doc = parse_smf(&bytes).unwrap();
        let ev = &doc.tracks[0].events;
        assert_eq!(
            ev[0],
            TimedEvent::new(0, EventKind::NoteOn { channel: 0, pitch: 60, velocity: 80 })
        );
        assert_eq!(
            ev[1],
            TimedEvent::new(480, EventKind::NoteOff { channel: 0, pitch: 60, velocity: 0 })
        );
    }

    #[test]
    fn running_status_survives_meta_events() {
        let mut bytes = header(0, 1, 96);
        bytes.extend(chunk(
            b"MTrk",
            &[
                0x00, 0x91, 64, 90, // NoteOn ch1
                0x00, 0xFF, 0x01, 0x01, b'x', // text meta
                0x10, 64, 0, // running NoteOn v0
                0x00, 0xFF, 0x2F, 0x00,
            ],
        ));
        let doc = parse_smf(&bytes).unwrap();
        assert_eq!(
            doc.tracks[0].events[2].kind,
            EventKind::NoteOff { channel: 1, pitch: 64, velocity: 0 }
        );
    }

    #[test]
    fn smpte_division_rejected() {
        let mut bytes = header(0, 1, 0xE728);
        bytes.extend(chunk(b"MTrk", &[0x00, 0xFF, 0x2F, 0x00]));
        assert_eq!(parse_smf(&bytes), Err(SmfError::UnsupportedDivision(0xE728)));
    }

    #[test]
    fn format_two_rejected() {
        let mut bytes = header(2, 1, 480);
        bytes.extend(chunk(b"MTrk", &[0x00, 0xFF, 0x2F, 0x00]));
        assert_eq!(parse_smf(&bytes), Err(SmfError::UnsupportedFormat(2)));
    }

    #[test]
    fn truncated_chunk_is_eof() {
        let mut bytes = header(0, 1, 480);
        bytes.extend(chunk(b"MTrk", &[0x00, 0x90, 60, 80, 0x00, 0xFF, 0x2F, 0x00]));
        bytes.truncate(bytes.len() - 3);
        assert_eq!(parse_smf(&bytes), Err(SmfError::UnexpectedEof));
    }

    #[test]
    fn truncated_event_inside_chunk_is_eof() {
        let mut bytes = header(0, 1, 480);
        bytes.extend(chunk(b"MTrk", &[0x00, 0x90, 60]));
        assert_eq!(parse_smf(&bytes), Err(SmfError::UnexpectedEof));
    }

    #[test]
    fn unknown_chunks_are_skipped() {
        let mut bytes = header(0, 1, 480);
        bytes.extend(chunk(b"XFIH", &[1, 2, 3, 4, 5]));
        bytes.extend(chunk(b"MTrk", &[0x00, 0xC0, 5, 0x00, 0xFF, 0x2F, 0x00]));
        let doc = parse_smf(&bytes).unwrap();
        assert_eq!(
            doc.tracks[0].events[0].kind,
            EventKind::ProgramChange { channel: 0, program: 5 }
        );
    }

    #[test]
    fn missing_end_of_track_is_appended() {
        let mut bytes = header(0, 1, 480);
        bytes.extend(chunk(b"MTrk", &[0x00, 0x90, 60, 80]));
        let doc = parse_smf(&bytes).unwrap();
        assert_eq!(doc.tracks[0].events.last().unwrap().kind, EventKind::EndOfTrack);
    }

    #[test]
    fn data_byte_without_running_status() {
        let mut bytes = header(0, 1, 480);
        bytes.extend(chunk(b"MTrk", &[0x00, 60, 80, 0x00, 0xFF, 0x2F, 0x00]));
        assert!(matches!(
            parse_smf(&bytes),
            Err(SmfError::MissingRunningStatus { byte: 60, .. })
        ));
    }

    #[test]
    fn not_a_midi_file() {
        assert_eq!(parse_smf(b"RIFF0000WAVE"), Err(SmfError::MissingHeader));
        assert_eq!(parse_smf(b""), Err(SmfError::MissingHeader));
    }

    #[test]
    fn sysex_and_other_channel_messages_are_kept() {
        let mut bytes = header(0, 1, 480);
        bytes.extend(chunk(
            b"MTrk",
            &[
                0x00, 0xF0, 0x03, 0x7E, 0x7F, 0xF7, // sysex
                0x00, 0xB2, 7, 100, // controller on ch2
                0x00, 0xE2, 0, 64, // pitch bend
                0x00, 0xFF, 0x2F, 0x00,
            ],
        ));
        let doc = parse_smf(&bytes).unwrap();
        let ev = &doc.tracks[0].events;
        assert_eq!(ev[0].kind, EventKind::SysEx { status: 0xF0, data: vec![0x7E, 0x7F, 0xF7] });
        assert_eq!(ev[1].kind, EventKind::OtherChannel { status: 0xB2, data: vec![7, 100] });
        assert_eq!(ev[2].kind.channel(), Some(2));
    }
}
