use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::quantize::{
    dequantize_velocity, duration_bin_steps, quantize_duration, quantize_velocity,
    seconds_to_steps, steps_to_seconds, time_shift_steps, DEFAULT_VELOCITY_BIN,
};
use super::vocab::{Family, RepresentationKind, TokenId, Vocabulary};
use super::TokenSequence;
use crate::smf::{Note, NoteList};

struct Emitter<'a> {
    vocab: &'a Vocabulary,
    ids: Vec<TokenId>,
    clock: u64,
    velocity: Option<u8>,
}

impl<'a> Emitter<'a> {
    fn new(vocab: &'a Vocabulary) -> Self {
        Self {
            vocab,
            ids: Vec::new(),
            clock: 0,
            velocity: None,
        }
    }

    fn push(&mut self, family: Family, index: u16) {
        self.ids.push(self.vocab.id_of(family, index));
    }

    fn advance_to(&mut self, step: u64) {
        for shift in time_shift_steps(step - self.clock) {
            self.push(Family::TimeShift, u16::from(shift));
        }
        self.clock = step;
    }

    fn note_on(&mut self, pitch: u8, velocity_bin: u8) {
        if self.velocity != Some(velocity_bin) {
            self.push(Family::Velocity, u16::from(velocity_bin));
            self.velocity = Some(velocity_bin);
        }
        self.push(Family::NoteOn, u16::from(pitch.min(127)));
    }
}

/// Tokenizes a note list.
///
/// Onsets are snapped to the 10 ms grid. Under [`RepresentationKind::OnOff`]
/// each note contributes a NOTE_ON at its onset and a NOTE_OFF one rounded
/// duration later (at least one step); at equal times NOTE_OFF events come
/// first and each group is ordered by pitch. Under
/// [`RepresentationKind::ExplicitDuration`] each onset emits NOTE_ON followed
/// immediately by its DURATION bin. In both notations a VELOCITY token
/// precedes a NOTE_ON only when the velocity bin changes.
pub fn encode(notes: &NoteList, kind: RepresentationKind, source: impl Into<String>) -> TokenSequence {
    let vocab = Vocabulary::new(kind);
    let mut em = Emitter::new(&vocab);

    match kind {
        RepresentationKind::OnOff => {
            // (time, 0 = off / 1 = on, pitch, velocity bin)
            let mut events: Vec<(u64, u8, u8, u8)> = Vec::with_capacity(notes.len() * 2);
            for n in notes.iter() {
                let start = seconds_to_steps(n.onset_s);
                let length = seconds_to_steps(n.duration_s).max(1);
                let bin = quantize_velocity(n.velocity);
                events.push((start, 1, n.pitch, bin));
                events.push((start + length, 0, n.pitch, bin));
            }
            events.sort_by_key(|&(t, order, pitch, _)| (t, order, pitch));
            for (t, order, pitch, bin) in events {
                em.advance_to(t);
                if order == 1 {
                    em.note_on(pitch, bin);
                } else {
                    em.push(Family::NoteOff, u16::from(pitch.min(127)));
                }
            }
        }
        RepresentationKind::ExplicitDuration => {
            let mut starts: Vec<(u64, u8, u8, u8)> = notes
                .iter()
                .map(|n| {
                    (
                        seconds_to_steps(n.onset_s),
                        n.pitch,
                        quantize_duration(n.duration_s),
                        quantize_velocity(n.velocity),
                    )
                })
                .collect();
            starts.sort();
            for (t, pitch, duration_bin, bin) in starts {
                em.advance_to(t);
                em.note_on(pitch, bin);
                em.push(Family::Duration, u16::from(duration_bin));
            }
        }
    }

    TokenSequence {
        kind,
        ids: em.ids,
        source: source.into(),
    }
}

/// Irregularities tolerated while decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecodeAnomalies {
    /// Ids outside the vocabulary, skipped.
    pub invalid_ids: usize,
    /// NOTE_OFF with no sounding note of that pitch, ignored.
    pub orphan_note_offs: usize,
    /// NOTE_ON still sounding at the end of the sequence.
    pub unclosed_note_ons: usize,
    /// Notes that would have ended where they started; given one grid step.
    pub zero_length_notes: usize,
    /// NOTE_ON without a DURATION before the next NOTE_ON or TIME_SHIFT.
    pub missing_durations: usize,
    /// DURATION with no preceding NOTE_ON, ignored.
    pub orphan_durations: usize,
}

impl DecodeAnomalies {
    pub fn total(&self) -> usize {
        self.invalid_ids
            + self.orphan_note_offs
            + self.unclosed_note_ons
            + self.zero_length_notes
            + self.missing_durations
            + self.orphan_durations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub notes: NoteList,
    pub anomalies: DecodeAnomalies,
}

fn make_note(start: u64, length: u64, pitch: u16, bin: u8) -> Note {
    Note::new(
        steps_to_seconds(start),
        steps_to_seconds(length),
        pitch as u8,
        dequantize_velocity(bin),
    )
}

/// Turns a token sequence back into notes. Malformed fragments are repaired
/// or skipped and counted rather than rejected.
pub fn decode(seq: &TokenSequence) -> Decoded {
    let vocab = Vocabulary::new(seq.kind);
    let mut anomalies = DecodeAnomalies::default();
    let mut notes = Vec::new();
    let mut clock = 0u64;
    let mut bin = DEFAULT_VELOCITY_BIN;

    match seq.kind {
        RepresentationKind::OnOff => {
            let mut open: BTreeMap<u16, VecDeque<(u64, u8)>> = BTreeMap::new();
            for &id in &seq.ids {
                let Some(tok) = vocab.token(id) else {
                    anomalies.invalid_ids += 1;
                    continue;
                };
                match tok.family {
                    Family::TimeShift => clock += u64::from(tok.index),
                    Family::Velocity => bin = tok.index as u8,
                    Family::NoteOn => open.entry(tok.index).or_default().push_back((clock, bin)),
                    Family::NoteOff => {
                        match open.get_mut(&tok.index).and_then(VecDeque::pop_front) {
                            Some((start, b)) => {
                                let mut length = clock - start;
                                if length == 0 {
                                    anomalies.zero_length_notes += 1;
                                    length = 1;
                                }
                                notes.push(make_note(start, length, tok.index, b));
                            }
                            None => anomalies.orphan_note_offs += 1,
                        }
                    }
                    Family::Duration => unreachable!("no DURATION family in the on/off vocabulary"),
                }
            }
            for (pitch, queue) in open {
                for (start, b) in queue {
                    anomalies.unclosed_note_ons += 1;
                    let mut length = clock - start;
                    if length == 0 {
                        anomalies.zero_length_notes += 1;
                        length = 1;
                    }
                    notes.push(make_note(start, length, pitch, b));
                }
            }
        }
        RepresentationKind::ExplicitDuration => {
            let mut pending: Option<(u64, u16, u8)> = None;
            let flush = |pending: &mut Option<(u64, u16, u8)>,
                             notes: &mut Vec<Note>,
                             anomalies: &mut DecodeAnomalies| {
                if let Some((start, pitch, b)) = pending.take() {
                    anomalies.missing_durations += 1;
                    notes.push(make_note(start, duration_bin_steps(1), pitch, b));
                }
            };
            for &id in &seq.ids {
                let Some(tok) = vocab.token(id) else {
                    anomalies.invalid_ids += 1;
                    continue;
                };
                match tok.family {
                    Family::TimeShift => {
                        flush(&mut pending, &mut notes, &mut anomalies);
                        clock += u64::from(tok.index);
                    }
                    Family::Velocity => bin = tok.index as u8,
                    Family::NoteOn => {
                        flush(&mut pending, &mut notes, &mut anomalies);
                        pending = Some((clock, tok.index, bin));
                    }
                    Family::Duration => match pending.take() {
                        Some((start, pitch, b)) => notes.push(make_note(
                            start,
                            duration_bin_steps(tok.index as u8),
                            pitch,
                            b,
                        )),
                        None => anomalies.orphan_durations += 1,
                    },
                    Family::NoteOff => unreachable!("no NOTE_OFF family in the explicit vocabulary"),
                }
            }
            flush(&mut pending, &mut notes, &mut anomalies);
        }
    }

    Decoded {
        notes: NoteList::new(notes, steps_to_seconds(clock)),
        anomalies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::Token;

    fn ids(kind: RepresentationKind, tokens: &[(Family, u16)]) -> Vec<TokenId> {
        let v = Vocabulary::new(kind);
        tokens.iter().map(|&(f, i)| v.id(Token::new(f, i)).unwrap()).collect()
    }

    fn one_note() -> NoteList {
        NoteList::from_notes(vec![Note::new(0.0, 0.5, 60, 80)])
    }

    #[test]
    fn single_note_on_off() {
        let seq = encode(&one_note(), RepresentationKind::OnOff, "x");
        assert_eq!(
            seq.ids,
            ids(
                RepresentationKind::OnOff,
                &[
                    (Family::Velocity, 20),
                    (Family::NoteOn, 60),
                    (Family::TimeShift, 50),
                    (Family::NoteOff, 60)
                ]
            )
        );
    }

    #[test]
    fn single_note_explicit() {
        let seq = encode(&one_note(), RepresentationKind::ExplicitDuration, "x");
        assert_eq!(
            seq.ids,
            ids(
                RepresentationKind::ExplicitDuration,
                &[(Family::Velocity, 20), (Family::NoteOn, 60), (Family::Duration, 50)]
            )
        );
    }

    #[test]
    fn empty_list_gives_empty_sequence() {
        for kind in RepresentationKind::ALL {
            assert!(encode(&NoteList::default(), kind, "").ids.is_empty());
        }
    }

    #[test]
    fn note_off_precedes_note_on_at_equal_time() {
        let notes = NoteList::from_notes(vec![
            Note::new(0.0, 0.5, 64, 82),
            Note::new(0.5, 0.5, 64, 82),
            Note::new(0.5, 0.5, 60, 82),
        ]);
        let seq = encode(&notes, RepresentationKind::OnOff, "");
        let expect = ids(
            RepresentationKind::OnOff,
            &[
                (Family::Velocity, 20),
                (Family::NoteOn, 64),
                (Family::TimeShift, 50),
                (Family::NoteOff, 64),
                (Family::NoteOn, 60),
                (Family::NoteOn, 64),
                (Family::TimeShift, 50),
                (Family::NoteOff, 60),
                (Family::NoteOff, 64),
            ],
        );
        assert_eq!(seq.ids, expect);
        assert_eq!(decode(&seq).notes, notes);
    }

    #[test]
    fn velocity_token_only_on_change() {
        let notes = NoteList::from_notes(vec![
            Note::new(0.0, 0.1, 60, 80),
            Note::new(0.1, 0.1, 62, 81),
            Note::new(0.2, 0.1, 64, 100),
        ]);
        let seq = encode(&notes, RepresentationKind::ExplicitDuration, "");
        let v = Vocabulary::new(RepresentationKind::ExplicitDuration);
        let velocity_tokens: Vec<u16> = seq
            .ids
            .iter()
            .filter_map(|&id| v.token(id))
            .filter(|t| t.family == Family::Velocity)
            .map(|t| t.index)
            .collect();
        assert_eq!(velocity_tokens, vec![20, 25]);
    }

    #[test]
    fn orphan_note_off_is_ignored() {
        let seq = TokenSequence {
            kind: RepresentationKind::OnOff,
            ids: ids(RepresentationKind::OnOff, &[(Family::NoteOff, 60)]),
            source: String::new(),
        };
        let d = decode(&seq);
        assert!(d.notes.is_empty());
        assert_eq!(d.anomalies.total(), 1);
        assert_eq!(d.anomalies.orphan_note_offs, 1);
    }

    #[test]
    fn note_on_without_duration_gets_one_step() {
        let seq = TokenSequence {
            kind: RepresentationKind::ExplicitDuration,
            ids: ids(RepresentationKind::ExplicitDuration, &[(Family::NoteOn, 60)]),
            source: String::new(),
        };
        let d = decode(&seq);
        assert_eq!(d.notes.notes, vec![Note::new(0.0, 0.01, 60, dequantize_velocity(20))]);
        assert_eq!(d.anomalies.total(), 1);
        assert_eq!(d.anomalies.missing_durations, 1);
    }

    #[test]
    fn explicit_decode_repairs_fragments() {
        let seq = TokenSequence {
            kind: RepresentationKind::ExplicitDuration,
            ids: ids(
                RepresentationKind::ExplicitDuration,
                &[
                    (Family::Duration, 10),
                    (Family::NoteOn, 60),
                    (Family::NoteOn, 62),
                    (Family::Velocity, 5),
                    (Family::Duration, 20),
                    (Family::TimeShift, 10),
                ],
            ),
            source: String::new(),
        };
        let d = decode(&seq);
        assert_eq!(d.anomalies.orphan_durations, 1);
        assert_eq!(d.anomalies.missing_durations, 1);
        assert_eq!(
            d.notes.notes,
            vec![
                Note::new(0.0, 0.01, 60, dequantize_velocity(20)),
                Note::new(0.0, 0.2, 62, dequantize_velocity(20)),
            ]
        );
        assert_eq!(d.notes.total_duration_s, 0.2);
    }

    #[test]
    fn on_off_unclosed_note_runs_to_final_clock() {
        let seq = TokenSequence {
            kind: RepresentationKind::OnOff,
            ids: ids(
                RepresentationKind::OnOff,
                &[(Family::NoteOn, 60), (Family::TimeShift, 30), (Family::NoteOn, 62)],
            ),
            source: String::new(),
        };
        let d = decode(&seq);
        assert_eq!(d.anomalies.unclosed_note_ons, 2);
        assert_eq!(d.anomalies.zero_length_notes, 1);
        let spans: Vec<(f64, f64, u8)> = d.notes.iter().map(|n| (n.onset_s, n.duration_s, n.pitch)).collect();
        assert_eq!(spans, vec![(0.0, 0.3, 60), (0.3, 0.01, 62)]);
    }

    #[test]
    fn invalid_ids_are_skipped() {
        let seq = TokenSequence {
            kind: RepresentationKind::OnOff,
            ids: vec![5000, 388],
            source: String::new(),
        };
        assert_eq!(decode(&seq).anomalies.invalid_ids, 2);
    }

    #[test]
    fn long_gap_and_long_duration() {
        let notes = NoteList::from_notes(vec![Note::new(2.5, 3.0, 48, 42)]);
        let seq = encode(&notes, RepresentationKind::ExplicitDuration, "");
        let expect = ids(
            RepresentationKind::ExplicitDuration,
            &[
                (Family::TimeShift, 100),
                (Family::TimeShift, 100),
                (Family::TimeShift, 50),
                (Family::Velocity, 10),
                (Family::NoteOn, 48),
                (Family::Duration, 120),
            ],
        );
        assert_eq!(seq.ids, expect);
        assert_eq!(decode(&seq).notes, notes);
    }
}
