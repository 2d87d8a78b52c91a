//! Independent reference implementations and fixtures shared by the
//! integration tests. Deliberately naive: exhaustive enumeration and direct
//! summation, written without reusing library internals.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use structok_core::smf::{EventKind, Format, MidiDocument, Note, NoteList, TimedEvent, Track};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Path families by exhaustive enumeration.

/// A monotone path from column 0 to the last column, as its cells.
fn all_paths(rows: usize, cols: usize) -> Vec<Vec<(usize, usize)>> {
    fn walk(
        r: usize,
        c: usize,
        rows: usize,
        cols: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        cur.push((r, c));
        if c == cols - 1 {
            out.push(cur.clone());
        }
        for (dr, dc) in [(1, 1), (2, 1), (1, 2)] {
            if r + dr < rows && c + dc < cols {
                walk(r + dr, c + dc, rows, cols, cur, out);
            }
        }
        cur.pop();
    }
    let mut out = Vec::new();
    for r in 0..rows {
        walk(r, 0, rows, cols, &mut Vec::new(), &mut out);
    }
    out
}

/// (score, coverage, cells) of the best family: maximal score, then minimal
/// coverage, then minimal cells.
pub fn brute_path_family(m: &[Vec<f64>], cols: std::ops::RangeInclusive<usize>) -> (f64, usize, usize) {
    let rows = m.len();
    let (c0, c1) = (*cols.start(), *cols.end());
    let width = c1 - c0 + 1;
    let paths = all_paths(rows, width);
    let mut best = (0.0f64, 0usize, 0usize);
    // Depth-first over families with increasing, disjoint row spans.
    fn rec(
        m: &[Vec<f64>],
        c0: usize,
        paths: &[Vec<(usize, usize)>],
        min_row: usize,
        acc: (f64, usize, usize),
        best: &mut (f64, usize, usize),
    ) {
        let better = acc.0 > best.0 || (acc.0 == best.0 && (acc.1, acc.2) < (best.1, best.2));
        if better {
            *best = acc;
        }
        for p in paths {
            let start = p[0].0;
            let end = p[p.len() - 1].0;
            if start < min_row {
                continue;
            }
            let mut score = acc.0;
            for &(r, c) in p {
                score += m[r][c0 + c];
            }
            rec(m, c0, paths, end + 1, (score, acc.1 + end - start + 1, acc.2 + p.len()), best);
        }
    }
    rec(m, c0, &paths, 0, (0.0, 0, 0), &mut best);
    best
}

// ---------------------------------------------------------------------------
// SIATEC by subset enumeration.

pub type Pt = (i64, i64);

fn translators_of(pattern: &[Pt], d: &[Pt]) -> Vec<Pt> {
    let anchor = pattern[0];
    d.iter()
        .map(|q| (q.0 - anchor.0, q.1 - anchor.1))
        .filter(|v| pattern.iter().all(|p| d.contains(&(p.0 + v.0, p.1 + v.1))))
        .collect()
}

fn ratio_of(pattern: &[Pt], translators: &[Pt]) -> f64 {
    let mut covered: Vec<Pt> = translators
        .iter()
        .flat_map(|v| pattern.iter().map(move |p| (p.0 + v.0, p.1 + v.1)))
        .collect();
    covered.sort();
    covered.dedup();
    covered.len() as f64 / (pattern.len() + translators.len() - 1) as f64
}

/// Best compression ratio over the TECs of every subset of `d` that is the
/// maximal translatable pattern of some non-zero vector, floored at 1.
/// Subsets are enumerated exhaustively and maximality is checked by scanning
/// every candidate vector.
pub fn brute_best_ratio(d: &[Pt]) -> f64 {
    let n = d.len();
    assert!(n <= 16);
    let mut best = 1.0f64;
    for mask in 1u32..(1 << n) {
        let pattern: Vec<Pt> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| d[i]).collect();
        if pattern.len() < 2 {
            continue;
        }
        let maximal = d.iter().flat_map(|a| d.iter().map(move |b| (b.0 - a.0, b.1 - a.1))).any(|v| {
            v != (0, 0) && {
                let mtp: Vec<Pt> = d.iter().copied().filter(|p| d.contains(&(p.0 + v.0, p.1 + v.1))).collect();
                mtp == pattern
            }
        });
        if maximal {
            best = best.max(ratio_of(&pattern, &translators_of(&pattern, d)));
        }
    }
    best
}

/// Best compression ratio over the TECs of every translatable subset, maximal
/// or not. An upper bound on what a maximal-pattern search can find.
pub fn brute_best_ratio_any_subset(d: &[Pt]) -> f64 {
    let n = d.len();
    let mut best = 1.0f64;
    for mask in 1u32..(1 << n) {
        let pattern: Vec<Pt> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| d[i]).collect();
        let t = translators_of(&pattern, d);
        if t.len() >= 2 {
            best = best.max(ratio_of(&pattern, &t));
        }
    }
    best
}

pub fn random_points(rng: &mut impl Rng, max: usize) -> Vec<Pt> {
    let n = rng.gen_range(1..=max);
    let mut pts: Vec<Pt> = (0..n)
        .map(|_| (rng.gen_range(0..12), rng.gen_range(60..66)))
        .collect();
    pts.sort();
    pts.dedup();
    pts
}

// ---------------------------------------------------------------------------
// Pitch-class consistency by direct summation.

pub fn consistency_oracle(notes: &[Note], duration: f64, windows: usize, eps: f64) -> Option<f64> {
    let mut hists: Vec<[f64; 12]> = Vec::new();
    for w in 0..windows {
        let lo = duration * w as f64 / windows as f64;
        let hi = duration * (w + 1) as f64 / windows as f64;
        let last = w == windows - 1;
        let mut counts = [0.0f64; 12];
        let mut total = 0.0;
        for n in notes {
            let inside = n.onset_s >= lo && (n.onset_s < hi || last);
            if inside {
                counts[(n.pitch % 12) as usize] += 1.0;
                total += 1.0;
            }
        }
        if total == 0.0 {
            continue;
        }
        let mut h = [0.0; 12];
        let z: f64 = (0..12).map(|k| counts[k] / total + eps).sum();
        for k in 0..12 {
            h[k] = (counts[k] / total + eps) / z;
        }
        hists.push(h);
    }
    if hists.len() < 2 {
        return None;
    }
    let mut sum = 0.0;
    for t in 0..hists.len() - 1 {
        let mut kl = 0.0;
        for k in 0..12 {
            let (p, q) = (hists[t][k], hists[t + 1][k]);
            kl += p * (p / q).ln() / std::f64::consts::LN_2;
        }
        sum += kl;
    }
    Some(sum / (hists.len() - 1) as f64)
}

// ---------------------------------------------------------------------------
// Note-list fixtures.

/// A section of `frames` half-second chords, two or three random pitch
/// classes each, played twice back to back.
pub fn repeat_fixture(seed: u64, frames: usize) -> NoteList {
    let section = random_chords(seed, frames);
    let mut notes = Vec::new();
    for copy in 0..2 {
        for (f, chord) in section.iter().enumerate() {
            let onset = (copy * frames + f) as f64 * 0.5;
            notes.extend(chord.iter().map(|&p| Note::new(onset, 0.5, p, 80)));
        }
    }
    NoteList::from_notes(notes)
}

/// The same chords as [`repeat_fixture`] in a seeded random order.
pub fn shuffled_fixture(seed: u64, frames: usize, shuffle_seed: u64) -> NoteList {
    let section = random_chords(seed, frames);
    let mut all: Vec<Vec<u8>> = section.iter().chain(section.iter()).cloned().collect();
    all.shuffle(&mut rng(shuffle_seed));
    let notes = all
        .iter()
        .enumerate()
        .flat_map(|(f, chord)| chord.iter().map(move |&p| Note::new(f as f64 * 0.5, 0.5, p, 80)))
        .collect();
    NoteList::from_notes(notes)
}

fn random_chords(seed: u64, frames: usize) -> Vec<Vec<u8>> {
    let mut r = rng(seed);
    (0..frames)
        .map(|_| {
            let k = r.gen_range(2..=3);
            let mut classes: Vec<u8> = (0..12).collect();
            classes.shuffle(&mut r);
            classes[..k].iter().map(|c| 48 + c + 12 * r.gen_range(0..2)).collect()
        })
        .collect()
}

/// Random notes with onsets in `[0, span_s)`.
pub fn random_notes(rng: &mut impl Rng, count: usize, span_s: f64) -> Vec<Note> {
    (0..count)
        .map(|_| {
            Note::new(
                rng.gen_range(0.0..span_s),
                rng.gen_range(0.05..2.0),
                rng.gen_range(21..=108),
                rng.gen_range(1..=127),
            )
        })
        .collect()
}

/// Random note lists that sit exactly on the 10 ms grid: onsets and
/// durations are whole steps, durations are representable as a single
/// DURATION bin, velocities are bin midpoints, and notes of one pitch never
/// overlap (they may touch).
pub fn on_grid_notes(rng: &mut impl Rng, max_notes: usize) -> NoteList {
    let count = rng.gen_range(0..=max_notes);
    let mut notes: Vec<Note> = Vec::with_capacity(count);
    let mut spans: Vec<(u8, u64, u64)> = Vec::new();
    let mut attempts = 0;
    while notes.len() < count && attempts < 20 * count {
        attempts += 1;
        let pitch = rng.gen_range(21..=108u8);
        let start = rng.gen_range(0..3000u64);
        let length = if rng.gen_bool(0.7) {
            rng.gen_range(1..=100u64)
        } else {
            10 * rng.gen_range(11..=50u64)
        };
        let end = start + length;
        if spans.iter().any(|&(p, s, e)| p == pitch && start < e && s < end) {
            continue;
        }
        spans.push((pitch, start, end));
        let bin = rng.gen_range(0..32u8);
        let velocity = (u16::from(bin) * 4 + 2).min(127) as u8;
        notes.push(Note::new(start as f64 / 100.0, length as f64 / 100.0, pitch, velocity));
    }
    NoteList::from_notes(notes)
}

/// Random notes at arbitrary times, durations 10 ms to 5 s, with at least
/// 20 ms between notes of the same pitch.
pub fn off_grid_notes(rng: &mut impl Rng, max_notes: usize) -> NoteList {
    let count = rng.gen_range(0..=max_notes);
    let mut notes: Vec<Note> = Vec::with_capacity(count);
    let mut attempts = 0;
    while notes.len() < count && attempts < 20 * count {
        attempts += 1;
        let n = Note::new(
            rng.gen_range(0.0..30.0),
            rng.gen_range(0.01..5.0),
            rng.gen_range(21..=108),
            rng.gen_range(1..=127),
        );
        let clash = notes
            .iter()
            .any(|m| m.pitch == n.pitch && n.onset_s < m.end_s() + 0.02 && m.onset_s < n.end_s() + 0.02);
        if !clash {
            notes.push(n);
        }
    }
    NoteList::from_notes(notes)
}

// ---------------------------------------------------------------------------
// MIDI documents.

/// A random format-1 document: a conductor track with tempo changes and a
/// text event, then one to three tracks mixing notes on all channels with
/// controllers, program changes, pitch bends, aftertouch and SysEx. NoteOn
/// velocities are nonzero so every event reads back as written.
pub fn random_document(rng: &mut impl Rng, max_notes: usize) -> MidiDocument {
    let ppq = *[96u16, 120, 384, 480, 960].choose(rng).unwrap();
    let span = u64::from(ppq) * 64;

    let mut conductor = vec![TimedEvent::new(
        0,
        EventKind::OtherMeta {
            meta_type: 0x03,
            data: b"conductor".to_vec(),
        },
    )];
    for _ in 0..rng.gen_range(0..4) {
        conductor.push(TimedEvent::new(
            rng.gen_range(0..4 * u32::from(ppq)),
            EventKind::Tempo {
                us_per_quarter: rng.gen_range(200_000..1_500_000),
            },
        ));
    }
    conductor.push(TimedEvent::new(0, EventKind::EndOfTrack));
    let mut tracks = vec![Track { events: conductor }];

    let track_count = rng.gen_range(1..=3);
    let notes = rng.gen_range(0..=max_notes);
    let mut timelines: Vec<Vec<(u64, EventKind)>> = vec![Vec::new(); track_count];
    for _ in 0..notes {
        let t = rng.gen_range(0..track_count);
        let channel = rng.gen_range(0..16u8);
        let pitch = rng.gen_range(0..128u8);
        let start = rng.gen_range(0..span);
        let end = start + rng.gen_range(1..4 * u64::from(ppq));
        timelines[t].push((
            start,
            EventKind::NoteOn {
                channel,
                pitch,
                velocity: rng.gen_range(1..128),
            },
        ));
        timelines[t].push((
            end,
            EventKind::NoteOff {
                channel,
                pitch,
                velocity: rng.gen_range(0..128),
            },
        ));
    }
    for timeline in &mut timelines {
        for _ in 0..rng.gen_range(0..12) {
            let channel = rng.gen_range(0..16u8);
            let kind = match rng.gen_range(0..5) {
                0 => EventKind::ProgramChange {
                    channel,
                    program: rng.gen_range(0..128),
                },
                1 => EventKind::OtherChannel {
                    status: 0xB0 | channel,
                    data: vec![rng.gen_range(0..128), rng.gen_range(0..128)],
                },
                2 => EventKind::OtherChannel {
                    status: 0xE0 | channel,
                    data: vec![rng.gen_range(0..128), rng.gen_range(0..128)],
                },
                3 => EventKind::OtherChannel {
                    status: 0xD0 | channel,
                    data: vec![rng.gen_range(0..128)],
                },
                _ => EventKind::SysEx {
                    status: 0xF0,
                    data: vec![0x7E, rng.gen_range(0..128), 0x09, 0x01, 0xF7],
                },
            };
            timeline.push((rng.gen_range(0..span), kind));
        }
        timeline.sort_by_key(|e| e.0);
        let mut events = Vec::with_capacity(timeline.len() + 1);
        let mut now = 0u64;
        for (tick, kind) in timeline.drain(..) {
            events.push(TimedEvent::new((tick - now) as u32, kind));
            now = tick;
        }
        events.push(TimedEvent::new(rng.gen_range(0..u32::from(ppq)), EventKind::EndOfTrack));
        tracks.push(Track { events });
    }
    MidiDocument {
        format: Format::Parallel,
        ticks_per_quarter: ppq,
        tracks,
    }
}

// ---------------------------------------------------------------------------
// Statistics references.

/// Standard normal draws by Box-Muller over the given generator.
pub fn normal_draws(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        })
        .collect()
}

fn phi(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverse of `phi` by bisection.
fn phi_inv(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Straight-line BCa for the mean: one sequential loop over resamples,
/// switching RNG stream every `block` resamples. Returns (low, high).
pub fn reference_bca(values: &[f64], level: f64, resamples: usize, seed: u64, block: usize) -> (f64, f64) {
    let n = values.len();
    let theta = values.iter().sum::<f64>() / n as f64;
    let mut dist = Vec::with_capacity(resamples);
    let mut stream_rng = rng(seed);
    for b in 0..resamples {
        if b % block == 0 {
            stream_rng = rng(seed);
            stream_rng.set_stream((b / block) as u64);
        }
        let mut sum = 0.0;
        let mut draws = Vec::with_capacity(n);
        for _ in 0..n {
            draws.push(values[stream_rng.gen_range(0..n)]);
        }
        for d in &draws {
            sum += d;
        }
        dist.push(sum / n as f64);
    }
    dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut below = 0.0;
    for &t in &dist {
        if t < theta {
            below += 1.0;
        } else if t == theta {
            below += 0.5;
        }
    }
    let bb = resamples as f64;
    let prop = (below / bb).clamp(0.5 / bb, 1.0 - 0.5 / bb);
    let z0 = phi_inv(prop);

    let mut loo = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = 0.0;
        for (j, v) in values.iter().enumerate() {
            if j != i {
                s += v;
            }
        }
        loo.push(s / (n - 1) as f64);
    }
    let center = loo.iter().sum::<f64>() / n as f64;
    let num: f64 = loo.iter().map(|t| (center - t).powi(3)).sum();
    let den: f64 = loo.iter().map(|t| (center - t).powi(2)).sum();
    let a = if den > 0.0 { num / (6.0 * den.powf(1.5)) } else { 0.0 };

    let alpha = (1.0 - level) / 2.0;
    let pick = |z: f64| {
        let q = phi(z0 + (z0 + z) / (1.0 - a * (z0 + z)));
        let k = ((q * bb).ceil() as usize).clamp(1, resamples);
        dist[k - 1]
    };
    (pick(phi_inv(alpha)), pick(phi_inv(1.0 - alpha)))
}

/// Two-sided permutation p-value for the Mann-Whitney statistic: the share
/// of random relabelings whose |U - n1 n2 / 2| is at least the observed one.
/// Midranks are computed by pairwise counting.
pub fn permutation_p(a: &[f64], b: &[f64], shuffles: usize, seed: u64) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n1 = a.len();
    let ranks: Vec<f64> = pooled
        .iter()
        .map(|x| {
            let below = pooled.iter().filter(|y| *y < x).count() as f64;
            let equal = pooled.iter().filter(|y| *y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let offset = (n1 * (n1 + 1)) as f64 / 2.0;
    let center = (n1 * b.len()) as f64 / 2.0;
    let u_of = |r: &[f64]| r[..n1].iter().sum::<f64>() - offset;
    let observed = (u_of(&ranks) - center).abs();
    let mut r = rng(seed);
    let mut work = ranks.clone();
    let mut hits = 0usize;
    for _ in 0..shuffles {
        work.shuffle(&mut r);
        if (u_of(&work) - center).abs() >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / shuffles as f64
}

/// Likert (1-5) response vectors with heavy ties, 20 to 40 responses per
/// group.
pub fn likert_fixture(seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let n1 = r.gen_range(20..=40);
    let n2 = r.gen_range(20..=40);
    let shift = r.gen_range(0..=2);
    let a = (0..n1).map(|_| f64::from(r.gen_range(1..=5u8))).collect();
    let b = (0..n2)
        .map(|_| f64::from((r.gen_range(1..=5u8) + shift).min(5)))
        .collect();
    (a, b)
}
