use super::{EventKind, MidiDocument};

/// Tempo assumed when a file sets none (120 bpm).
pub const DEFAULT_US_PER_QUARTER: u32 = 500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TempoChange {
    pub tick: u64,
    pub us_per_quarter: u32,
}

/// Tick-sorted tempo changes. The first entry is always at tick 0 and ticks
/// are strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TempoMap {
    entries: Vec<TempoChange>,
}

impl Default for TempoMap {
    fn default() -> Self {
        Self {
            entries: vec![TempoChange {
                tick: 0,
                us_per_quarter: DEFAULT_US_PER_QUARTER,
            }],
        }
    }
}

impl TempoMap {
    /// Builds a map from arbitrary (tick, tempo) pairs. Pairs are applied in
    /// the given order after a stable sort by tick, so a later pair at the
    /// same tick replaces an earlier one.
    pub fn from_changes(changes: impl IntoIterator<Item = (u64, u32)>) -> Self {
        let mut changes: Vec<(u64, u32)> = changes
            .into_iter()
            .filter(|&(_, us)| us > 0)
            .collect();
        changes.sort_by_key(|&(tick, _)| tick);
        let mut entries: Vec<TempoChange> = Vec::with_capacity(changes.len() + 1);
        for (tick, us_per_quarter) in changes {
            match entries.last_mut() {
                Some(last) if last.tick == tick => last.us_per_quarter = us_per_quarter,
                _ => entries.push(TempoChange {
                    tick,
                    us_per_quarter,
                }),
            }
        }
        if entries.first().map_or(true, |e| e.tick != 0) {
            entries.insert(
                0,
                TempoChange {
                    tick: 0,
                    us_per_quarter: DEFAULT_US_PER_QUARTER,
                },
            );
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[TempoChange] {
        &self.entries
    }

    /// Converts an absolute tick to seconds.
    ///
    /// The elapsed time is accumulated exactly in integer
    /// tick·microsecond units and divided once, so equal ticks always map to
    /// bit-identical seconds.
    pub fn seconds_at(&self, tick: u64, ppq: u16) -> f64 {
        let mut acc: u128 = 0;
        for (i, e) in self.entries.iter().enumerate() {
            if e.tick >= tick {
                break;
            }
            let seg_end = self
                .entries
                .get(i + 1)
                .map_or(tick, |next| next.tick.min(tick));
            acc += u128::from(seg_end - e.tick) * u128::from(e.us_per_quarter);
        }
        acc as f64 / (f64::from(ppq) * 1e6)
    }
}

/// Merges the tempo events of every track into one map.
pub fn build_tempo_map(doc: &MidiDocument) -> TempoMap {
    let changes = doc.tracks.iter().flat_map(|t| {
        t.absolute().filter_map(|(tick, ev)| match ev.kind {
            EventKind::Tempo { us_per_quarter } => Some((tick, us_per_quarter)),
            _ => None,
        })
    });
    TempoMap::from_changes(changes)
}

pub fn ticks_to_seconds(tick: u64, map: &TempoMap, ppq: u16) -> f64 {
    map.seconds_at(tick, ppq)
}
