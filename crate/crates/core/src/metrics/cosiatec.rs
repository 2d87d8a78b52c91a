use std::cmp::Ordering;

use serde::Serialize;

use crate::smf::NoteList;

pub const DEFAULT_GRID_S: f64 = 0.05;

/// A point in (time step, pitch) space. Ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Point {
    pub t: i64,
    pub p: i64,
}

impl Point {
    pub const fn new(t: i64, p: i64) -> Self {
        Self { t, p }
    }

    fn sub(self, o: Point) -> Point {
        Point::new(self.t - o.t, self.p - o.p)
    }

    fn add(self, o: Point) -> Point {
        Point::new(self.t + o.t, self.p + o.p)
    }
}

/// Sorted, duplicate-free set of points.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(mut points: Vec<Point>) -> Self {
        points.sort_unstable();
        points.dedup();
        Self { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }
}

/// Quantizes onsets to `grid_s` and pairs them with pitch.
pub fn point_set(notes: &NoteList, grid_s: f64) -> PointSet {
    assert!(grid_s > 0.0, "grid must be positive");
    PointSet::new(
        notes
            .iter()
            .map(|n| Point::new((n.onset_s / grid_s).round() as i64, i64::from(n.pitch)))
            .collect(),
    )
}

/// Translational equivalence class: a pattern and every vector (including
/// the zero vector) under which it occurs in the point set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tec {
    pub pattern: Vec<Point>,
    pub translators: Vec<Point>,
}

impl Tec {
    /// Points needed to write this TEC down.
    pub fn encoding_len(&self) -> usize {
        self.pattern.len() + self.translators.len() - 1
    }

    /// Every point produced by translating the pattern, sorted and deduplicated.
    pub fn covered(&self) -> Vec<Point> {
        let mut out: Vec<Point> = self
            .translators
            .iter()
            .flat_map(|&v| self.pattern.iter().map(move |&p| p.add(v)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Pattern extent as (time span, pitch span).
    pub fn extent(&self) -> (i64, i64) {
        extent(&self.pattern)
    }
}

fn extent(pattern: &[Point]) -> (i64, i64) {
    let (mut t0, mut t1, mut p0, mut p1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for q in pattern {
        t0 = t0.min(q.t);
        t1 = t1.max(q.t);
        p0 = p0.min(q.p);
        p1 = p1.max(q.p);
    }
    (t1 - t0, p1 - p0)
}

/// Candidate ranking: compression ratio, then coverage, then smaller
/// bounding box (shorter in time, then narrower in pitch), then
/// lexicographically smaller pattern.
#[derive(Debug, Clone)]
struct Candidate {
    tec: Tec,
    covered: Vec<Point>,
    extent: (i64, i64),
}

impl Candidate {
    fn new(tec: Tec) -> Self {
        let covered = tec.covered();
        let extent = tec.extent();
        Self {
            tec,
            covered,
            extent,
        }
    }

    fn cmp_rank(&self, other: &Candidate) -> Ordering {
        let (a_cov, a_enc) = (self.covered.len() as u64, self.tec.encoding_len() as u64);
        let (b_cov, b_enc) = (other.covered.len() as u64, other.tec.encoding_len() as u64);
        (a_cov * b_enc)
            .cmp(&(b_cov * a_enc))
            .then(a_cov.cmp(&b_cov))
            .then(other.extent.cmp(&self.extent))
            .then_with(|| other.tec.pattern.cmp(&self.tec.pattern))
    }
}

/// Maximal translatable patterns of `points` (sorted), each given as sorted
/// indices, for every difference vector with at least two matches. Identical
/// patterns reached through different vectors appear once.
fn maximal_patterns(points: &[Point]) -> Vec<Vec<u32>> {
    let n = points.len();
    let mut table: Vec<(Point, u32)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            table.push((points[j].sub(points[i]), i as u32));
        }
    }
    table.sort_unstable();
    let mut patterns: Vec<Vec<u32>> = table
        .chunk_by(|a, b| a.0 == b.0)
        .filter(|g| g.len() >= 2)
        .map(|g| g.iter().map(|&(_, i)| i).collect())
        .collect();
    patterns.sort_unstable();
    patterns.dedup();
    patterns
}

fn translators(pattern: &[Point], set: &PointSet) -> Vec<Point> {
    let anchor = pattern[0];
    set.points()
        .iter()
        .map(|&q| q.sub(anchor))
        .filter(|&v| pattern[1..].iter().all(|&p| set.contains(&p.add(v))))
        .collect()
}

/// Best TEC of one SIATEC pass, or `None` when no pattern repeats.
fn best_tec(set: &PointSet) -> Option<Candidate> {
    let points = set.points();
    let mut patterns = maximal_patterns(points);
    // Larger patterns first so the size bound below can stop the scan early.
    patterns.sort_by_key(|p| std::cmp::Reverse(p.len()));
    let mut best: Option<Candidate> = None;
    for idx in patterns {
        if let Some(b) = &best {
            // Compression ratio is below |P|, and at most |D| / (|P| + 1)
            // for a repeated pattern.
            let (cov, enc) = (b.covered.len(), b.tec.encoding_len());
            if idx.len() * enc <= cov {
                break;
            }
            if points.len() * enc < cov * (idx.len() + 1) {
                continue;
            }
        }
        let pattern: Vec<Point> = idx.iter().map(|&i| points[i as usize]).collect();
        let translators = translators(&pattern, set);
        let cand = Candidate::new(Tec {
            pattern,
            translators,
        });
        if best
            .as_ref()
            .is_none_or(|b| cand.cmp_rank(b) == Ordering::Greater)
        {
            best = Some(cand);
        }
    }
    best
}

/// Greedy covering of the point set by translational equivalence classes.
/// Points left without any repeated pattern become singleton TECs.
pub fn cosiatec(ps: &PointSet) -> Vec<Tec> {
    let mut remaining = ps.clone();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        // A TEC that does not compress is no better than its points alone.
        let best = best_tec(&remaining).filter(|c| c.covered.len() > c.tec.encoding_len());
        let Some(best) = best else {
            out.extend(remaining.points().iter().map(|&p| Tec {
                pattern: vec![p],
                translators: vec![Point::new(0, 0)],
            }));
            break;
        };
        let covered = best.covered;
        remaining = PointSet {
            points: remaining
                .points
                .into_iter()
                .filter(|p| covered.binary_search(p).is_err())
                .collect(),
        };
        out.push(best.tec);
    }
    out
}

/// Points in the set divided by the points needed to encode its COSIATEC
/// cover. 1.0 for an empty set.
pub fn compression_ratio(ps: &PointSet) -> f64 {
    if ps.is_empty() {
        return 1.0;
    }
    let encoded: usize = cosiatec(ps).iter().map(Tec::encoding_len).sum();
    ps.len() as f64 / encoded as f64
}
