use rayon::prelude::*;
use serde::Serialize;

use super::ssm::Ssm;
use super::MetricError;

/// Segment-grid bound above which the scape plot is decimated.
pub const DEFAULT_MAX_AXIS: usize = 200;

/// Accumulated score of an optimal path family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathFamily {
    /// Total similarity collected along all paths.
    pub score: f64,
    /// Number of rows spanned by the paths.
    pub coverage: usize,
    /// Number of matrix cells on the paths.
    pub cells: usize,
}

impl PathFamily {
    pub const EMPTY: PathFamily = PathFamily {
        score: 0.0,
        coverage: 0,
        cells: 0,
    };

    /// Total order used by the optimizer: higher score wins, then smaller
    /// coverage, then fewer cells.
    pub fn beats(&self, other: &PathFamily) -> bool {
        if self.score != other.score {
            return self.score > other.score;
        }
        (self.coverage, self.cells) < (other.coverage, other.cells)
    }
}

/// Optimal path family over a `rows` × `cols` similarity grid.
///
/// Every path runs from column 0 to column `cols - 1` using steps (1,1),
/// (2,1) and (1,2) in (row, column); paths occupy disjoint, increasing row
/// ranges. The empty family scores 0.
pub fn optimal_path_family(rows: usize, cols: usize, sim: impl Fn(usize, usize) -> f64) -> PathFamily {
    let grid: Vec<Vec<f64>> = (0..rows).map(|r| (0..cols).map(|c| sim(r, c)).collect()).collect();
    family_over_rows(rows, cols, |r| &grid[r])
}

/// Tie-break key of a partial family, `coverage * 2^24 + cells`. Both
/// counts stay below 2^24, so the key is an exact integer in an `f64` and
/// `(coverage, cells)` order is numeric order. Keeping keys as floats lets
/// the inner loop compile to plain float compares and selects.
const KEY_SHIFT: f64 = (1u64 << 24) as f64;
const STEP_1: f64 = KEY_SHIFT + 1.0;
const STEP_2: f64 = 2.0 * KEY_SHIFT + 1.0;

/// `(b_score, b_key)` if it beats `(a_score, a_key)` under
/// [`PathFamily::beats`], else `a`.
#[inline(always)]
fn pick(a_score: f64, a_key: f64, b_score: f64, b_key: f64) -> (f64, f64) {
    let take_b = (b_score > a_score) | ((b_score == a_score) & (b_key < a_key));
    if take_b {
        (b_score, b_key)
    } else {
        (a_score, a_key)
    }
}

/// The path-family DP with row `r` of the grid given as a slice of at least
/// `cols` values.
///
/// Scores and tie-break keys are kept in separate arrays. Unreachable states
/// score minus infinity, which addition preserves; their keys are never
/// reported.
fn family_over_rows<'a>(rows: usize, cols: usize, row: impl Fn(usize) -> &'a [f64]) -> PathFamily {
    if rows == 0 || cols == 0 {
        return PathFamily::EMPTY;
    }
    assert!(rows < 1 << 23, "grid too large for exact tie-break keys");
    let last = cols - 1;
    let dead = f64::NEG_INFINITY;
    let (mut s2, mut s1, mut sc) = (vec![dead; cols], vec![dead; cols], vec![dead; cols]);
    let (mut k2, mut k1, mut kc) = (vec![0.0; cols], vec![0.0; cols], vec![0.0; cols]);
    let (mut e_score, mut e_key) = (0.0, 0.0);
    for r in 0..rows {
        if r > 0 {
            (e_score, e_key) = pick(e_score, e_key, s1[last], k1[last]);
        }
        let v = &row(r)[..cols];
        sc[0] = e_score + v[0];
        kc[0] = e_key + STEP_1;
        if cols > 1 {
            // Column 1 has no (1,2) predecessor.
            let (s, k) = pick(s1[0] + v[1], k1[0] + STEP_1, s2[0] + v[1], k2[0] + STEP_2);
            sc[1] = s;
            kc[1] = k;
        }
        if cols > 2 {
            let (v, s1a, s1b, s2a) = (&v[2..], &s1[1..last], &s1[..cols - 2], &s2[1..last]);
            let (k1a, k1b, k2a) = (&k1[1..last], &k1[..cols - 2], &k2[1..last]);
            for (i, (so, ko)) in sc[2..].iter_mut().zip(kc[2..].iter_mut()).enumerate() {
                let x = v[i];
                let (s, k) = pick(s1a[i] + x, k1a[i] + STEP_1, s2a[i] + x, k2a[i] + STEP_2);
                let (s, k) = pick(s, k, s1b[i] + x, k1b[i] + STEP_1);
                *so = s;
                *ko = k;
            }
        }
        std::mem::swap(&mut s2, &mut s1);
        std::mem::swap(&mut s1, &mut sc);
        std::mem::swap(&mut k2, &mut k1);
        std::mem::swap(&mut k1, &mut kc);
    }
    let (score, k) = pick(e_score, e_key, s1[last], k1[last]);
    PathFamily {
        score,
        coverage: (k / KEY_SHIFT).floor() as usize,
        cells: (k % KEY_SHIFT) as usize,
    }
}

/// Optimal path family for the segment `[start, end]` (inclusive) against all
/// rows of `s`.
pub fn path_family_score(s: &Ssm, start: usize, end: usize) -> PathFamily {
    assert!(start <= end && end < s.n(), "segment out of range");
    family_over_rows(s.n(), end - start + 1, |r| &s.row(r)[start..])
}

/// Harmonic mean of normalized score and coverage, with the segment's own
/// self-match removed from both.
pub fn fitness(family: &PathFamily, segment_len: usize, n: usize) -> f64 {
    let len = segment_len as f64;
    let score = ((family.score - len) / (family.cells.max(1) as f64)).max(0.0);
    let coverage = ((family.coverage as f64 - len) / n.max(1) as f64).max(0.0);
    if score + coverage <= 0.0 {
        0.0
    } else {
        (2.0 * score * coverage / (score + coverage)).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScapeCell {
    pub start: usize,
    pub length: usize,
    pub fitness: f64,
}

impl ScapeCell {
    /// Segment center in frames.
    pub fn center(&self) -> f64 {
        self.start as f64 + (self.length as f64 - 1.0) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScapePlot {
    pub n: usize,
    pub frame_rate: f64,
    /// Segment grid stride; 1 unless the plot was decimated.
    pub stride: usize,
    pub cells: Vec<ScapeCell>,
}

/// Fitness of every segment of `s`.
///
/// With `max_axis = Some(m)` and more than `m` frames, only segments whose
/// start and length are multiples of `ceil(n / m)` are evaluated.
pub fn fitness_scape_plot(s: &Ssm, max_axis: Option<usize>) -> ScapePlot {
    let n = s.n();
    let stride = match max_axis {
        Some(m) if m > 0 && n > m => n.div_ceil(m),
        _ => 1,
    };
    let segments: Vec<(usize, usize)> = (1..=n)
        .filter(|len| len % stride == 0)
        .flat_map(|len| {
            (0..=n - len)
                .filter(move |start| start % stride == 0)
                .map(move |start| (start, len))
        })
        .collect();
    let cells = segments
        .into_par_iter()
        .map(|(start, length)| {
            let family = path_family_score(s, start, start + length - 1);
            ScapeCell {
                start,
                length,
                fitness: fitness(&family, length, n),
            }
        })
        .collect();
    ScapePlot {
        n,
        frame_rate: s.frame_rate,
        stride,
        cells,
    }
}

/// Maximum fitness over segments lasting `[low_s, high_s)` seconds;
/// `high_s = None` means unbounded.
pub fn structureness_indicator(
    plot: &ScapePlot,
    low_s: f64,
    high_s: Option<f64>,
) -> Result<f64, MetricError> {
    let high = high_s.unwrap_or(f64::INFINITY);
    if !(low_s < high) {
        return Err(MetricError::InvalidParameter(format!(
            "band [{low_s}, {high}) is empty"
        )));
    }
    plot.cells
        .iter()
        .filter(|c| {
            let d = c.length as f64 / plot.frame_rate;
            d >= low_s && d < high
        })
        .map(|c| c.fitness)
        .reduce(f64::max)
        .ok_or(MetricError::BandEmpty { low_s, high_s })
}

impl ScapePlot {
    /// Rows of `center_s,length_s,fitness`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("center,length,fitness\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{}\n",
                c.center() / self.frame_rate,
                c.length as f64 / self.frame_rate,
                c.fitness
            ));
        }
        out
    }

    /// Plain (P2) greyscale image: one row per segment length, longest at the
    /// top, one column per frame positioned at the segment center.
    pub fn to_pgm(&self) -> String {
        let n = self.n.max(1);
        let mut pixels = vec![0u32; n * n];
        for c in &self.cells {
            let row = n - c.length;
            let col = c.center().floor() as usize;
            pixels[row * n + col.min(n - 1)] = (c.fitness * 255.0).round() as u32;
        }
        let mut out = format!("P2\n{n} {n}\n255\n");
        for row in pixels.chunks(n) {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}
