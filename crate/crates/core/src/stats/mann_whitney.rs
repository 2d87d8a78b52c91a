use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::StatsError;

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;
/// Largest n1 * n2 for which the exact null distribution (conditional on the
/// tie pattern) is computed; larger samples use the normal approximation.
pub const EXACT_MAX_PRODUCT: usize = 2500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// U of the first sample: pairs where it is larger, ties counted half.
    pub u_a: f64,
    pub u_b: f64,
    /// min(U_a, U_b).
    pub u_statistic: f64,
    /// Continuity-corrected normal score (reported for exact tests too).
    pub z: f64,
    pub p_value: f64,
    pub significant: bool,
    pub method: TestMethod,
}

/// Midranks (1-based) of `values`, plus the tie-group sizes in value order.
fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        ties.push(j - i);
        i = j;
    }
    (ranks, ties)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Two-sided p-value from the exact permutation distribution of the first
/// sample's rank sum, given the tie groups (sizes in value order). Rank sums
/// are doubled so midranks stay integral.
fn exact_p(n1: usize, ties: &[usize], observed_twice: i64) -> f64 {
    let n: usize = ties.iter().sum();
    let max_sum = n * (n + 1);
    // ways[k][s]: weighted count of choices of k items with doubled rank sum s.
    let mut ways = vec![vec![0.0f64; max_sum + 1]; n1 + 1];
    ways[0][0] = 1.0;
    let mut seen = 0;
    for &t in ties {
        let twice_rank = 2 * seen + t + 1;
        let mut next = vec![vec![0.0f64; max_sum + 1]; n1 + 1];
        for k in 0..=n1.min(seen) {
            for s in 0..=max_sum {
                let w = ways[k][s];
                if w == 0.0 {
                    continue;
                }
                for pick in 0..=t.min(n1 - k) {
                    next[k + pick][s + pick * twice_rank] += w * binomial(t, pick);
                }
            }
        }
        ways = next;
        seen += t;
    }
    let center = (n1 * (n + 1)) as i64;
    let observed = (observed_twice - center).abs();
    let total = binomial(n, n1);
    let extreme: f64 = ways[n1]
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as i64 - center).abs() >= observed)
        .map(|(_, w)| w)
        .sum();
    (extreme / total).clamp(0.0, 1.0)
}

/// Two-sided Mann-Whitney U test.
///
/// When `n1 * n2 <= EXACT_MAX_PRODUCT` the p-value comes from the exact
/// permutation distribution conditional on the observed ties; otherwise from
/// the normal approximation with tie-corrected variance and continuity
/// correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let (n1, n2) = (a.len(), b.len());
    let n = n1 + n2;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let rank_sum_a: f64 = ranks[..n1].iter().sum();
    let u_a = rank_sum_a - (n1 * (n1 + 1)) as f64 / 2.0;
    let u_b = (n1 * n2) as f64 - u_a;

    let nn = (n1 * n2) as f64;
    let tie_term: f64 =
        ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1)).max(1) as f64;
    let variance = nn / 12.0 * ((n + 1) as f64 - tie_term);
    let z = if variance > 0.0 {
        ((u_a - nn / 2.0).abs() - 0.5).max(0.0) / variance.sqrt()
    } else {
        0.0
    };

    let (p_value, method) = if variance <= 0.0 {
        (1.0, TestMethod::Exact)
    } else if n1 * n2 <= EXACT_MAX_PRODUCT {
        let twice: i64 = ranks[..n1].iter().map(|r| (2.0 * r).round() as i64).sum();
        (exact_p(n1, &ties, twice), TestMethod::Exact)
    } else {
        let upper = 1.0 - Normal::standard().cdf(z);
        ((2.0 * upper).clamp(0.0, 1.0), TestMethod::Normal)
    };
    Ok(TestResult {
        u_a,
        u_b,
        u_statistic: u_a.min(u_b),
        z,
        p_value,
        significant: p_value < SIGNIFICANCE_LEVEL,
        method,
    })
}
