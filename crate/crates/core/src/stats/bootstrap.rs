use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::StatsError;

pub const DEFAULT_RESAMPLES: usize = 9999;
pub const DEFAULT_LEVEL: f64 = 0.95;
/// Resamples drawn from one RNG stream. Block `k` uses stream `k` of the
/// seeded generator, so the distribution does not depend on thread count.
pub const RESAMPLE_BLOCK: usize = 1024;

/// Labeled finite values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub label: String,
    pub values: Vec<f64>,
}

impl Sample {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        Ok(Self {
            label: label.into(),
            values,
        })
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }
}

/// Arithmetic mean, clamped to the sample range so rounding never places it
/// outside the values.
pub fn mean(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    (values.iter().sum::<f64>() / values.len() as f64).clamp(lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub level: f64,
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            level: DEFAULT_LEVEL,
            resamples: DEFAULT_RESAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub low: f64,
    pub high: f64,
    /// The statistic on the original sample.
    pub estimate: f64,
    pub level: f64,
    pub resamples: usize,
    pub method: String,
}

/// Statistic of `resamples` bootstrap resamples, in resample order.
pub fn bootstrap_distribution(
    values: &[f64],
    statistic: &(dyn Fn(&[f64]) -> f64 + Sync),
    resamples: usize,
    seed: u64,
) -> Vec<f64> {
    let n = values.len();
    let blocks = resamples.div_ceil(RESAMPLE_BLOCK);
    (0..blocks)
        .into_par_iter()
        .flat_map_iter(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block as u64);
            let count = RESAMPLE_BLOCK.min(resamples - block * RESAMPLE_BLOCK);
            let mut buf = vec![0.0; n];
            (0..count)
                .map(|_| {
                    for slot in buf.iter_mut() {
                        *slot = values[rng.gen_range(0..n)];
                    }
                    statistic(&buf)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Jackknife acceleration; 0 when the leave-one-out values do not vary.
pub fn jackknife_acceleration(values: &[f64], statistic: &dyn Fn(&[f64]) -> f64) -> f64 {
    let n = values.len();
    let mut buf = Vec::with_capacity(n.saturating_sub(1));
    let loo: Vec<f64> = (0..n)
        .map(|i| {
            buf.clear();
            buf.extend(values.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
            statistic(&buf)
        })
        .collect();
    let center = mean(&loo);
    let (mut num, mut den) = (0.0, 0.0);
    for &t in &loo {
        let d = center - t;
        num += d * d * d;
        den += d * d;
    }
    if den <= 0.0 {
        0.0
    } else {
        num / (6.0 * den.powf(1.5))
    }
}

/// Adjusted lower and upper percentiles for bias `z0` and acceleration `a`.
pub fn bca_percentiles(z0: f64, a: f64, level: f64) -> (f64, f64) {
    let normal = Normal::standard();
    let alpha = (1.0 - level) / 2.0;
    let adjust = |z: f64| {
        let s = z0 + z;
        normal.cdf(z0 + s / (1.0 - a * s))
    };
    (
        adjust(normal.inverse_cdf(alpha)),
        adjust(normal.inverse_cdf(1.0 - alpha)),
    )
}

/// Nearest-rank order statistic of a sorted slice at percentile `q`.
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let b = sorted.len();
    let rank = ((q * b as f64).ceil() as usize).clamp(1, b);
    sorted[rank - 1]
}

/// BCa interval for the mean.
pub fn bootstrap_bca(values: &[f64], cfg: &BootstrapConfig) -> Result<IntervalEstimate, StatsError> {
    bootstrap_bca_with(values, &mean, cfg)
}

/// Bias-corrected and accelerated bootstrap interval for `statistic`.
///
/// The bias term counts resamples below the estimate plus half of those
/// equal to it; a proportion of exactly 0 or 1 is pulled in by half a
/// resample so the normal quantile stays finite.
pub fn bootstrap_bca_with(
    values: &[f64],
    statistic: &(dyn Fn(&[f64]) -> f64 + Sync),
    cfg: &BootstrapConfig,
) -> Result<IntervalEstimate, StatsError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    if values.len() < 2 {
        return Err(StatsError::TooFewValues {
            needed: 2,
            got: values.len(),
        });
    }
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(StatsError::InvalidLevel(cfg.level));
    }
    if cfg.resamples == 0 {
        return Err(StatsError::NoResamples);
    }
    let estimate = statistic(values);
    let interval = |low, high| IntervalEstimate {
        low,
        high,
        estimate,
        level: cfg.level,
        resamples: cfg.resamples,
        method: "BCa".to_string(),
    };
    if values.iter().all(|&v| v == values[0]) {
        return Ok(interval(estimate, estimate));
    }

    let mut dist = bootstrap_distribution(values, statistic, cfg.resamples, cfg.seed);
    dist.sort_by(f64::total_cmp);
    let b = dist.len() as f64;
    let below = dist.partition_point(|&t| t < estimate);
    let equal = dist[below..].partition_point(|&t| t <= estimate);
    let half = 0.5 / b;
    let prop = ((below as f64 + 0.5 * equal as f64) / b).clamp(half, 1.0 - half);
    let z0 = Normal::standard().inverse_cdf(prop);
    let a = jackknife_acceleration(values, statistic);
    let (q1, q2) = bca_percentiles(z0, a, cfg.level);
    Ok(interval(nearest_rank(&dist, q1), nearest_rank(&dist, q2)))
}
