use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_bca, mean, BootstrapConfig, IntervalEstimate};
use super::seed::derive_seed;
use super::StatsError;
use crate::metrics::{MetricKind, MetricReport};

/// Percent change of the explicit-notation mean relative to the original.
pub fn improvement_pct(original: &[f64], explicit: &[f64]) -> Result<f64, StatsError> {
    if original.is_empty() || explicit.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let base = mean(original);
    if base == 0.0 {
        return Err(StatsError::Undefined);
    }
    Ok(100.0 * (mean(explicit) - base) / base)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    /// The baseline set has fewer than two values for this metric.
    MissingA,
    /// The compared set has fewer than two values for this metric.
    MissingB,
    MissingBoth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCell {
    pub metric: MetricKind,
    pub n_a: usize,
    pub n_b: usize,
    pub ci_a: Option<IntervalEstimate>,
    pub ci_b: Option<IntervalEstimate>,
    pub improvement_pct: Option<f64>,
    /// The two intervals do not overlap.
    pub significant: bool,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub label_a: String,
    pub label_b: String,
    pub level: f64,
    pub resamples: usize,
    pub cells: Vec<ComparisonCell>,
}

impl ComparisonTable {
    pub fn cell(&self, metric: MetricKind) -> Option<&ComparisonCell> {
        self.cells.iter().find(|c| c.metric == metric)
    }

    pub fn csv_header(&self) -> Vec<String> {
        let (a, b) = (&self.label_a, &self.label_b);
        vec![
            "metric".into(),
            format!("{a}_n"),
            format!("{a}_mean"),
            format!("{a}_low"),
            format!("{a}_high"),
            format!("{b}_n"),
            format!("{b}_mean"),
            format!("{b}_low"),
            format!("{b}_high"),
            "improvement_pct".into(),
            "significant".into(),
            "status".into(),
        ]
    }

    pub fn csv_records(&self) -> Vec<Vec<String>> {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        self.cells
            .iter()
            .map(|c| {
                let ci = |ci: &Option<IntervalEstimate>| {
                    [
                        opt(ci.as_ref().map(|c| c.estimate)),
                        opt(ci.as_ref().map(|c| c.low)),
                        opt(ci.as_ref().map(|c| c.high)),
                    ]
                };
                let mut row = vec![c.metric.name().to_string(), c.n_a.to_string()];
                row.extend(ci(&c.ci_a));
                row.push(c.n_b.to_string());
                row.extend(ci(&c.ci_b));
                row.push(opt(c.improvement_pct));
                row.push(c.significant.to_string());
                row.push(
                    serde_json::to_value(c.status)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_default(),
                );
                row
            })
            .collect()
    }
}

/// Per-metric BCa intervals for two report sets, the improvement of `b` over
/// `a`, and CI-disjointness flags. Each metric and set gets its own seed
/// derived from `cfg.seed`.
pub fn compare_sets(
    label_a: &str,
    reports_a: &[MetricReport],
    label_b: &str,
    reports_b: &[MetricReport],
    cfg: &BootstrapConfig,
) -> Result<ComparisonTable, StatsError> {
    if reports_a.is_empty() || reports_b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut cells = Vec::new();
    for (mi, &metric) in MetricKind::ALL.iter().enumerate() {
        let values = |reports: &[MetricReport]| -> Vec<f64> {
            reports.iter().filter_map(|r| r.get(metric)).collect()
        };
        let (va, vb) = (values(reports_a), values(reports_b));
        let interval = |v: &[f64], set: u64| -> Result<Option<IntervalEstimate>, StatsError> {
            if v.len() < 2 {
                return Ok(None);
            }
            let seeded = BootstrapConfig {
                seed: derive_seed(cfg.seed, &[mi as u64, set]),
                ..*cfg
            };
            bootstrap_bca(v, &seeded).map(Some)
        };
        let ci_a = interval(&va, 0)?;
        let ci_b = interval(&vb, 1)?;
        let status = match (&ci_a, &ci_b) {
            (Some(_), Some(_)) => CellStatus::Ok,
            (None, Some(_)) => CellStatus::MissingA,
            (Some(_), None) => CellStatus::MissingB,
            (None, None) => CellStatus::MissingBoth,
        };
        let significant = match (&ci_a, &ci_b) {
            (Some(x), Some(y)) => x.high < y.low || y.high < x.low,
            _ => false,
        };
        let improvement = if status == CellStatus::Ok {
            improvement_pct(&va, &vb).ok()
        } else {
            None
        };
        cells.push(ComparisonCell {
            metric,
            n_a: va.len(),
            n_b: vb.len(),
            ci_a,
            ci_b,
            improvement_pct: improvement,
            significant,
            status,
        });
    }
    Ok(ComparisonTable {
        label_a: label_a.to_string(),
        label_b: label_b.to_string(),
        level: cfg.level,
        resamples: cfg.resamples,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricFlags;

    fn report(v: f64) -> MetricReport {
        MetricReport {
            source: String::new(),
            si_short: Some(v),
            si_medium: Some(v / 2.0),
            si_long: None,
            entropy: Some(3.0 + v),
            consistency: Some(v),
            compression_ratio: Some(1.0 + v),
            flags: MetricFlags::default(),
        }
    }

    #[test]
    fn improvement_examples() {
        assert!((improvement_pct(&[0.10], &[0.20]).unwrap() - 100.0).abs() < 1e-9);
        assert_eq!(improvement_pct(&[0.3, 0.5], &[0.5, 0.3]).unwrap(), 0.0);
        let v = improvement_pct(&[0.175], &[0.145]).unwrap();
        assert!((v + 17.142857).abs() < 1e-5, "{v}");
        assert_eq!(improvement_pct(&[0.0], &[1.0]), Err(StatsError::Undefined));
    }

    #[test]
    fn identical_sets() {
        let a: Vec<MetricReport> = (0..8).map(|i| report(i as f64 / 10.0)).collect();
        let cfg = BootstrapConfig { resamples: 999, ..Default::default() };
        let t = compare_sets("onoff", &a, "explicit", &a, &cfg).unwrap();
        for c in &t.cells {
            if c.status == CellStatus::Ok {
                assert_eq!(c.improvement_pct, Some(0.0));
                assert!(!c.significant);
            }
        }
        assert_eq!(t.cell(MetricKind::SiLong).unwrap().status, CellStatus::MissingBoth);
        assert_eq!(t.csv_records().len(), 6);
        assert!(t.csv_records().iter().all(|r| r.len() == t.csv_header().len()));
    }

    #[test]
    fn disjoint_sets_are_flagged() {
        let a: Vec<MetricReport> = (0..10).map(|i| report(i as f64 / 100.0)).collect();
        let b: Vec<MetricReport> = (0..10).map(|i| report(1.0 + i as f64 / 100.0)).collect();
        let cfg = BootstrapConfig { resamples: 999, ..Default::default() };
        let t = compare_sets("a", &a, "b", &b, &cfg).unwrap();
        assert!(t.cell(MetricKind::SiShort).unwrap().significant);
    }
}
