use std::fmt;

use serde::{Deserialize, Serialize};

use super::chroma::{chromagram, DEFAULT_FRAME_RATE};
use super::cosiatec::{compression_ratio, point_set, DEFAULT_GRID_S};
use super::pitch::{pitch_class_consistency, pitch_class_entropy, pitch_class_histogram, DEFAULT_WINDOWS};
use super::scape::{fitness_scape_plot, structureness_indicator, ScapePlot, DEFAULT_MAX_AXIS};
use super::ssm::{compute_ssm, enhance_ssm, EnhanceParams};
use crate::smf::NoteList;

/// Segment-duration band in seconds, `[low_s, high_s)`; no upper bound when
/// `high_s` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub low_s: f64,
    pub high_s: Option<f64>,
}

pub const SHORT_BAND: Band = Band {
    low_s: 3.0,
    high_s: Some(8.0),
};
pub const MEDIUM_BAND: Band = Band {
    low_s: 8.0,
    high_s: Some(15.0),
};
pub const LONG_BAND: Band = Band {
    low_s: 15.0,
    high_s: None,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    /// Chroma frame rate.
    pub frame_rate: f64,
    /// Frame rate of the self-similarity analysis; chroma is block-summed
    /// down to it.
    pub analysis_rate: f64,
    pub enhance: EnhanceParams,
    /// Scape-plot decimation threshold in analysis frames; `None` is exact.
    pub max_axis: Option<usize>,
    pub windows: usize,
    pub grid_s: f64,
    pub short_band: Band,
    pub medium_band: Band,
    pub long_band: Band,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            frame_rate: DEFAULT_FRAME_RATE,
            analysis_rate: 2.0,
            enhance: EnhanceParams::default(),
            max_axis: Some(DEFAULT_MAX_AXIS),
            windows: DEFAULT_WINDOWS,
            grid_s: DEFAULT_GRID_S,
            short_band: SHORT_BAND,
            medium_band: MEDIUM_BAND,
            long_band: LONG_BAND,
        }
    }
}

impl MetricConfig {
    pub fn downsample_factor(&self) -> usize {
        ((self.frame_rate / self.analysis_rate).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    SiShort,
    SiMedium,
    SiLong,
    Entropy,
    Consistency,
    CompressionRatio,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] = [
        MetricKind::SiShort,
        MetricKind::SiMedium,
        MetricKind::SiLong,
        MetricKind::Entropy,
        MetricKind::Consistency,
        MetricKind::CompressionRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::SiShort => "si_short",
            MetricKind::SiMedium => "si_medium",
            MetricKind::SiLong => "si_long",
            MetricKind::Entropy => "entropy",
            MetricKind::Consistency => "consistency",
            MetricKind::CompressionRatio => "compression_ratio",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricFlags {
    pub note_count: usize,
    pub empty_histogram: bool,
    /// Anomalies reported while decoding the piece from tokens.
    pub decode_anomalies: usize,
    /// Metrics that could not be computed for this piece.
    pub missing: Vec<MetricKind>,
}

/// All metrics for one piece. `None` marks a metric the piece is too short
/// or too sparse for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub source: String,
    pub si_short: Option<f64>,
    pub si_medium: Option<f64>,
    pub si_long: Option<f64>,
    pub entropy: Option<f64>,
    pub consistency: Option<f64>,
    pub compression_ratio: Option<f64>,
    pub flags: MetricFlags,
}

impl MetricReport {
    pub fn get(&self, kind: MetricKind) -> Option<f64> {
        match kind {
            MetricKind::SiShort => self.si_short,
            MetricKind::SiMedium => self.si_medium,
            MetricKind::SiLong => self.si_long,
            MetricKind::Entropy => self.entropy,
            MetricKind::Consistency => self.consistency,
            MetricKind::CompressionRatio => self.compression_ratio,
        }
    }

    pub fn csv_header() -> Vec<&'static str> {
        let mut h = vec!["source"];
        h.extend(MetricKind::ALL.iter().map(|k| k.name()));
        h.extend(["note_count", "empty_histogram", "decode_anomalies"]);
        h
    }

    /// One CSV record matching [`MetricReport::csv_header`]; missing values
    /// are empty fields.
    pub fn csv_record(&self) -> Vec<String> {
        let mut r = vec![self.source.clone()];
        r.extend(
            MetricKind::ALL
                .iter()
                .map(|&k| self.get(k).map_or(String::new(), |v| v.to_string())),
        );
        r.push(self.flags.note_count.to_string());
        r.push(self.flags.empty_histogram.to_string());
        r.push(self.flags.decode_anomalies.to_string());
        r
    }
}

/// Scape plot of the piece at the configured analysis rate, or `None` when
/// it spans fewer than two analysis frames.
pub fn scape_plot_for(notes: &NoteList, cfg: &MetricConfig) -> Option<ScapePlot> {
    let chroma = chromagram(notes, cfg.frame_rate).downsample(cfg.downsample_factor());
    if chroma.len() < 2 {
        return None;
    }
    let ssm = enhance_ssm(&compute_ssm(&chroma), &cfg.enhance);
    Some(fitness_scape_plot(&ssm, cfg.max_axis))
}

pub fn evaluate(source: &str, notes: &NoteList, cfg: &MetricConfig) -> MetricReport {
    let plot = scape_plot_for(notes, cfg);
    let si = |band: Band| {
        plot.as_ref()
            .and_then(|p| structureness_indicator(p, band.low_s, band.high_s).ok())
    };
    let entropy = pitch_class_entropy(&pitch_class_histogram(notes));
    let mut report = MetricReport {
        source: source.to_string(),
        si_short: si(cfg.short_band),
        si_medium: si(cfg.medium_band),
        si_long: si(cfg.long_band),
        entropy: (!entropy.empty).then_some(entropy.bits),
        consistency: pitch_class_consistency(notes, cfg.windows).ok(),
        compression_ratio: (!notes.is_empty())
            .then(|| compression_ratio(&point_set(notes, cfg.grid_s))),
        flags: MetricFlags {
            note_count: notes.len(),
            empty_histogram: entropy.empty,
            ..MetricFlags::default()
        },
    };
    report.flags.missing = MetricKind::ALL
        .into_iter()
        .filter(|&k| report.get(k).is_none())
        .collect();
    report
}
