//! Structural quality metrics for a single piece: structureness indicators
//! from a fitness scape plot over a chroma self-similarity matrix, pitch-class
//! entropy and consistency, and COSIATEC compression ratio.

mod chroma;
mod cosiatec;
mod pitch;
mod report;
mod scape;
mod ssm;

pub use chroma::{chromagram, frame_count, Chromagram, DEFAULT_FRAME_RATE};
pub use cosiatec::{compression_ratio, cosiatec, point_set, Point, PointSet, Tec, DEFAULT_GRID_S};
pub use pitch::{
    kl_divergence_bits, pitch_class_consistency, pitch_class_entropy, pitch_class_histogram,
    Entropy, PitchClassHistogram, DEFAULT_WINDOWS, KL_EPSILON, PITCH_CLASSES,
};
pub use report::{
    evaluate, scape_plot_for, Band, MetricConfig, MetricFlags, MetricKind, MetricReport,
    LONG_BAND, MEDIUM_BAND, SHORT_BAND,
};
pub use scape::{
    fitness, fitness_scape_plot, optimal_path_family, path_family_score, structureness_indicator,
    PathFamily, ScapeCell, ScapePlot, DEFAULT_MAX_AXIS,
};
pub use ssm::{compute_ssm, enhance_ssm, EnhanceParams, Ssm};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("not enough musical content for this metric")]
    InsufficientContent,
    #[error("no segment lasts between {low_s} s and {}", high_s.map_or("unbounded".to_string(), |h| format!("{h} s")))]
    BandEmpty { low_s: f64, high_s: Option<f64> },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
