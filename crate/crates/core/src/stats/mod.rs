//! Bootstrap confidence intervals, Mann-Whitney U tests and the comparison
//! tables built from them.

mod bootstrap;
mod compare;
mod mann_whitney;
mod seed;
mod survey;

pub use bootstrap::{
    bca_percentiles, bootstrap_bca, bootstrap_bca_with, bootstrap_distribution, jackknife_acceleration,
    mean, nearest_rank, BootstrapConfig, IntervalEstimate, Sample, DEFAULT_LEVEL, DEFAULT_RESAMPLES,
    RESAMPLE_BLOCK,
};
pub use compare::{compare_sets, improvement_pct, CellStatus, ComparisonCell, ComparisonTable};
pub use mann_whitney::{mann_whitney_u, TestMethod, TestResult, EXACT_MAX_PRODUCT, SIGNIFICANCE_LEVEL};
pub use seed::derive_seed;
pub use survey::{analyze_survey, SurveyQuestion, SurveyResponse, SurveyTest};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("confidence level {0} is not in (0, 1)")]
    InvalidLevel(f64),
    #[error("at least one resample is required")]
    NoResamples,
    #[error("improvement is undefined for a zero baseline mean")]
    Undefined,
}
