//! A posteriori quantities: the elliptic estimator `Η₁`, the computed
//! indicator `𝕳_R`, the full estimator `𝔈_t`, the initial estimator `𝔈_0`,
//! error functionals against known solutions, and EOC/EI tables.

pub mod eta1;
pub mod levels;
pub mod metrics;
pub mod observer;
pub mod report;

pub use eta1::{eta1, eta1_parts, residual_rule, Eta1Parts};
pub use levels::{
    estimator_full, indicator_tilde, level_terms, EstimatorContext, LevelCache, LevelTerms, FULL_TERM_NAMES,
    TILDE_TERM_NAMES, VISCOUS_TERM_NAMES,
};
pub use metrics::{
    effectivity, eoc, error_modified, error_reduced, error_sample, estimator_initial, ErrorSample, InitialEstimate,
};
pub use observer::{EstimatorObserver, EstimatorRow, EstimatorSummary, ReferenceData, TimeIntegral};
pub use report::{write_report_csv, write_summary_json, ConvergenceRow, ConvergenceTable, GAP};
