//! Integral indicators of enterprise event series.
//!
//! The pipeline maps labelled event channels onto a competency framework,
//! slides a `k`-period window over the masked series, forms the scaled Gram
//! matrix of each window and sums its absolute rows into per-channel integral
//! indicators. Two operating regimes are compared period by period.
//!
//! - [`catalog`]: competency framework (bundled Dublin Descriptors).
//! - [`enterprise`]: event model, competency mapping, budget check, window z-scoring.
//! - [`engine`]: window blocks, coefficient matrices, indicators, regime comparison.
//! - [`oracle`]: brute-force reference used by tests.
//! - [`synth`]: seeded synthetic scenarios.
//! - [`io`]: file formats, bundled reference table, report emission.
//! - [`cli`]: command-line entry point.

pub mod catalog;
pub mod cli;
pub mod engine;
pub mod enterprise;
pub mod error;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod synth;

pub use catalog::{load_catalog, DescriptorCatalog, DescriptorEntry};
pub use engine::{
    build_window_matrix, compare_regimes, correlation_matrix, indicator_series, integral_indicator,
    pairwise_coefficient, CorrelationMatrix, IndicatorColumn, IndicatorSeries, RegimeComparison,
    WindowMatrix,
};
pub use enterprise::{
    apply_mapping, check_budget, standardize_window, BudgetReport, CompetencyMapping,
    EnterpriseModel, MappedSeries, Normalization,
};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use oracle::naive_oracle;
pub use synth::{generate_series, paired_scenarios, ScenarioConfig};
