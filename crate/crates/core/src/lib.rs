//! Discovering associations among mixed binary and continuous variables.
//!
//! Continuous columns are cut in two at the threshold that best separates a
//! binary response, chosen on random half-splits of the data. The other
//! half of every split is cross-tabulated and each subset of predictors is
//! scored by the catdap conditional AIC. Averaging over many splits gives
//! stable thresholds and a model ranking.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datagen;
pub mod discretize;
pub mod error;
pub mod pipeline;
pub mod stats;
pub mod tables;

pub use error::{Error, Result};
pub use pipeline::{AggregateResult, AnalysisConfig, Column, Dataset, ThresholdRange};
pub use tables::{CategoricalSeries, ContingencyTable, ModelSpec};
