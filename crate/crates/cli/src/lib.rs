//! Batch front end for threshold discovery and model ranking: CSV
//! ingestion, JSON configuration, text/JSON reports, DOT diagrams and the
//! simulation study.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod dot;
pub mod error;
pub mod load;
pub mod manifest;
pub mod report;

#[cfg(test)]
mod testutil;

pub use error::{CliError, Result};
