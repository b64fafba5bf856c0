//! Run manifests: everything needed to repeat a run bit for bit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use catdap_core::ThresholdRange;

use crate::config::RunConfig;

pub const SOFTWARE: &str = "catdap";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub software: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub iterations: usize,
    pub grid_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// Threshold ranges actually searched, with per-column grid sizes.
    #[serde(default)]
    pub ranges: BTreeMap<String, ThresholdRange>,
    /// Epsilon used by each log-transformed column.
    #[serde(default)]
    pub epsilons: BTreeMap<String, f64>,
    /// Fully resolved configuration; usable directly as `--config`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, iterations: usize, grid_size: usize) -> Self {
        Self {
            software: SOFTWARE.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            iterations,
            grid_size,
            input: None,
            ranges: BTreeMap::new(),
            epsilons: BTreeMap::new(),
            config: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest always serializes");
        s.push('\n');
        s
    }
}
