//! JSON run configuration: column schema plus the analyses to run.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use catdap_core::discretize::DEFAULT_GRID_SIZE;
use catdap_core::pipeline::DEFAULT_ITERATIONS;
use catdap_core::ThresholdRange;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Continuous,
    /// Presence/absence: any value above zero is coded 1.
    Binary,
    /// Non-negative integer codes.
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSchema {
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub log_transform: bool,
    /// Replacement for values below it before taking logs; defaults to half
    /// the smallest positive value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Threshold search interval `[a, b]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    pub response: String,
    pub predictors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub columns: BTreeMap<String, ColumnSchema>,
    pub analyses: Vec<AnalysisSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_grid")]
    pub grid_size: usize,
}

fn default_iterations() -> usize {
    DEFAULT_ITERATIONS
}

fn default_grid() -> usize {
    DEFAULT_GRID_SIZE
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(CliError::Input("iterations must be positive".into()));
        }
        if self.grid_size == 0 {
            return Err(CliError::Input("grid_size must be positive".into()));
        }
        for (name, col) in &self.columns {
            if let Some([a, b]) = col.range {
                if !(a < b) {
                    return Err(CliError::Input(format!(
                        "column `{name}`: range [{a}, {b}] needs a < b"
                    )));
                }
            }
            if col.grid_size == Some(0) {
                return Err(CliError::Input(format!(
                    "column `{name}`: grid_size must be positive"
                )));
            }
            if col.kind != ColumnKind::Continuous && (col.log_transform || col.range.is_some()) {
                return Err(CliError::Input(format!(
                    "column `{name}`: log_transform and range apply to continuous columns only"
                )));
            }
            if let Some(eps) = col.epsilon {
                if !(eps > 0.0) {
                    return Err(CliError::Input(format!(
                        "column `{name}`: epsilon must be positive"
                    )));
                }
            }
        }
        if self.analyses.is_empty() {
            return Err(CliError::Input("config lists no analyses".into()));
        }
        for a in &self.analyses {
            for name in std::iter::once(&a.response).chain(&a.predictors) {
                if !self.columns.contains_key(name) {
                    return Err(CliError::Input(format!(
                        "analysis uses undeclared column `{name}`"
                    )));
                }
            }
            if a.predictors.contains(&a.response) {
                return Err(CliError::Input(format!(
                    "`{}` is both response and predictor",
                    a.response
                )));
            }
            for p in &a.predictors {
                let col = &self.columns[p];
                if col.kind == ColumnKind::Continuous && col.range.is_none() {
                    return Err(CliError::Input(format!(
                        "continuous predictor `{p}` needs a threshold range"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Threshold ranges for every continuous column that has one.
    pub fn ranges(&self) -> BTreeMap<String, ThresholdRange> {
        self.columns
            .iter()
            .filter_map(|(name, col)| {
                col.range.map(|[lower, upper]| {
                    (
                        name.clone(),
                        ThresholdRange {
                            lower,
                            upper,
                            grid_size: col.grid_size.unwrap_or(self.grid_size),
                        },
                    )
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "columns": {
            "whale": {"kind": "binary"},
            "krill": {"kind": "continuous", "log_transform": true, "range": [-3, 8]},
            "sst": {"kind": "continuous", "range": [-2.0, 2.5], "grid_size": 40}
        },
        "analyses": [{"response": "whale", "predictors": ["krill", "sst"]}],
        "seed": 7
    }"#;

    #[test]
    fn parses_with_defaults() {
        let c = RunConfig::from_json(SAMPLE).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.iterations, 1000);
        assert_eq!(c.grid_size, 100);
        let ranges = c.ranges();
        assert_eq!(ranges["krill"].grid_size, 100);
        assert_eq!(ranges["sst"].grid_size, 40);
        assert_eq!(ranges["krill"].lower, -3.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let missing_range = SAMPLE.replace(r#", "range": [-3, 8]"#, "");
        assert!(RunConfig::from_json(&missing_range).is_err());
        let inverted = SAMPLE.replace("[-3, 8]", "[8, -3]");
        assert!(RunConfig::from_json(&inverted).is_err());
        let undeclared = SAMPLE.replace(r#""krill", "sst""#, r#""krill", "depth""#);
        assert!(RunConfig::from_json(&undeclared).is_err());
        let unknown_field = SAMPLE.replace(r#""seed": 7"#, r#""sed": 7"#);
        assert!(RunConfig::from_json(&unknown_field).is_err());
        assert!(RunConfig::from_json("{").is_err());
    }
}
