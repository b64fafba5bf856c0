//! CSV ingestion driven by the column schema.

use std::collections::BTreeMap;
use std::path::Path;

use catdap_core::{CategoricalSeries, Column, Dataset};

use crate::config::{ColumnKind, ColumnSchema};
use crate::error::{CliError, Result};

/// Offending cells listed in a rejection message before truncating.
const MAX_LISTED: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedData {
    pub dataset: Dataset,
    /// Epsilon actually used for each log-transformed column.
    pub epsilons: BTreeMap<String, f64>,
}

/// `x -> ln(max(x, epsilon))`. Without an explicit epsilon, half the
/// smallest positive value is used. Returns the epsilon applied.
pub fn log_transform(values: &[f64], epsilon: Option<f64>) -> Result<(Vec<f64>, f64)> {
    if let Some(v) = values.iter().find(|&&v| !(v >= 0.0)) {
        return Err(CliError::Input(format!(
            "log transform needs non-negative values, found {v}"
        )));
    }
    let epsilon = match epsilon {
        Some(e) if e > 0.0 => e,
        Some(e) => {
            return Err(CliError::Input(format!(
                "epsilon must be positive, got {e}"
            )))
        }
        None => {
            let min_pos = values
                .iter()
                .copied()
                .filter(|&v| v > 0.0)
                .fold(f64::INFINITY, f64::min);
            if !min_pos.is_finite() {
                return Err(CliError::Input(
                    "cannot pick a default epsilon: no positive values".into(),
                ));
            }
            min_pos / 2.0
        }
    };
    Ok((
        values.iter().map(|&v| v.max(epsilon).ln()).collect(),
        epsilon,
    ))
}

fn parse_number(cell: &str) -> Option<f64> {
    let v: f64 = cell.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Read the schema's columns from a headed CSV file. Any cell that does
/// not parse rejects the whole file, listing the offending lines.
pub fn load_csv(path: &Path, schema: &BTreeMap<String, ColumnSchema>) -> Result<LoadedData> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    load_reader(file, schema)
}

pub fn load_reader<R: std::io::Read>(
    reader: R,
    schema: &BTreeMap<String, ColumnSchema>,
) -> Result<LoadedData> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("cannot read header: {e}")))?
        .clone();
    if headers.is_empty() || headers.iter().all(|h| h.trim().is_empty()) {
        return Err(CliError::Input("input is empty (no header row)".into()));
    }
    let mut positions = Vec::new();
    for name in schema.keys() {
        let pos = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Input(format!("missing column `{name}` in header")))?;
        positions.push((pos, name));
    }
    // keep header order
    positions.sort();

    let mut raw: Vec<Vec<f64>> = vec![Vec::new(); positions.len()];
    let mut bad: Vec<String> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::Input(format!("malformed csv: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        for (k, &(pos, name)) in positions.iter().enumerate() {
            let cell = record.get(pos).unwrap_or("");
            let kind = schema[name].kind;
            let parsed = parse_number(cell).filter(|&v| match kind {
                ColumnKind::Continuous => true,
                ColumnKind::Binary => v >= 0.0,
                ColumnKind::Categorical => v >= 0.0 && v.fract() == 0.0,
            });
            match parsed {
                Some(v) => raw[k].push(v),
                None => bad.push(format!("line {line} column `{name}`: {cell:?}")),
            }
        }
    }
    if !bad.is_empty() {
        let total = bad.len();
        bad.truncate(MAX_LISTED);
        let more = if total > MAX_LISTED {
            format!(" (and {} more)", total - MAX_LISTED)
        } else {
            String::new()
        };
        return Err(CliError::Input(format!(
            "{total} invalid cell(s): {}{more}",
            bad.join("; ")
        )));
    }
    if raw.first().is_none_or(Vec::is_empty) {
        return Err(CliError::Input("input has no data rows".into()));
    }

    let mut dataset = Dataset::new();
    let mut epsilons = BTreeMap::new();
    for ((_, name), values) in positions.into_iter().zip(raw) {
        let col = &schema[name];
        let column = match col.kind {
            ColumnKind::Continuous if col.log_transform => {
                let (logged, eps) = log_transform(&values, col.epsilon)?;
                epsilons.insert(name.clone(), eps);
                Column::Continuous(logged)
            }
            ColumnKind::Continuous => Column::Continuous(values),
            ColumnKind::Binary => Column::Categorical(CategoricalSeries::binary(
                name.clone(),
                values.iter().map(|&v| usize::from(v > 0.0)).collect(),
            )?),
            ColumnKind::Categorical => {
                let codes: Vec<usize> = values.iter().map(|&v| v as usize).collect();
                let n_categories = codes.iter().max().map_or(1, |m| m + 1);
                Column::Categorical(CategoricalSeries::new(name.clone(), codes, n_categories)?)
            }
        };
        dataset.push(name.clone(), column)?;
    }
    Ok(LoadedData { dataset, epsilons })
}
