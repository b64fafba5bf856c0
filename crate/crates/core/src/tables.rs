//! Contingency tables and conditional-model AIC scoring.
//!
//! A table is a dense m-way array of cell counts, stored row-major with the
//! last axis varying fastest. Models are `(response; predictors)` pairs and
//! are scored with the catdap conditional AIC, which is normalized so that
//! the model without predictors scores exactly zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of dense cells in a table.
pub const DEFAULT_MAX_CELLS: usize = 1 << 20;

/// A column of small-integer category codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoricalSeries {
    name: String,
    codes: Vec<usize>,
    n_categories: usize,
}

impl CategoricalSeries {
    pub fn new(name: impl Into<String>, codes: Vec<usize>, n_categories: usize) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::EmptyInput);
        }
        if n_categories == 0 {
            return Err(Error::NoCategories);
        }
        if let Some((row, &code)) = codes.iter().enumerate().find(|(_, &c)| c >= n_categories) {
            return Err(Error::CodeOutOfRange {
                row,
                code,
                n_categories,
            });
        }
        Ok(Self {
            name: name.into(),
            codes,
            n_categories,
        })
    }

    /// Two-category series; codes must be 0 or 1.
    pub fn binary(name: impl Into<String>, codes: Vec<usize>) -> Result<Self> {
        Self::new(name, codes, 2)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn codes(&self) -> &[usize] {
        &self.codes
    }

    pub fn n_categories(&self) -> usize {
        self.n_categories
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.n_categories == 2
    }

    /// Series restricted to the given row indices, in that order.
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        Self::new(
            self.name.clone(),
            rows.iter().map(|&r| self.codes[r]).collect(),
            self.n_categories,
        )
    }

    /// Swap the labels 0 and 1 of a binary series.
    pub fn flipped(&self) -> Result<Self> {
        if !self.is_binary() {
            return Err(Error::NotBinary(self.name.clone()));
        }
        Ok(Self {
            name: self.name.clone(),
            codes: self.codes.iter().map(|&c| 1 - c).collect(),
            n_categories: 2,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    labels: Vec<String>,
    dims: Vec<usize>,
    counts: Vec<u64>,
    total_n: u64,
}

impl ContingencyTable {
    /// Table from explicit counts in row-major order.
    pub fn from_counts(dims: Vec<usize>, counts: Vec<u64>) -> Result<Self> {
        let labels = (0..dims.len()).map(|i| format!("V{}", i + 1)).collect();
        Self::with_labels(labels, dims, counts)
    }

    pub fn with_labels(labels: Vec<String>, dims: Vec<usize>, counts: Vec<u64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyInput);
        }
        if dims.contains(&0) {
            return Err(Error::NoCategories);
        }
        if labels.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                found: labels.len(),
            });
        }
        let cells = checked_cells(&dims, usize::MAX)?;
        if counts.len() != cells {
            return Err(Error::LengthMismatch {
                expected: cells,
                found: counts.len(),
            });
        }
        let total_n = counts.iter().sum();
        Ok(Self {
            labels,
            dims,
            counts,
            total_n,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_n(&self) -> u64 {
        self.total_n
    }

    pub fn n_axes(&self) -> usize {
        self.dims.len()
    }

    fn strides(&self) -> Vec<usize> {
        strides_of(&self.dims)
    }

    /// Count of the cell addressed by one code per axis.
    pub fn get(&self, index: &[usize]) -> Option<u64> {
        if index.len() != self.dims.len() || index.iter().zip(&self.dims).any(|(i, d)| i >= d) {
            return None;
        }
        let flat: usize = index.iter().zip(self.strides()).map(|(i, s)| i * s).sum();
        Some(self.counts[flat])
    }

    /// Marginal table over `axes`, whose order becomes the axis order of
    /// the result. Axes not listed are summed out.
    pub fn marginal(&self, axes: &[usize]) -> Result<ContingencyTable> {
        for (pos, &a) in axes.iter().enumerate() {
            if a >= self.n_axes() {
                return Err(Error::InvalidModel(format!(
                    "axis {a} out of range for a {}-way table",
                    self.n_axes()
                )));
            }
            if axes[..pos].contains(&a) {
                return Err(Error::InvalidModel(format!("axis {a} listed twice")));
            }
        }
        if axes.is_empty() {
            return Err(Error::EmptyInput);
        }
        let out_dims: Vec<usize> = axes.iter().map(|&a| self.dims[a]).collect();
        let out_strides = strides_of(&out_dims);
        // stride in the output for each input axis (0 when summed out)
        let mut map = vec![0usize; self.n_axes()];
        for (k, &a) in axes.iter().enumerate() {
            map[a] = out_strides[k];
        }
        let mut out = vec![0u64; out_dims.iter().product()];
        let mut index = vec![0usize; self.n_axes()];
        let mut target = 0usize;
        for &count in &self.counts {
            out[target] += count;
            // odometer increment, last axis fastest
            for ax in (0..self.n_axes()).rev() {
                index[ax] += 1;
                target += map[ax];
                if index[ax] < self.dims[ax] {
                    break;
                }
                target -= map[ax] * index[ax];
                index[ax] = 0;
            }
        }
        let labels = axes.iter().map(|&a| self.labels[a].clone()).collect();
        ContingencyTable::with_labels(labels, out_dims, out)
    }
}

fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

fn checked_cells(dims: &[usize], cap: usize) -> Result<usize> {
    let mut cells: usize = 1;
    for &d in dims {
        cells = cells.checked_mul(d).ok_or(Error::TooManyCells {
            cells: usize::MAX,
            cap,
        })?;
    }
    if cells > cap {
        return Err(Error::TooManyCells { cells, cap });
    }
    Ok(cells)
}

/// Cross-tabulate equally long series into a dense table, one axis per
/// series in the given order.
pub fn build_table(series: &[CategoricalSeries]) -> Result<ContingencyTable> {
    build_table_with_cap(series, DEFAULT_MAX_CELLS)
}

pub fn build_table_with_cap(series: &[CategoricalSeries], cap: usize) -> Result<ContingencyTable> {
    let first = series.first().ok_or(Error::EmptyInput)?;
    let n = first.len();
    for s in series {
        if s.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: s.len(),
            });
        }
    }
    let dims: Vec<usize> = series.iter().map(|s| s.n_categories()).collect();
    let cells = checked_cells(&dims, cap)?;
    let strides = strides_of(&dims);
    let mut counts = vec![0u64; cells];
    for row in 0..n {
        let flat: usize = series
            .iter()
            .zip(&strides)
            .map(|(s, st)| s.codes()[row] * st)
            .sum();
        counts[flat] += 1;
    }
    let labels = series.iter().map(|s| s.name().to_string()).collect();
    ContingencyTable::with_labels(labels, dims, counts)
}

/// A conditional model `(response; predictors)` over the axes of a table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub response_axis: usize,
    pub predictor_axes: Vec<usize>,
}

impl ModelSpec {
    /// Predictor axes are sorted and deduplicated.
    pub fn new(response_axis: usize, mut predictor_axes: Vec<usize>) -> Result<Self> {
        predictor_axes.sort_unstable();
        predictor_axes.dedup();
        if predictor_axes.contains(&response_axis) {
            return Err(Error::InvalidModel(format!(
                "response axis {response_axis} is also a predictor"
            )));
        }
        Ok(Self {
            response_axis,
            predictor_axes,
        })
    }

    pub fn n_predictors(&self) -> usize {
        self.predictor_axes.len()
    }

    fn validate(&self, table: &ContingencyTable) -> Result<()> {
        let m = table.n_axes();
        if self.response_axis >= m || self.predictor_axes.iter().any(|&a| a >= m) {
            return Err(Error::InvalidModel(format!(
                "axes out of range for a {m}-way table"
            )));
        }
        if self.predictor_axes.contains(&self.response_axis) {
            return Err(Error::InvalidModel(
                "response axis is also a predictor".into(),
            ));
        }
        if self.predictor_axes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidModel(
                "predictor axes must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub spec: ModelSpec,
    pub aic: f64,
}

/// Counts of the (response, predictor-configuration) table, with both
/// marginals. Rows are response categories, columns predictor cells.
struct ConditionalCounts {
    joint: Vec<u64>,
    response_margin: Vec<u64>,
    predictor_margin: Vec<u64>,
    n_response: usize,
    n_config: usize,
}

fn conditional_counts(table: &ContingencyTable, spec: &ModelSpec) -> Result<ConditionalCounts> {
    spec.validate(table)?;
    if table.total_n() == 0 {
        return Err(Error::EmptyTable);
    }
    let mut axes = Vec::with_capacity(spec.n_predictors() + 1);
    axes.push(spec.response_axis);
    axes.extend_from_slice(&spec.predictor_axes);
    let reduced = table.marginal(&axes)?;
    let n_response = reduced.dims()[0];
    let n_config = reduced.counts().len() / n_response;
    let joint = reduced.counts().to_vec();
    let mut response_margin = vec![0u64; n_response];
    let mut predictor_margin = vec![0u64; n_config];
    for r in 0..n_response {
        for j in 0..n_config {
            let c = joint[r * n_config + j];
            response_margin[r] += c;
            predictor_margin[j] += c;
        }
    }
    Ok(ConditionalCounts {
        joint,
        response_margin,
        predictor_margin,
        n_response,
        n_config,
    })
}

/// `-2 * sum n(i,j) ln[n n(i,j) / (n(i) n(j))]`, the log-likelihood part of
/// the conditional AIC. Empty cells contribute nothing.
pub fn conditional_deviance(table: &ContingencyTable, spec: &ModelSpec) -> Result<f64> {
    let cc = conditional_counts(table, spec)?;
    let n = table.total_n() as f64;
    let mut sum = 0.0;
    for r in 0..cc.n_response {
        for j in 0..cc.n_config {
            let c = cc.joint[r * cc.n_config + j];
            if c == 0 {
                continue;
            }
            let c = c as f64;
            let expected = cc.response_margin[r] as f64 * cc.predictor_margin[j] as f64;
            sum += c * (n * c / expected).ln();
        }
    }
    Ok(-2.0 * sum)
}

fn penalty(table: &ContingencyTable, spec: &ModelSpec) -> f64 {
    let c1 = table.dims()[spec.response_axis] as f64;
    let c_j: f64 = spec
        .predictor_axes
        .iter()
        .map(|&a| table.dims()[a] as f64)
        .product();
    2.0 * (c1 - 1.0) * (c_j - 1.0)
}

/// Conditional AIC of `spec`, normalized so the predictor-free model is 0:
///
/// `-2 sum n(i1,j) ln[n n(i1,j) / (n(i1) n(j))] + 2 (c1 - 1)(cJ - 1)`
///
/// Negative values mean the response depends on the predictors.
pub fn aic_conditional(table: &ContingencyTable, spec: &ModelSpec) -> Result<f64> {
    if spec.predictor_axes.is_empty() {
        spec.validate(table)?;
        if table.total_n() == 0 {
            return Err(Error::EmptyTable);
        }
        return Ok(0.0);
    }
    Ok(conditional_deviance(table, spec)? + penalty(table, spec))
}

/// Unnormalized AIC of the conditional model, as catdap prints it:
/// `-2 sum n(i1,j) ln[n(i1,j)/n(j)] + 2 (c1 - 1) cJ`.
///
/// Equals `aic_conditional` plus the AIC of the predictor-free model.
pub fn absolute_aic(table: &ContingencyTable, spec: &ModelSpec) -> Result<f64> {
    let cc = conditional_counts(table, spec)?;
    let mut sum = 0.0;
    for r in 0..cc.n_response {
        for j in 0..cc.n_config {
            let c = cc.joint[r * cc.n_config + j];
            if c == 0 {
                continue;
            }
            let c = c as f64;
            sum += c * (c / cc.predictor_margin[j] as f64).ln();
        }
    }
    let c1 = cc.n_response as f64;
    let params = (c1 - 1.0) * cc.n_config as f64;
    Ok(-2.0 * sum + 2.0 * params)
}

/// `AIC(independence) - AIC(dependence)` for a 2x2 table. Positive values
/// favour the dependence model.
pub fn delta_aic_2x2(table: &ContingencyTable) -> Result<f64> {
    if table.dims() != [2, 2] {
        return Err(Error::NotTwoByTwo(table.dims().to_vec()));
    }
    let spec = ModelSpec::new(0, vec![1])?;
    Ok(-aic_conditional(table, &spec)?)
}

/// Every predictor subset for a response among `num_predictors + 1` axes,
/// ordered by subset size, then lexicographically by axis index.
pub fn enumerate_models(num_predictors: usize, response_axis: usize) -> Vec<ModelSpec> {
    let others: Vec<usize> = (0..=num_predictors.max(response_axis))
        .filter(|&a| a != response_axis)
        .take(num_predictors)
        .collect();
    let mut subsets: Vec<Vec<usize>> = (0u64..1 << num_predictors)
        .map(|mask| {
            others
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask & (1 << bit) != 0)
                .map(|(_, &a)| a)
                .collect()
        })
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
        .into_iter()
        .map(|predictor_axes| ModelSpec {
            response_axis,
            predictor_axes,
        })
        .collect()
}

/// Score every model of `enumerate_models` for the given response axis.
pub fn score_all(table: &ContingencyTable, response_axis: usize) -> Result<Vec<ModelScore>> {
    enumerate_models(table.n_axes() - 1, response_axis)
        .into_iter()
        .map(|spec| {
            let aic = aic_conditional(table, &spec)?;
            Ok(ModelScore { spec, aic })
        })
        .collect()
}
