//! Repeated half-split analysis.
//!
//! Each iteration draws one random split of the rows. Thresholds for every
//! continuous predictor are searched on the first half (`G1`) against the
//! response. The second half (`G2`) is then binarized with those thresholds,
//! cross-tabulated, and every predictor subset is scored. Thresholds and
//! AICs are averaged over all iterations.
//!
//! Iteration `i` draws from its own ChaCha8 stream `i` seeded by the master
//! seed, and results are reduced in iteration order, so output does not
//! depend on the number of worker threads.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretize::{
    best_threshold, binarize, make_grid, ThresholdGrid, ThresholdResult, DEFAULT_GRID_SIZE,
};
use crate::error::{Error, Result};
use crate::tables::{
    absolute_aic, aic_conditional, build_table, enumerate_models, CategoricalSeries, ModelSpec,
};

pub const DEFAULT_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Column {
    Continuous(Vec<f64>),
    Categorical(CategoricalSeries),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Continuous(v) => v.len(),
            Column::Categorical(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, Column::Continuous(_))
    }
}

/// Named, equally long columns.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Column>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, column: Column) -> Result<()> {
        let name = name.into();
        if self.names.contains(&name) {
            return Err(Error::InvalidConfig(format!("duplicate column `{name}`")));
        }
        if let Some(first) = self.columns.first() {
            if first.len() != column.len() {
                return Err(Error::LengthMismatch {
                    expected: first.len(),
                    found: column.len(),
                });
            }
        }
        self.names.push(name);
        self.columns.push(column);
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, column: Column) -> Result<Self> {
        self.push(name, column)?;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.columns[i])
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Column)> {
        self.names.iter().map(String::as_str).zip(&self.columns)
    }
}

/// Search interval and grid size for one continuous column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRange {
    pub lower: f64,
    pub upper: f64,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
}

fn default_grid_size() -> usize {
    DEFAULT_GRID_SIZE
}

impl ThresholdRange {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            grid_size: DEFAULT_GRID_SIZE,
        }
    }

    pub fn grid(&self) -> Result<ThresholdGrid> {
        make_grid(self.lower, self.upper, self.grid_size)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub response: String,
    pub predictors: Vec<String>,
    /// Ranges for the continuous predictors, keyed by column name.
    pub ranges: BTreeMap<String, ThresholdRange>,
    /// Fixed cut applied to a continuous response before analysis.
    pub response_threshold: Option<f64>,
    pub iterations: usize,
    pub master_seed: u64,
}

impl AnalysisConfig {
    pub fn new(response: impl Into<String>, predictors: Vec<String>) -> Self {
        Self {
            response: response.into(),
            predictors,
            ranges: BTreeMap::new(),
            response_threshold: None,
            iterations: DEFAULT_ITERATIONS,
            master_seed: 0,
        }
    }

    pub fn range(mut self, column: impl Into<String>, range: ThresholdRange) -> Self {
        self.ranges.insert(column.into(), range);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationResult {
    pub iteration: usize,
    /// One entry per predictor; `None` for categorical predictors.
    pub thresholds: Vec<Option<ThresholdResult>>,
    /// Normalized conditional AIC per model, in enumeration order.
    pub aics: Vec<f64>,
    /// Unnormalized (catdap-scale) AIC per model.
    pub absolute_aics: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedThreshold {
    pub variable: String,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub spec: ModelSpec,
    pub predictors: Vec<String>,
    pub mean_aic: f64,
    pub mean_absolute_aic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub response: String,
    pub response_threshold: Option<f64>,
    pub predictors: Vec<String>,
    pub iterations: usize,
    pub thresholds: Vec<AveragedThreshold>,
    /// Every predictor subset, in enumeration order (empty set first).
    pub models: Vec<ModelSummary>,
    /// Index into `models` of the minimum averaged AIC.
    pub best: usize,
}

impl AggregateResult {
    pub fn best_model(&self) -> &ModelSummary {
        &self.models[self.best]
    }

    pub fn threshold(&self, variable: &str) -> Option<f64> {
        self.thresholds
            .iter()
            .find(|t| t.variable == variable)
            .map(|t| t.mean)
    }
}

/// Random partition into `G1` of size `floor(n/2)` and `G2` with the rest.
pub fn split_half<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 4 {
        return Err(Error::TooFewRows(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let second = order.split_off(n / 2);
    Ok((order, second))
}

/// RNG for one iteration: stream `iteration` of the master seed.
pub fn iteration_rng(master_seed: u64, iteration: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(iteration as u64);
    rng
}

enum Predictor<'a> {
    Continuous {
        name: &'a str,
        values: &'a [f64],
        grid: ThresholdGrid,
        range: ThresholdRange,
    },
    Categorical(&'a CategoricalSeries),
}

/// Validated view of a dataset for one analysis.
struct Prepared<'a> {
    response: CategoricalSeries,
    predictors: Vec<Predictor<'a>>,
    models: Vec<ModelSpec>,
}

fn prepare<'a>(dataset: &'a Dataset, config: &'a AnalysisConfig) -> Result<Prepared<'a>> {
    if config.predictors.contains(&config.response) {
        return Err(Error::InvalidConfig(format!(
            "response `{}` is also listed as a predictor",
            config.response
        )));
    }
    for (i, p) in config.predictors.iter().enumerate() {
        if config.predictors[..i].contains(p) {
            return Err(Error::InvalidConfig(format!(
                "predictor `{p}` listed twice"
            )));
        }
    }
    if config.iterations == 0 {
        return Err(Error::InvalidConfig("iterations must be positive".into()));
    }
    let response = match dataset.column(&config.response)? {
        Column::Categorical(s) => s.clone(),
        Column::Continuous(values) => {
            let s = config
                .response_threshold
                .ok_or_else(|| Error::MissingThreshold(config.response.clone()))?;
            binarize(config.response.clone(), values, s)?
        }
    };
    let mut predictors = Vec::with_capacity(config.predictors.len());
    for name in &config.predictors {
        match dataset.column(name)? {
            Column::Categorical(s) => predictors.push(Predictor::Categorical(s)),
            Column::Continuous(values) => {
                if !response.is_binary() {
                    return Err(Error::NotBinary(config.response.clone()));
                }
                let range = *config
                    .ranges
                    .get(name)
                    .ok_or_else(|| Error::MissingRange(name.clone()))?;
                predictors.push(Predictor::Continuous {
                    name,
                    values,
                    grid: range.grid()?,
                    range,
                });
            }
        }
    }
    Ok(Prepared {
        response,
        models: enumerate_models(predictors.len(), 0),
        predictors,
    })
}

fn iterate_prepared<R: Rng + ?Sized>(
    prepared: &Prepared<'_>,
    iteration: usize,
    rng: &mut R,
) -> Result<IterationResult> {
    let (train, test) = split_half(prepared.response.len(), rng)?;
    let train_response = prepared.response.select(&train)?;

    let mut thresholds = Vec::with_capacity(prepared.predictors.len());
    let mut axes = Vec::with_capacity(prepared.predictors.len() + 1);
    axes.push(prepared.response.select(&test)?);
    for predictor in &prepared.predictors {
        match predictor {
            Predictor::Continuous {
                name, values, grid, ..
            } => {
                let train_values: Vec<f64> = train.iter().map(|&r| values[r]).collect();
                let found = best_threshold(&train_response, &train_values, grid)?;
                let test_values: Vec<f64> = test.iter().map(|&r| values[r]).collect();
                axes.push(binarize(*name, &test_values, found.threshold)?);
                thresholds.push(Some(found));
            }
            Predictor::Categorical(series) => {
                axes.push(series.select(&test)?);
                thresholds.push(None);
            }
        }
    }

    let table = build_table(&axes)?;
    let mut aics = Vec::with_capacity(prepared.models.len());
    let mut absolute_aics = Vec::with_capacity(prepared.models.len());
    for spec in &prepared.models {
        aics.push(aic_conditional(&table, spec)?);
        absolute_aics.push(absolute_aic(&table, spec)?);
    }
    Ok(IterationResult {
        iteration,
        thresholds,
        aics,
        absolute_aics,
    })
}

/// One split, threshold search on `G1`, model scoring on `G2`.
pub fn run_iteration<R: Rng + ?Sized>(
    dataset: &Dataset,
    config: &AnalysisConfig,
    iteration: usize,
    rng: &mut R,
) -> Result<IterationResult> {
    let prepared = prepare(dataset, config)?;
    iterate_prepared(&prepared, iteration, rng)
}

/// Run `config.iterations` iterations (in parallel) and average them.
pub fn run_analysis(dataset: &Dataset, config: &AnalysisConfig) -> Result<AggregateResult> {
    let prepared = prepare(dataset, config)?;
    let results: Vec<IterationResult> = (0..config.iterations)
        .into_par_iter()
        .map(|i| iterate_prepared(&prepared, i, &mut iteration_rng(config.master_seed, i)))
        .collect::<Result<_>>()?;
    Ok(aggregate(&prepared, config, &results))
}

fn aggregate(
    prepared: &Prepared<'_>,
    config: &AnalysisConfig,
    results: &[IterationResult],
) -> AggregateResult {
    let count = results.len() as f64;
    let n_models = prepared.models.len();
    let n_pred = prepared.predictors.len();

    let mut threshold_sums = vec![0.0; n_pred];
    let mut aic_sums = vec![0.0; n_models];
    let mut abs_sums = vec![0.0; n_models];
    for r in results {
        for (sum, t) in threshold_sums.iter_mut().zip(&r.thresholds) {
            if let Some(t) = t {
                *sum += t.threshold;
            }
        }
        for k in 0..n_models {
            aic_sums[k] += r.aics[k];
            abs_sums[k] += r.absolute_aics[k];
        }
    }

    let thresholds = prepared
        .predictors
        .iter()
        .zip(&threshold_sums)
        .filter_map(|(p, sum)| match p {
            Predictor::Continuous { name, range, .. } => Some(AveragedThreshold {
                variable: name.to_string(),
                mean: sum / count,
                lower: range.lower,
                upper: range.upper,
            }),
            Predictor::Categorical(_) => None,
        })
        .collect();

    let models: Vec<ModelSummary> = prepared
        .models
        .iter()
        .enumerate()
        .map(|(k, spec)| ModelSummary {
            spec: spec.clone(),
            predictors: spec
                .predictor_axes
                .iter()
                .map(|&a| config.predictors[a - 1].clone())
                .collect(),
            mean_aic: aic_sums[k] / count,
            mean_absolute_aic: abs_sums[k] / count,
        })
        .collect();

    AggregateResult {
        response: config.response.clone(),
        response_threshold: config.response_threshold,
        predictors: config.predictors.clone(),
        iterations: results.len(),
        thresholds,
        best: best_index(&models),
        models,
    }
}

/// Minimum averaged AIC; models are in enumeration order (size first), so
/// the first strict minimum already prefers fewer predictors.
fn best_index(models: &[ModelSummary]) -> usize {
    let mut best = 0;
    for (k, m) in models.iter().enumerate() {
        if m.mean_aic < models[best].mean_aic {
            best = k;
        }
    }
    best
}

/// Binarize the named columns of `dataset` with fixed thresholds. Columns
/// that are already categorical pass through unchanged.
pub fn binarize_columns(
    dataset: &Dataset,
    columns: &[String],
    thresholds: &BTreeMap<String, f64>,
) -> Result<Dataset> {
    if dataset.n_rows() == 0 {
        return Err(Error::EmptyInput);
    }
    let mut out = Dataset::new();
    for name in columns {
        let column = match dataset.column(name)? {
            Column::Categorical(s) => Column::Categorical(s.clone()),
            Column::Continuous(values) => {
                let s = *thresholds
                    .get(name)
                    .ok_or_else(|| Error::MissingThreshold(name.clone()))?;
                Column::Categorical(binarize(name.clone(), values, s)?)
            }
        };
        out.push(name.clone(), column)?;
    }
    Ok(out)
}

/// Response and predictors of an analysis, binarized on all rows with the
/// averaged thresholds.
pub fn final_binarize(dataset: &Dataset, result: &AggregateResult) -> Result<Dataset> {
    let mut thresholds: BTreeMap<String, f64> = result
        .thresholds
        .iter()
        .map(|t| (t.variable.clone(), t.mean))
        .collect();
    if let Some(s) = result.response_threshold {
        thresholds.insert(result.response.clone(), s);
    }
    let mut columns = vec![result.response.clone()];
    columns.extend(result.predictors.iter().cloned());
    binarize_columns(dataset, &columns, &thresholds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullDataScore {
    pub spec: ModelSpec,
    pub predictors: Vec<String>,
    pub aic: f64,
    pub absolute_aic: f64,
}

/// Score every predictor subset on all rows of a categorical dataset.
pub fn score_models(
    dataset: &Dataset,
    response: &str,
    predictors: &[String],
) -> Result<Vec<FullDataScore>> {
    let mut axes = Vec::with_capacity(predictors.len() + 1);
    for name in std::iter::once(response).chain(predictors.iter().map(String::as_str)) {
        match dataset.column(name)? {
            Column::Categorical(s) => axes.push(s.clone()),
            Column::Continuous(_) => return Err(Error::MissingThreshold(name.to_string())),
        }
    }
    let table = build_table(&axes)?;
    enumerate_models(predictors.len(), 0)
        .into_iter()
        .map(|spec| {
            Ok(FullDataScore {
                predictors: spec
                    .predictor_axes
                    .iter()
                    .map(|&a| predictors[a - 1].clone())
                    .collect(),
                aic: aic_conditional(&table, &spec)?,
                absolute_aic: absolute_aic(&table, &spec)?,
                spec,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedRow {
    pub size: usize,
    pub predictors: Vec<String>,
    pub mean_aic: f64,
    pub mean_absolute_aic: f64,
    pub is_best: bool,
}

/// Report rows grouped by predictor count, enumeration order within each
/// group, with the minimum flagged.
pub fn rank_models(result: &AggregateResult) -> Vec<RankedRow> {
    result
        .models
        .iter()
        .enumerate()
        .map(|(k, m)| RankedRow {
            size: m.predictors.len(),
            predictors: m.predictors.clone(),
            mean_aic: m.mean_aic,
            mean_absolute_aic: m.mean_absolute_aic,
            is_best: k == result.best,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn synthetic(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let y: Vec<usize> = x
            .iter()
            .map(|&v| usize::from((v < 4.0) ^ (rng.random::<f64>() < 0.1)))
            .collect();
        Dataset::new()
            .with(
                "y",
                Column::Categorical(CategoricalSeries::binary("y", y).unwrap()),
            )
            .unwrap()
            .with("x", Column::Continuous(x))
            .unwrap()
            .with("z", Column::Continuous(z))
            .unwrap()
    }

    fn config(iterations: usize) -> AnalysisConfig {
        let mut c = AnalysisConfig::new("y", vec!["x".into(), "z".into()])
            .range("x", ThresholdRange::new(0.0, 10.0))
            .range("z", ThresholdRange::new(0.0, 1.0));
        c.iterations = iterations;
        c.master_seed = 42;
        c
    }

    #[test]
    fn split_sizes() {
        let mut rng = iteration_rng(1, 0);
        let (a, b) = split_half(10, &mut rng).unwrap();
        assert_eq!((a.len(), b.len()), (5, 5));
        let (a, b) = split_half(11, &mut rng).unwrap();
        assert_eq!((a.len(), b.len()), (5, 6));
        assert_eq!(split_half(3, &mut rng), Err(Error::TooFewRows(3)));
    }

    #[test]
    fn split_is_deterministic() {
        let first = split_half(50, &mut iteration_rng(9, 3)).unwrap();
        let again = split_half(50, &mut iteration_rng(9, 3)).unwrap();
        let other = split_half(50, &mut iteration_rng(9, 4)).unwrap();
        assert_eq!(first, again);
        assert_ne!(first, other);
    }

    #[test]
    fn iteration_scores_every_subset() {
        let data = synthetic(200, 1);
        let r = run_iteration(&data, &config(1), 0, &mut iteration_rng(42, 0)).unwrap();
        assert_eq!(r.aics.len(), 4);
        assert_eq!(r.aics[0], 0.0);
        assert_eq!(r.thresholds.len(), 2);
        assert!(r.thresholds.iter().all(Option::is_some));
    }

    #[test]
    fn exact_cut_is_found_and_favoured() {
        let grid = make_grid(0.0, 10.0, 9).unwrap();
        let cut = grid.points()[3];
        let x: Vec<f64> = (0..300).map(|i| i as f64 / 30.0).collect();
        let y: Vec<usize> = x.iter().map(|&v| usize::from(v < cut)).collect();
        let data = Dataset::new()
            .with(
                "y",
                Column::Categorical(CategoricalSeries::binary("y", y).unwrap()),
            )
            .unwrap()
            .with("x", Column::Continuous(x))
            .unwrap();
        let mut c = AnalysisConfig::new("y", vec!["x".into()]).range(
            "x",
            ThresholdRange {
                lower: 0.0,
                upper: 10.0,
                grid_size: 9,
            },
        );
        c.iterations = 1;
        let r = run_iteration(&data, &c, 0, &mut iteration_rng(0, 0)).unwrap();
        assert_eq!(r.thresholds[0].unwrap().threshold, cut);
        assert!(r.aics[1] < 0.0);
    }

    #[test]
    fn single_iteration_aggregate_is_that_iteration() {
        let data = synthetic(120, 2);
        let c = config(1);
        let agg = run_analysis(&data, &c).unwrap();
        let it = run_iteration(&data, &c, 0, &mut iteration_rng(c.master_seed, 0)).unwrap();
        assert_eq!(agg.iterations, 1);
        for (m, (&a, &b)) in agg.models.iter().zip(it.aics.iter().zip(&it.absolute_aics)) {
            assert_eq!(m.mean_aic, a);
            assert_eq!(m.mean_absolute_aic, b);
        }
        assert_eq!(agg.thresholds[0].mean, it.thresholds[0].unwrap().threshold);
        assert_eq!(agg.thresholds[1].mean, it.thresholds[1].unwrap().threshold);
    }

    #[test]
    fn analysis_selects_true_predictor() {
        let data = synthetic(400, 3);
        let agg = run_analysis(&data, &config(50)).unwrap();
        assert_eq!(agg.models[0].mean_aic, 0.0);
        assert_eq!(agg.best_model().predictors, vec!["x".to_string()]);
        let x = agg.threshold("x").unwrap();
        assert!((x - 4.0).abs() < 0.5, "{x}");
        for t in &agg.thresholds {
            assert!(t.mean > t.lower && t.mean < t.upper);
        }
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let data = synthetic(200, 4);
        let c = config(40);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| run_analysis(&data, &c)).unwrap();
        let b = four.install(|| run_analysis(&data, &c)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn swapping_halves_changes_scores() {
        let data = synthetic(200, 5);
        let cfg = config(1);
        let prepared = prepare(&data, &cfg).unwrap();
        let (g1, g2) = split_half(200, &mut iteration_rng(42, 0)).unwrap();
        let score = |train: &[usize], test: &[usize]| {
            let resp = prepared.response.select(train).unwrap();
            let Predictor::Continuous { values, grid, .. } = &prepared.predictors[0] else {
                unreachable!()
            };
            let tv: Vec<f64> = train.iter().map(|&r| values[r]).collect();
            let s = best_threshold(&resp, &tv, grid).unwrap().threshold;
            let test_vals: Vec<f64> = test.iter().map(|&r| values[r]).collect();
            let t = build_table(&[
                prepared.response.select(test).unwrap(),
                binarize("x", &test_vals, s).unwrap(),
            ])
            .unwrap();
            aic_conditional(&t, &ModelSpec::new(0, vec![1]).unwrap()).unwrap()
        };
        let it = iterate_prepared(&prepared, 0, &mut iteration_rng(42, 0)).unwrap();
        assert_eq!(score(&g1, &g2), it.aics[1]);
        assert_ne!(score(&g2, &g1), it.aics[1]);
    }

    #[test]
    fn config_errors() {
        let data = synthetic(50, 6);
        let mut c = config(1);
        c.ranges.remove("z");
        assert_eq!(
            run_analysis(&data, &c),
            Err(Error::MissingRange("z".into()))
        );
        let mut c = config(1);
        c.predictors.push("y".into());
        assert!(matches!(
            run_analysis(&data, &c),
            Err(Error::InvalidConfig(_))
        ));
        let mut c = config(1);
        c.response = "x".into();
        c.predictors = vec!["z".into()];
        assert_eq!(
            run_analysis(&data, &c),
            Err(Error::MissingThreshold("x".into()))
        );
        c.response_threshold = Some(5.0);
        assert!(run_analysis(&data, &c).is_ok());
        let mut c = config(1);
        c.predictors.push("nope".into());
        assert_eq!(
            run_analysis(&data, &c),
            Err(Error::UnknownColumn("nope".into()))
        );
    }

    #[test]
    fn multi_category_response_needs_categorical_predictors() {
        let y = CategoricalSeries::new("y", (0..30).map(|i| i % 3).collect(), 3).unwrap();
        let g = CategoricalSeries::binary("g", (0..30).map(|i| i % 2).collect()).unwrap();
        let data = Dataset::new()
            .with("y", Column::Categorical(y))
            .unwrap()
            .with("g", Column::Categorical(g))
            .unwrap()
            .with("x", Column::Continuous((0..30).map(f64::from).collect()))
            .unwrap();
        let mut c = AnalysisConfig::new("y", vec!["g".into()]);
        c.iterations = 3;
        assert!(run_analysis(&data, &c).is_ok());
        c.predictors.push("x".into());
        c.ranges.insert("x".into(), ThresholdRange::new(0.0, 30.0));
        assert_eq!(run_analysis(&data, &c), Err(Error::NotBinary("y".into())));
    }

    #[test]
    fn final_binarize_uses_averages() {
        let data = Dataset::new()
            .with(
                "y",
                Column::Categorical(CategoricalSeries::binary("y", vec![0, 1, 0, 1]).unwrap()),
            )
            .unwrap()
            .with("k", Column::Continuous(vec![1.0, 2.0, 2.39, 3.0]))
            .unwrap()
            .with("low", Column::Continuous(vec![0.1, 0.2, 0.3, 0.4]))
            .unwrap();
        let result = AggregateResult {
            response: "y".into(),
            response_threshold: None,
            predictors: vec!["k".into(), "low".into()],
            iterations: 1,
            thresholds: vec![
                AveragedThreshold {
                    variable: "k".into(),
                    mean: 2.39,
                    lower: 0.0,
                    upper: 5.0,
                },
                AveragedThreshold {
                    variable: "low".into(),
                    mean: 0.9,
                    lower: 0.0,
                    upper: 1.0,
                },
            ],
            models: vec![],
            best: 0,
        };
        let out = final_binarize(&data, &result).unwrap();
        let Column::Categorical(k) = out.column("k").unwrap() else {
            panic!()
        };
        assert_eq!(k.codes(), &[1, 1, 0, 0]);
        let Column::Categorical(low) = out.column("low").unwrap() else {
            panic!()
        };
        assert_eq!(low.codes(), &[1, 1, 1, 1]);

        let mut missing = result.clone();
        missing.thresholds.pop();
        assert_eq!(
            final_binarize(&data, &missing),
            Err(Error::MissingThreshold("low".into()))
        );
        assert_eq!(
            final_binarize(&Dataset::new(), &result),
            Err(Error::EmptyInput)
        );
    }

    #[test]
    fn ranking_groups() {
        let data = synthetic(100, 7);
        let agg = run_analysis(&data, &config(5)).unwrap();
        let rows = rank_models(&agg);
        let sizes: Vec<usize> = rows.iter().map(|r| r.size).collect();
        assert_eq!(sizes, vec![0, 1, 1, 2]);
        assert_eq!(rows.iter().filter(|r| r.is_best).count(), 1);

        let mut c = AnalysisConfig::new("y", vec![]);
        c.iterations = 2;
        let agg = run_analysis(&data, &c).unwrap();
        let rows = rank_models(&agg);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mean_aic, 0.0);
        assert!(rows[0].is_best);
    }

    #[test]
    fn full_data_scoring() {
        let data = synthetic(100, 8);
        let agg = run_analysis(&data, &config(5)).unwrap();
        let bin = final_binarize(&data, &agg).unwrap();
        let scores = score_models(&bin, "y", &agg.predictors).unwrap();
        assert_eq!(scores.len(), 4);
        assert_eq!(scores[0].aic, 0.0);
        assert!(score_models(&data, "y", &agg.predictors).is_err());
    }

    proptest! {
        #[test]
        fn split_partitions_rows(n in 4usize..400, seed in any::<u64>()) {
            let (g1, g2) = split_half(n, &mut iteration_rng(seed, 0)).unwrap();
            prop_assert_eq!(g1.len(), n / 2);
            prop_assert_eq!(g2.len(), n - n / 2);
            let mut all: Vec<usize> = g1.iter().chain(&g2).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }
}
