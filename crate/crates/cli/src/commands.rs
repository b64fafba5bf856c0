//! Subcommand implementations. Each returns the files it would write so
//! that callers and tests decide where they go.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use catdap_core::datagen::{run_simulation_study, SimulationSettings};
use catdap_core::discretize::best_equal_width_histogram;
use catdap_core::pipeline::{binarize_columns, run_analysis, score_models};
use catdap_core::{AggregateResult, AnalysisConfig, Column};

use crate::config::{ColumnKind, RunConfig};
use crate::dot::emit_dot;
use crate::error::{CliError, Result};
use crate::load::{load_csv, LoadedData};
use crate::manifest::Manifest;
use crate::report::{render_text, to_json, Document, Report};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub iterations: Option<usize>,
    pub grid_size: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, String)>,
    pub stdout: String,
}

impl Output {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (name, contents) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        }
        Ok(())
    }
}

/// Run `f` on a dedicated pool when a thread count is given.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Input("--threads must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn parse_json_file(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: not valid JSON: {e}", path.display())))
}

/// Accepts either a config document or a manifest from an earlier run.
pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    let value = parse_json_file(path)?;
    if value.get("software").is_some() {
        let manifest: Manifest = serde_json::from_value(value)
            .map_err(|e| CliError::Input(format!("bad manifest: {e}")))?;
        let config = manifest.config.ok_or_else(|| {
            CliError::Input(format!(
                "manifest {} carries no analysis config",
                path.display()
            ))
        })?;
        config.validate()?;
        return Ok(config);
    }
    RunConfig::from_json(&value.to_string())
}

pub fn apply_overrides(mut config: RunConfig, overrides: Overrides) -> Result<RunConfig> {
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(n) = overrides.iterations {
        config.iterations = n;
    }
    if let Some(l) = overrides.grid_size {
        config.grid_size = l;
    }
    config.validate()?;
    Ok(config)
}

/// Config with every default made explicit: epsilons of log-transformed
/// columns and grid sizes of ranged columns.
fn resolved(config: &RunConfig, loaded: &LoadedData) -> RunConfig {
    let mut out = config.clone();
    for (name, col) in out.columns.iter_mut() {
        if let Some(&eps) = loaded.epsilons.get(name) {
            col.epsilon = Some(eps);
        }
        if col.range.is_some() && col.grid_size.is_none() {
            col.grid_size = Some(config.grid_size);
        }
    }
    out
}

fn manifest_for(command: &str, input: &Path, config: &RunConfig, loaded: &LoadedData) -> Manifest {
    let mut m = Manifest::new(command, config.seed, config.iterations, config.grid_size);
    m.input = Some(input.display().to_string());
    m.ranges = config.ranges();
    m.epsilons = loaded.epsilons.clone();
    m.config = Some(resolved(config, loaded));
    m
}

fn check_invariants(a: &AggregateResult) -> Result<()> {
    let fail = |msg: String| {
        Err(CliError::Internal(format!(
            "analysis of `{}`: {msg}",
            a.response
        )))
    };
    if a.models.len() != 1usize << a.predictors.len() {
        return fail(format!(
            "{} models for {} predictors",
            a.models.len(),
            a.predictors.len()
        ));
    }
    let empty = &a.models[0];
    if !empty.predictors.is_empty() || empty.mean_aic != 0.0 {
        return fail("empty model does not lead with AIC 0".into());
    }
    if a.models
        .iter()
        .any(|m| !m.mean_aic.is_finite() || !m.mean_absolute_aic.is_finite())
    {
        return fail("non-finite AIC".into());
    }
    let best = a.best_model().mean_aic;
    if a.models.iter().any(|m| m.mean_aic < best) {
        return fail("flagged model is not the minimum".into());
    }
    for t in &a.thresholds {
        if !(t.lower < t.mean && t.mean < t.upper) {
            return fail(format!(
                "threshold {} of `{}` outside its range",
                t.mean, t.variable
            ));
        }
    }
    Ok(())
}

/// Run every configured analysis in order. A continuous response is cut
/// at the threshold found for it by an earlier analysis; when a variable
/// gets thresholds from several analyses the first one is kept.
pub fn run_analyses(
    loaded: &LoadedData,
    config: &RunConfig,
) -> Result<(Vec<AggregateResult>, BTreeMap<String, f64>)> {
    let ranges = config.ranges();
    let mut registry: BTreeMap<String, f64> = BTreeMap::new();
    let mut results = Vec::with_capacity(config.analyses.len());
    for spec in &config.analyses {
        let mut ac = AnalysisConfig::new(spec.response.clone(), spec.predictors.clone());
        for p in &spec.predictors {
            if let Some(r) = ranges.get(p) {
                ac.ranges.insert(p.clone(), *r);
            }
        }
        if config.columns[&spec.response].kind == ColumnKind::Continuous {
            let s = registry.get(&spec.response).ok_or_else(|| {
                CliError::Input(format!(
                    "continuous response `{}` needs a threshold from an earlier analysis where it is a predictor",
                    spec.response
                ))
            })?;
            ac.response_threshold = Some(*s);
        }
        ac.iterations = config.iterations;
        ac.master_seed = config.seed;
        let agg = run_analysis(&loaded.dataset, &ac)?;
        check_invariants(&agg)?;
        for t in &agg.thresholds {
            registry.entry(t.variable.clone()).or_insert(t.mean);
        }
        results.push(agg);
    }
    Ok((results, registry))
}

fn full_data_pass(
    loaded: &LoadedData,
    a: &AggregateResult,
    registry: &BTreeMap<String, f64>,
) -> Result<Vec<crate::report::FullDataScore>> {
    let mut columns = vec![a.response.clone()];
    columns.extend(a.predictors.iter().cloned());
    let binary = binarize_columns(&loaded.dataset, &columns, registry)?;
    let scores = score_models(&binary, &a.response, &a.predictors)?;
    if scores
        .first()
        .is_none_or(|s| !s.predictors.is_empty() || s.aic != 0.0)
    {
        return Err(CliError::Internal(format!(
            "full-data pass for `{}`: empty model does not lead with AIC 0",
            a.response
        )));
    }
    Ok(scores)
}

pub fn analyze(input: &Path, config: &RunConfig, aic_margin: f64) -> Result<Output> {
    let loaded = load_csv(input, &config.columns)?;
    analyze_loaded(input, &loaded, config, aic_margin)
}

pub fn analyze_loaded(
    input: &Path,
    loaded: &LoadedData,
    config: &RunConfig,
    aic_margin: f64,
) -> Result<Output> {
    let (results, registry) = run_analyses(loaded, config)?;
    let reports = results
        .iter()
        .map(|a| {
            Ok(Report {
                full_data: Some(full_data_pass(loaded, a, &registry)?),
                analysis: a.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = Document::Analysis { reports };
    let text = render_text(&doc);
    Ok(Output {
        files: vec![
            ("report.json".into(), to_json(&doc)),
            ("report.txt".into(), text.clone()),
            ("graph.dot".into(), emit_dot(&results, aic_margin)),
            (
                "manifest.json".into(),
                manifest_for("analyze", input, config, loaded).to_json(),
            ),
        ],
        stdout: text,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSummary {
    pub variable: String,
    pub n_sections: usize,
    pub edges: Vec<f64>,
    pub aic: f64,
}

fn binarized_csv(loaded: &LoadedData, registry: &BTreeMap<String, f64>) -> Result<String> {
    let columns: Vec<String> = loaded
        .dataset
        .iter()
        .filter(|(name, col)| matches!(col, Column::Categorical(_)) || registry.contains_key(*name))
        .map(|(name, _)| name.to_string())
        .collect();
    let binary = binarize_columns(&loaded.dataset, &columns, registry)?;
    let codes: Vec<&[usize]> = binary
        .iter()
        .map(|(_, col)| match col {
            Column::Categorical(s) => s.codes(),
            Column::Continuous(_) => unreachable!("binarize_columns leaves no continuous column"),
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Internal(format!("csv output: {e}"));
    w.write_record(&columns).map_err(fail)?;
    for row in 0..binary.n_rows() {
        w.write_record(codes.iter().map(|c| c[row].to_string()))
            .map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(format!("csv output: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

/// Thresholds only, optionally with equal-width histogram categorizations
/// of every continuous column and a binarized copy of the data.
pub fn discretize(
    input: &Path,
    config: &RunConfig,
    histogram_max: Option<usize>,
    write_binarized: bool,
) -> Result<Output> {
    let loaded = load_csv(input, &config.columns)?;
    let (results, registry) = run_analyses(&loaded, config)?;
    let doc = Document::Thresholds {
        reports: results
            .into_iter()
            .map(|analysis| Report {
                analysis,
                full_data: None,
            })
            .collect(),
    };
    let mut text = render_text(&doc);
    let mut files = vec![("thresholds.json".to_string(), to_json(&doc))];
    if let Some(max) = histogram_max {
        let mut summaries = Vec::new();
        for (name, col) in loaded.dataset.iter() {
            if let Column::Continuous(values) = col {
                let h = best_equal_width_histogram(name, values, max)?;
                summaries.push(HistogramSummary {
                    variable: name.to_string(),
                    n_sections: h.n_sections,
                    edges: h.edges,
                    aic: h.aic,
                });
            }
        }
        text.push_str("Equal-width histograms\n");
        for h in &summaries {
            text.push_str(&format!(
                "  {:<24} {:>4} sections  AIC {:.4}\n",
                h.variable, h.n_sections, h.aic
            ));
        }
        let mut json = serde_json::to_string_pretty(&summaries)?;
        json.push('\n');
        files.push(("histograms.json".into(), json));
    }
    if write_binarized {
        files.push(("binarized.csv".into(), binarized_csv(&loaded, &registry)?));
    }
    files.push(("thresholds.txt".into(), text.clone()));
    files.push((
        "manifest.json".into(),
        manifest_for("discretize", input, config, &loaded).to_json(),
    ));
    Ok(Output {
        files,
        stdout: text,
    })
}

/// Settings read back from a simulate manifest (or any JSON with these keys).
#[derive(Debug, Clone, Copy, Deserialize)]
struct SimulateFile {
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    iterations: Option<usize>,
    #[serde(default)]
    grid_size: Option<usize>,
}

pub fn simulation_settings(
    config: Option<&Path>,
    overrides: Overrides,
) -> Result<SimulationSettings> {
    let mut s = SimulationSettings::default();
    if let Some(path) = config {
        let file: SimulateFile = serde_json::from_value(parse_json_file(path)?)
            .map_err(|e| CliError::Input(format!("bad simulate config: {e}")))?;
        s.master_seed = file.seed.unwrap_or(s.master_seed);
        s.iterations = file.iterations.unwrap_or(s.iterations);
        s.grid_size = file.grid_size.unwrap_or(s.grid_size);
    }
    s.master_seed = overrides.seed.unwrap_or(s.master_seed);
    s.iterations = overrides.iterations.unwrap_or(s.iterations);
    s.grid_size = overrides.grid_size.unwrap_or(s.grid_size);
    if s.iterations == 0 || s.grid_size == 0 {
        return Err(CliError::Input(
            "iterations and grid size must be positive".into(),
        ));
    }
    Ok(s)
}

pub fn simulate(settings: &SimulationSettings) -> Result<Output> {
    let study = run_simulation_study(settings)?;
    for c in &study.cases {
        check_invariants(&c.aggregate)?;
    }
    let mut manifest = Manifest::new(
        "simulate",
        settings.master_seed,
        settings.iterations,
        settings.grid_size,
    );
    for c in &study.cases {
        for t in &c.aggregate.thresholds {
            manifest.ranges.insert(
                format!("case{}.{}", c.case, t.variable),
                catdap_core::ThresholdRange {
                    lower: t.lower,
                    upper: t.upper,
                    grid_size: settings.grid_size,
                },
            );
        }
    }
    let doc = Document::Simulation { study };
    let text = render_text(&doc);
    Ok(Output {
        files: vec![
            ("report.json".into(), to_json(&doc)),
            ("report.txt".into(), text.clone()),
            ("manifest.json".into(), manifest.to_json()),
        ],
        stdout: text,
    })
}

/// Re-render a saved JSON report, optionally with its diagram.
pub fn render(report: &Path, dot_margin: Option<f64>) -> Result<Output> {
    let text = std::fs::read_to_string(report).map_err(|e| CliError::io(report, e))?;
    let doc = crate::report::from_json(&text)
        .map_err(|e| CliError::Input(format!("{}: not a report: {e}", report.display())))?;
    let rendered = render_text(&doc);
    let mut files = Vec::new();
    if let Some(margin) = dot_margin {
        let results: Vec<AggregateResult> = match &doc {
            Document::Analysis { reports } | Document::Thresholds { reports } => {
                reports.iter().map(|r| r.analysis.clone()).collect()
            }
            Document::Simulation { study } => {
                study.cases.iter().map(|c| c.aggregate.clone()).collect()
            }
        };
        files.push(("graph.dot".into(), emit_dot(&results, margin)));
    }
    Ok(Output {
        files,
        stdout: rendered,
    })
}
