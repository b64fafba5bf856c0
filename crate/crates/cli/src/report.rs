//! Report documents: JSON (serde) and a fixed-layout text table rendered
//! from the same values.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use catdap_core::datagen::SimulationReport;
use catdap_core::pipeline::rank_models;
pub use catdap_core::pipeline::FullDataScore;
use catdap_core::AggregateResult;

/// One analysed response: iteration averages plus the optional full-data
/// pass on the binarized dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub analysis: AggregateResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_data: Option<Vec<FullDataScore>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Document {
    Analysis { reports: Vec<Report> },
    Thresholds { reports: Vec<Report> },
    Simulation { study: SimulationReport },
}

pub fn to_json(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report types always serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> serde_json::Result<Document> {
    serde_json::from_str(text)
}

pub fn render_text(doc: &Document) -> String {
    match doc {
        Document::Analysis { reports } => {
            let parts: Vec<String> = reports.iter().map(render_report).collect();
            parts.join("\n")
        }
        Document::Thresholds { reports } => {
            let mut out = String::new();
            for r in reports {
                write_header(&mut out, &r.analysis);
                write_thresholds(&mut out, &r.analysis);
                out.push('\n');
            }
            out
        }
        Document::Simulation { study } => render_simulation(study),
    }
}

fn join_names(names: &[String]) -> String {
    if names.is_empty() {
        "(none)".to_string()
    } else {
        names.join(", ")
    }
}

fn write_header(out: &mut String, a: &AggregateResult) {
    match a.response_threshold {
        Some(s) => writeln!(out, "Response: {} (threshold {s:.4})", a.response),
        None => writeln!(out, "Response: {}", a.response),
    }
    .unwrap();
    writeln!(out, "Iterations: {}", a.iterations).unwrap();
}

fn write_thresholds(out: &mut String, a: &AggregateResult) {
    if a.thresholds.is_empty() {
        return;
    }
    out.push_str("\nAveraged thresholds\n");
    writeln!(out, "  {:<24} {:>12}  range", "variable", "threshold").unwrap();
    for t in &a.thresholds {
        writeln!(
            out,
            "  {:<24} {:>12.4}  [{}, {}]",
            t.variable, t.mean, t.lower, t.upper
        )
        .unwrap();
    }
}

struct Row<'a> {
    predictors: &'a [String],
    aic: f64,
    absolute: f64,
    best: bool,
}

fn write_rows(out: &mut String, rows: &[Row]) {
    writeln!(out, "  {:<36} {:>12} {:>14}", "From", "AIC", "AIC(catdap)").unwrap();
    // the empty model is left out unless it is all there is
    let only_empty = rows.len() == 1;
    let mut size = usize::MAX;
    for row in rows {
        let k = row.predictors.len();
        if k == 0 && !only_empty {
            continue;
        }
        if k != size {
            size = k;
            writeln!(out, "  {k}var").unwrap();
        }
        writeln!(
            out,
            "    {:<34} {:>12.4} {:>14.4}{}",
            join_names(row.predictors),
            row.aic,
            row.absolute,
            if row.best { "  *" } else { "" }
        )
        .unwrap();
    }
}

fn render_report(r: &Report) -> String {
    let a = &r.analysis;
    let mut out = String::new();
    write_header(&mut out, a);
    write_thresholds(&mut out, a);

    out.push_str("\nAveraged AIC over half-split iterations\n");
    let ranked = rank_models(a);
    let rows: Vec<Row> = ranked
        .iter()
        .map(|m| Row {
            predictors: &m.predictors,
            aic: m.mean_aic,
            absolute: m.mean_absolute_aic,
            best: m.is_best,
        })
        .collect();
    write_rows(&mut out, &rows);
    let best = a.best_model();
    writeln!(
        out,
        "  Best: {} (AIC {:.4})",
        join_names(&best.predictors),
        best.mean_aic
    )
    .unwrap();

    if let Some(full) = &r.full_data {
        out.push_str("\nFull-data pass at averaged thresholds\n");
        let min = full
            .iter()
            .enumerate()
            .fold(0, |b, (k, s)| if s.aic < full[b].aic { k } else { b });
        let rows: Vec<Row> = full
            .iter()
            .enumerate()
            .map(|(k, s)| Row {
                predictors: &s.predictors,
                aic: s.aic,
                absolute: s.absolute_aic,
                best: k == min,
            })
            .collect();
        write_rows(&mut out, &rows);
        if let Some(s) = full.get(min) {
            writeln!(
                out,
                "  Best: {} (AIC {:.4})",
                join_names(&s.predictors),
                s.aic
            )
            .unwrap();
        }
    }
    out
}

fn render_simulation(study: &SimulationReport) -> String {
    let s = &study.settings;
    let mut out = String::new();
    writeln!(
        out,
        "Simulation study: seed {}, {} iterations, grid size {}",
        s.master_seed, s.iterations, s.grid_size
    )
    .unwrap();
    out.push_str(
        "Model 1: csimb ~ simb + simc   Model 2: csimb ~ simb   Model 3: csimb ~ simc\n\n",
    );
    writeln!(
        out,
        "{:<6} {:>10} {:>10} {:>12} {:>12} {:>12}",
        "case", "simb thr", "simc thr", "Model 1", "Model 2", "Model 3"
    )
    .unwrap();
    for c in &study.cases {
        writeln!(
            out,
            "{:<6} {:>10.4} {:>10.4} {:>12.2} {:>12.2} {:>12.2}",
            c.case,
            c.simb_threshold,
            c.simc_threshold,
            c.model1.mean_absolute_aic,
            c.model2.mean_absolute_aic,
            c.model3.mean_absolute_aic
        )
        .unwrap();
    }
    out.push_str("\nAIC relative to the empty model\n");
    writeln!(
        out,
        "{:<6} {:>12} {:>12} {:>12}",
        "case", "Model 1", "Model 2", "Model 3"
    )
    .unwrap();
    for c in &study.cases {
        writeln!(
            out,
            "{:<6} {:>12.2} {:>12.2} {:>12.2}",
            c.case, c.model1.mean_aic, c.model2.mean_aic, c.model3.mean_aic
        )
        .unwrap();
    }
    out
}
