//! Association diagrams in Graphviz DOT.

use std::fmt::Write as _;

use catdap_core::AggregateResult;

pub const DEFAULT_AIC_MARGIN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Style {
    Solid,
    Dashed,
}

/// Quoted DOT identifier.
fn quote(id: &str) -> String {
    let mut s = String::with_capacity(id.len() + 2);
    s.push('"');
    for c in id.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            c => s.push(c),
        }
    }
    s.push('"');
    s
}

/// Directed graph predictor -> response. Predictors of each minimum-AIC
/// model get solid edges; other predictors found in models whose averaged
/// AIC is less than `aic_margin` above the minimum get dashed edges. A
/// pair of opposite edges with the same style is drawn once with
/// `dir=both`.
pub fn emit_dot(results: &[AggregateResult], aic_margin: f64) -> String {
    let mut nodes: Vec<&str> = Vec::new();
    let mut edges: Vec<(&str, &str, Style)> = Vec::new();
    for r in results {
        for name in std::iter::once(&r.response).chain(&r.predictors) {
            if !nodes.contains(&name.as_str()) {
                nodes.push(name);
            }
        }
        let best = r.best_model();
        for p in &r.predictors {
            let style = if best.predictors.contains(p) {
                Some(Style::Solid)
            } else if r
                .models
                .iter()
                .any(|m| m.mean_aic - best.mean_aic < aic_margin && m.predictors.contains(p))
            {
                Some(Style::Dashed)
            } else {
                None
            };
            if let Some(style) = style {
                let edge = (p.as_str(), r.response.as_str(), style);
                if !edges.contains(&edge) {
                    edges.push(edge);
                }
            }
        }
    }

    let mut out = String::from("digraph catdap {\n");
    for n in &nodes {
        writeln!(out, "  {};", quote(n)).unwrap();
    }
    let mut done = vec![false; edges.len()];
    for (i, &(from, to, style)) in edges.iter().enumerate() {
        if done[i] {
            continue;
        }
        done[i] = true;
        let reverse = edges
            .iter()
            .enumerate()
            .position(|(j, &e)| !done[j] && e == (to, from, style));
        let mut attrs = Vec::new();
        if style == Style::Dashed {
            attrs.push("style=dashed");
        }
        if let Some(j) = reverse {
            done[j] = true;
            attrs.push("dir=both");
        }
        write!(out, "  {} -> {}", quote(from), quote(to)).unwrap();
        if !attrs.is_empty() {
            write!(out, " [{}]", attrs.join(", ")).unwrap();
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}
