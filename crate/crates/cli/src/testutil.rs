use catdap_core::pipeline::{AveragedThreshold, ModelSummary};
use catdap_core::tables::enumerate_models;
use catdap_core::AggregateResult;

/// Aggregate with the given mean AICs in enumeration order; the absolute
/// scale is offset by 1000.
pub fn synthetic(response: &str, predictors: &[&str], aics: &[f64]) -> AggregateResult {
    let specs = enumerate_models(predictors.len(), 0);
    assert_eq!(specs.len(), aics.len());
    let models: Vec<ModelSummary> = specs
        .into_iter()
        .zip(aics)
        .map(|(spec, &aic)| ModelSummary {
            predictors: spec
                .predictor_axes
                .iter()
                .map(|&a| predictors[a - 1].to_string())
                .collect(),
            spec,
            mean_aic: aic,
            mean_absolute_aic: aic + 1000.0,
        })
        .collect();
    let best = models.iter().enumerate().fold(0, |b, (k, m)| {
        if m.mean_aic < models[b].mean_aic {
            k
        } else {
            b
        }
    });
    AggregateResult {
        response: response.into(),
        response_threshold: None,
        predictors: predictors.iter().map(|s| s.to_string()).collect(),
        iterations: 10,
        thresholds: predictors
            .iter()
            .map(|p| AveragedThreshold {
                variable: p.to_string(),
                mean: 0.123456789,
                lower: -3.0,
                upper: 8.0,
            })
            .collect(),
        models,
        best,
    }
}
