//! Turning continuous columns into categorical ones.
//!
//! Two routes are provided. The supervised one cuts a column in two at the
//! grid point whose 2x2 table against a binary response has the smallest
//! chi-square p-value. The unsupervised one fits equal-width histograms and
//! picks the section count by AIC.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::stats::chi_square_from_cells;
use crate::tables::CategoricalSeries;

pub const DEFAULT_GRID_SIZE: usize = 100;

/// Candidate cut points strictly inside `(lower, upper)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    lower: f64,
    upper: f64,
    points: Vec<f64>,
}

impl ThresholdGrid {
    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `count` evenly spaced points `a + l (b - a) / (count + 1)`, `l = 1..=count`.
pub fn make_grid(lower: f64, upper: f64, count: usize) -> Result<ThresholdGrid> {
    if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
        return Err(Error::InvalidRange { lower, upper });
    }
    if count == 0 {
        return Err(Error::EmptyGrid);
    }
    let step = (upper - lower) / (count as f64 + 1.0);
    let points: Vec<f64> = (1..=count).map(|l| lower + l as f64 * step).collect();
    if points.windows(2).any(|w| w[0] >= w[1]) || points[0] <= lower || points[count - 1] >= upper {
        return Err(Error::InvalidParameter(format!(
            "grid of {count} points does not fit strictly inside ({lower}, {upper})"
        )));
    }
    Ok(ThresholdGrid {
        lower,
        upper,
        points,
    })
}

/// Code 1 where the value is strictly below `threshold`, else 0.
pub fn binarize(
    name: impl Into<String>,
    values: &[f64],
    threshold: f64,
) -> Result<CategoricalSeries> {
    let codes = values.iter().map(|&v| usize::from(v < threshold)).collect();
    CategoricalSeries::binary(name, codes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub threshold: f64,
    pub p_value: f64,
    pub grid_index: usize,
}

/// Grid point with the smallest chi-square p-value against `response`.
/// Ties go to the lowest grid index.
pub fn best_threshold(
    response: &CategoricalSeries,
    values: &[f64],
    grid: &ThresholdGrid,
) -> Result<ThresholdResult> {
    if values.len() != response.len() {
        return Err(Error::LengthMismatch {
            expected: response.len(),
            found: values.len(),
        });
    }
    if !response.is_binary() {
        return Err(Error::NotBinary(response.name().to_string()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite value {v}")));
    }
    let mut pairs: Vec<(f64, usize)> = values
        .iter()
        .copied()
        .zip(response.codes().iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut totals = [0u64; 2];
    for &(_, r) in &pairs {
        totals[r] += 1;
    }

    let mut below = [0u64; 2];
    let mut cursor = 0;
    let mut best: Option<ThresholdResult> = None;
    for (grid_index, &s) in grid.points().iter().enumerate() {
        while cursor < pairs.len() && pairs[cursor].0 < s {
            below[pairs[cursor].1] += 1;
            cursor += 1;
        }
        // rows: response 0/1, columns: indicator 0/1
        let cells = [
            totals[0] - below[0],
            below[0],
            totals[1] - below[1],
            below[1],
        ];
        let p_value = chi_square_from_cells(cells).p_value;
        if best.is_none_or(|b| p_value < b.p_value) {
            best = Some(ThresholdResult {
                threshold: s,
                p_value,
                grid_index,
            });
        }
    }
    best.ok_or(Error::EmptyGrid)
}

/// `ln(n! / prod n(i)!)` via log-gamma.
pub fn log_multinomial_coefficient(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    ln_gamma(n as f64 + 1.0)
        - counts
            .iter()
            .map(|&c| ln_gamma(c as f64 + 1.0))
            .sum::<f64>()
}

/// Equal-width histogram fit with its AIC and the pieces it is made of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramFit {
    pub n_sections: usize,
    pub width: f64,
    pub counts: Vec<u64>,
    pub aic: f64,
    /// `ln(n! / prod n(i)!)`, reported but not part of `aic`.
    pub log_multinomial: f64,
}

fn section_edges(lower: f64, upper: f64, sections: usize) -> Vec<f64> {
    let width = (upper - lower) / sections as f64;
    let mut edges: Vec<f64> = (0..sections).map(|k| lower + k as f64 * width).collect();
    edges.push(upper);
    edges
}

/// Section of each value; values on an internal edge go right, the upper
/// bound goes to the last section.
fn assign_sections(values: &[f64], edges: &[f64]) -> Vec<usize> {
    let internal = &edges[1..edges.len() - 1];
    values
        .iter()
        .map(|&v| internal.partition_point(|&e| e <= v))
        .collect()
}

/// Histogram model over `sections` equal-width bins of `[lower, upper]`:
///
/// `AIC = -2 sum n(i) ln(n(i)/n) + 2 {(c - 1) + n ln d}`
///
/// with `d = (upper - lower) / c`. The multinomial coefficient is kept out
/// of the criterion (it is returned in `log_multinomial`).
pub fn histogram_fit(
    values: &[f64],
    sections: usize,
    lower: f64,
    upper: f64,
) -> Result<HistogramFit> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if sections == 0 {
        return Err(Error::InvalidParameter(
            "histogram needs at least one section".into(),
        ));
    }
    if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
        return Err(Error::InvalidRange { lower, upper });
    }
    if let Some(&value) = values.iter().find(|&&v| !(v >= lower && v <= upper)) {
        return Err(Error::OutOfRange {
            value,
            lower,
            upper,
        });
    }
    let edges = section_edges(lower, upper, sections);
    let mut counts = vec![0u64; sections];
    for k in assign_sections(values, &edges) {
        counts[k] += 1;
    }
    let n = values.len() as f64;
    let log_lik: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 * (c as f64 / n).ln())
        .sum();
    let width = (upper - lower) / sections as f64;
    let aic = -2.0 * log_lik + 2.0 * ((sections as f64 - 1.0) + n * width.ln());
    Ok(HistogramFit {
        n_sections: sections,
        width,
        log_multinomial: log_multinomial_coefficient(&counts),
        counts,
        aic,
    })
}

pub fn histogram_aic(values: &[f64], sections: usize, lower: f64, upper: f64) -> Result<f64> {
    histogram_fit(values, sections, lower, upper).map(|f| f.aic)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramCategorization {
    pub n_sections: usize,
    pub edges: Vec<f64>,
    pub aic: f64,
    pub series: CategoricalSeries,
}

/// Search section counts `1..=max_sections` over the data range and keep
/// the one with the smallest histogram AIC (first on ties).
pub fn best_equal_width_histogram(
    name: impl Into<String>,
    values: &[f64],
    max_sections: usize,
) -> Result<HistogramCategorization> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if max_sections == 0 {
        return Err(Error::InvalidParameter(
            "max_sections must be positive".into(),
        ));
    }
    let lower = values.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut best: Option<HistogramFit> = None;
    for c in 1..=max_sections {
        let fit = histogram_fit(values, c, lower, upper)?;
        if best.as_ref().is_none_or(|b| fit.aic < b.aic) {
            best = Some(fit);
        }
    }
    let best = best.expect("at least one section count evaluated");
    let edges = section_edges(lower, upper, best.n_sections);
    let codes = assign_sections(values, &edges);
    Ok(HistogramCategorization {
        n_sections: best.n_sections,
        aic: best.aic,
        series: CategoricalSeries::new(name, codes, best.n_sections)?,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::stats::chi_square_2x2;
    use crate::tables::build_table;

    /// Exhaustive scan through binarize + table + chi-square.
    fn scan_p_values(
        response: &CategoricalSeries,
        values: &[f64],
        grid: &ThresholdGrid,
    ) -> Vec<f64> {
        grid.points()
            .iter()
            .map(|&s| {
                let k = binarize("k", values, s).unwrap();
                chi_square_2x2(&build_table(&[response.clone(), k]).unwrap())
                    .unwrap()
                    .p_value
            })
            .collect()
    }

    #[test]
    fn grid_examples() {
        assert_eq!(make_grid(0.0, 1.0, 3).unwrap().points(), &[0.25, 0.5, 0.75]);
        assert_eq!(make_grid(-3.0, 8.0, 1).unwrap().points(), &[2.5]);
        let g = make_grid(1.5, 8.0, 100).unwrap();
        assert_eq!(g.len(), 100);
        assert_abs_diff_eq!(g.points()[0], 1.5 + 6.5 / 101.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.points()[1] - g.points()[0], 6.5 / 101.0, epsilon = 1e-12);
        assert!(*g.points().last().unwrap() < 8.0);
    }

    #[test]
    fn grid_errors() {
        assert!(matches!(
            make_grid(1.0, 1.0, 3),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            make_grid(2.0, 1.0, 3),
            Err(Error::InvalidRange { .. })
        ));
        assert_eq!(make_grid(0.0, 1.0, 0), Err(Error::EmptyGrid));
    }

    #[test]
    fn binarize_examples() {
        assert_eq!(
            binarize("x", &[1.0, 2.0, 3.0], 2.5).unwrap().codes(),
            &[1, 1, 0]
        );
        assert_eq!(
            binarize("x", &[1.0, 2.0, 3.0], -1e300).unwrap().codes(),
            &[0, 0, 0]
        );
        assert_eq!(binarize("x", &[2.39, 2.39], 2.39).unwrap().codes(), &[0, 0]);
        assert!(binarize("x", &[], 0.0).is_err());
    }

    #[test]
    fn known_cut_is_recovered() {
        let values: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let response =
            CategoricalSeries::binary("y", values.iter().map(|&v| usize::from(v < 5.0)).collect())
                .unwrap();
        let grid = make_grid(0.0, 10.0, 99).unwrap();
        let r = best_threshold(&response, &values, &grid).unwrap();
        let nearest = grid
            .points()
            .iter()
            .copied()
            .min_by(|a, b| (a - 5.0).abs().total_cmp(&(b - 5.0).abs()))
            .unwrap();
        assert_eq!(r.threshold, nearest);
        assert!(r.p_value < 1e-100);
        let scan = scan_p_values(&response, &values, &grid);
        assert_eq!(r.p_value, scan[r.grid_index]);
    }

    #[test]
    fn coin_response_matches_scan_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..400).map(|_| rng.random_range(0.0..10.0)).collect();
        let response =
            CategoricalSeries::binary("y", (0..400).map(|_| rng.random_range(0..2)).collect())
                .unwrap();
        let grid = make_grid(0.0, 10.0, 50).unwrap();
        let r = best_threshold(&response, &values, &grid).unwrap();
        let scan = scan_p_values(&response, &values, &grid);
        let min = scan.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((r.p_value - min).abs() <= 1e-15);
    }

    #[test]
    fn constant_column_picks_first_point() {
        let values = vec![3.0; 20];
        let response = CategoricalSeries::binary("y", (0..20).map(|i| i % 2).collect()).unwrap();
        let grid = make_grid(0.0, 10.0, 9).unwrap();
        let r = best_threshold(&response, &values, &grid).unwrap();
        assert_eq!(r.grid_index, 0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.threshold, grid.points()[0]);
    }

    #[test]
    fn best_threshold_errors() {
        let response = CategoricalSeries::binary("y", vec![0, 1, 1]).unwrap();
        let grid = make_grid(0.0, 1.0, 3).unwrap();
        assert!(matches!(
            best_threshold(&response, &[0.1, 0.2], &grid),
            Err(Error::LengthMismatch { .. })
        ));
        let three = CategoricalSeries::new("y", vec![0, 1, 2], 3).unwrap();
        assert!(matches!(
            best_threshold(&three, &[0.1, 0.2, 0.3], &grid),
            Err(Error::NotBinary(_))
        ));
    }

    #[test]
    fn single_section_histogram() {
        let values = [0.0, 1.0, 2.0, 3.0];
        let fit = histogram_fit(&values, 1, 0.0, 3.0).unwrap();
        assert_eq!(fit.log_multinomial, 0.0);
        assert_abs_diff_eq!(fit.aic, 2.0 * 4.0 * 3.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn one_value_per_section() {
        let values = [0.5, 1.5, 2.5, 3.5];
        let fit = histogram_fit(&values, 4, 0.0, 4.0).unwrap();
        assert_eq!(fit.counts, vec![1, 1, 1, 1]);
        let log_lik = 4.0 * (0.25f64).ln();
        assert_abs_diff_eq!(fit.aic, -2.0 * log_lik + 2.0 * 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.log_multinomial, 24f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn section_boundaries() {
        // edges at 0, 1, 2, 3: 1.0 goes right, the maximum goes to the last bin
        let fit = histogram_fit(&[0.0, 1.0, 2.0, 3.0], 3, 0.0, 3.0).unwrap();
        assert_eq!(fit.counts, vec![1, 1, 2]);
    }

    #[test]
    fn histogram_errors() {
        assert_eq!(histogram_aic(&[], 2, 0.0, 1.0), Err(Error::EmptyInput));
        assert!(matches!(
            histogram_aic(&[0.5, 1.5], 2, 0.0, 1.0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(histogram_aic(&[0.5], 0, 0.0, 1.0).is_err());
        assert!(best_equal_width_histogram("x", &[1.0, 1.0], 3).is_err());
    }

    #[test]
    fn log_multinomial_matches_factorials() {
        fn fact(n: u64) -> f64 {
            (1..=n).map(|k| k as f64).product()
        }
        for counts in [
            vec![3, 5, 2],
            vec![20],
            vec![0, 7, 13],
            vec![1; 20],
            vec![4, 4, 4, 4, 4],
        ] {
            let n: u64 = counts.iter().sum();
            let exact = (fact(n) / counts.iter().map(|&c| fact(c)).product::<f64>()).ln();
            assert_abs_diff_eq!(log_multinomial_coefficient(&counts), exact, epsilon = 1e-9);
        }
    }

    #[test]
    fn tight_cluster_prefers_few_sections() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let values: Vec<f64> = (0..500)
            .map(|_| 4.2 + rng.random_range(-1e-6..1e-6))
            .collect();
        let h = best_equal_width_histogram("x", &values, 40).unwrap();
        assert!(h.n_sections < 20, "got {}", h.n_sections);
    }

    #[test]
    fn bimodal_needs_several_sections() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut values: Vec<f64> = (0..300).map(|_| rng.random_range(0.0..1.0)).collect();
        values.extend((0..300).map(|_| rng.random_range(9.0..10.0)));
        let h = best_equal_width_histogram("x", &values, 30).unwrap();
        assert!(h.n_sections >= 2);
        assert_eq!(h.series.len(), 600);
        assert_eq!(h.edges.len(), h.n_sections + 1);
    }

    #[test]
    fn single_section_cap() {
        let h = best_equal_width_histogram("x", &[1.0, 2.0, 5.0], 1).unwrap();
        assert_eq!(h.n_sections, 1);
        assert!(h.series.codes().iter().all(|&c| c == 0));
    }

    fn response_and_values() -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
        prop::collection::vec((0usize..2, -5.0f64..5.0), 4..80)
            .prop_map(|rows| rows.into_iter().unzip())
    }

    proptest! {
        #[test]
        fn label_swap_invariance((codes, values) in response_and_values(), l in 1usize..40) {
            let response = CategoricalSeries::binary("y", codes).unwrap();
            let grid = make_grid(-5.0, 5.0, l).unwrap();
            let a = best_threshold(&response, &values, &grid).unwrap();
            let b = best_threshold(&response.flipped().unwrap(), &values, &grid).unwrap();
            prop_assert_eq!(a.grid_index, b.grid_index);
            prop_assert_eq!(a.p_value, b.p_value);
        }

        #[test]
        fn argmin_over_exhaustive_scan((codes, values) in response_and_values(), l in 1usize..40) {
            let response = CategoricalSeries::binary("y", codes).unwrap();
            let grid = make_grid(-5.0, 5.0, l).unwrap();
            let r = best_threshold(&response, &values, &grid).unwrap();
            let scan = scan_p_values(&response, &values, &grid);
            for (i, &p) in scan.iter().enumerate() {
                prop_assert!(r.p_value <= p + 1e-15);
                if i < r.grid_index {
                    prop_assert!(p > r.p_value - 1e-15);
                }
            }
            prop_assert!((scan[r.grid_index] - r.p_value).abs() <= 1e-15);
        }

        #[test]
        fn binarize_monotone_in_threshold(values in prop::collection::vec(-10.0f64..10.0, 1..50), s in -10.0f64..10.0, ds in 0.0f64..5.0) {
            let low = binarize("x", &values, s).unwrap();
            let high = binarize("x", &values, s + ds).unwrap();
            for (a, b) in low.codes().iter().zip(high.codes()) {
                prop_assert!(a <= b);
            }
        }

        #[test]
        fn histogram_counts_sum_to_n(values in prop::collection::vec(0.0f64..1.0, 1..100), c in 1usize..30) {
            let fit = histogram_fit(&values, c, 0.0, 1.0).unwrap();
            prop_assert_eq!(fit.counts.iter().sum::<u64>(), values.len() as u64);
            let total: f64 = fit.counts.iter().map(|&k| k as f64 / values.len() as f64).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
