//! Pearson chi-square test for 2x2 tables and the normal / chi-square(1)
//! tail functions it relies on.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::tables::ContingencyTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
}

impl ChiSquareResult {
    fn no_information() -> Self {
        Self {
            statistic: 0.0,
            df: 1,
            p_value: 1.0,
        }
    }
}

/// Pearson's test of independence on a 2x2 table, no continuity correction.
///
/// A table with an empty row or column carries no information and gets
/// statistic 0 and p-value 1.
pub fn chi_square_2x2(table: &ContingencyTable) -> Result<ChiSquareResult> {
    if table.dims() != [2, 2] {
        return Err(Error::NotTwoByTwo(table.dims().to_vec()));
    }
    if table.total_n() == 0 {
        return Err(Error::EmptyTable);
    }
    let c = table.counts();
    Ok(chi_square_from_cells([c[0], c[1], c[2], c[3]]))
}

/// Same test on raw cells `[n00, n01, n10, n11]`; used by the threshold
/// sweep to avoid building a table per grid point.
pub(crate) fn chi_square_from_cells(cells: [u64; 4]) -> ChiSquareResult {
    let n: u64 = cells.iter().sum();
    let rows = [cells[0] + cells[1], cells[2] + cells[3]];
    let cols = [cells[0] + cells[2], cells[1] + cells[3]];
    if n == 0 || rows.contains(&0) || cols.contains(&0) {
        return ChiSquareResult::no_information();
    }
    // n (ad - bc)^2 / (r1 r2 c1 c2), symmetric under label swaps and
    // transposition bit for bit
    let det = cells[0] as i128 * cells[3] as i128 - cells[1] as i128 * cells[2] as i128;
    let det = det.unsigned_abs() as f64;
    let row_product = (rows[0] as u128 * rows[1] as u128) as f64;
    let col_product = (cols[0] as u128 * cols[1] as u128) as f64;
    let statistic = n as f64 * det * det / (row_product * col_product);
    ChiSquareResult {
        statistic,
        df: 1,
        p_value: upper_tail_unchecked(statistic),
    }
}

/// Complementary error function, about 1e-15 relative accuracy for
/// `x >= 0`: power series for erf below 1.5, continued fraction above.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 1.5 {
        // erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (2n+1)!!
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term > sum * 1e-17 {
            n += 1.0;
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            sum += term;
        }
        return 1.0 - FRAC_2_SQRT_PI * (-x2).exp() * sum;
    }
    if x > 27.0 {
        return 0.0;
    }
    // erfc(x) = e^{-x^2} / (sqrt(pi) (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))))
    // evaluated with the modified Lentz method
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let a = n as f64 / 2.0;
        d = 1.0 / (x + a * d);
        c = x + a / c;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

fn upper_tail_unchecked(x: f64) -> f64 {
    erfc((x / 2.0).sqrt()).clamp(0.0, 1.0)
}

/// `P(X > x)` for `X ~ chi-square(1)`, i.e. `erfc(sqrt(x / 2))`.
pub fn chi_square_upper_tail(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Negative(x));
    }
    Ok(upper_tail_unchecked(x))
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Inverse of [`std_normal_cdf`]: a rational starting point refined by
/// Halley steps on the cdf.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if p > 0.5 {
        // 1 - p is exact here
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

/// Quantile for `p <= 0.5`.
fn lower_quantile(p: f64) -> f64 {
    // Abramowitz & Stegun 26.2.23, |error| < 4.5e-4
    let t = (-2.0 * p.ln()).sqrt();
    let num = 2.515517 + t * (0.802853 + t * 0.010328);
    let den = 1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308));
    let mut x = -(t - num / den);
    for _ in 0..50 {
        let pdf = std_normal_pdf(x);
        if pdf == 0.0 {
            break;
        }
        let r = (std_normal_cdf(x) - p) / pdf;
        let step = r / (1.0 + 0.5 * x * r);
        x -= step;
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}
