//! Synthetic data for the simulation study: a two-component truncated
//! normal mixture (`simb`), its interval-rule labels (`csimb`), and an
//! unrelated beta-distributed nuisance variable (`simc`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{
    run_analysis, AggregateResult, AnalysisConfig, Column, Dataset, ThresholdRange,
};
use crate::stats::{std_normal_cdf, std_normal_quantile};
use crate::tables::CategoricalSeries;

pub const SIMB_PER_COMPONENT: usize = 500;
pub const SIMC_LEN: usize = 1000;
pub const SIMC_SHAPE: (f64, f64) = (3.45, 10.0);
pub const SIMC_RANGE: (f64, f64) = (0.1, 0.5);

/// Normal(mu, sigma) restricted to `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncNormSpec {
    pub mu: f64,
    pub sigma: f64,
    pub a: f64,
    pub b: f64,
}

impl TruncNormSpec {
    pub fn new(mu: f64, sigma: f64, a: f64, b: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if !(a < b) {
            return Err(Error::InvalidRange { lower: a, upper: b });
        }
        Ok(Self { mu, sigma, a, b })
    }
}

/// Inverse-CDF draws: `mu + sigma * Q(F(alpha) + U (F(beta) - F(alpha)))`.
pub fn sample_truncated_normal<R: Rng + ?Sized>(
    spec: &TruncNormSpec,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let spec = TruncNormSpec::new(spec.mu, spec.sigma, spec.a, spec.b)?;
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let lo = std_normal_cdf((spec.a - spec.mu) / spec.sigma);
    let hi = std_normal_cdf((spec.b - spec.mu) / spec.sigma);
    if !(hi > lo) {
        return Err(Error::InvalidParameter(
            "truncation interval has no probability mass".into(),
        ));
    }
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u: f64 = rng.random();
        let p = lo + u * (hi - lo);
        // u = 0 with lo = 0 would ask for the quantile of 0
        if p <= 0.0 || p >= 1.0 {
            continue;
        }
        let x = spec.mu + spec.sigma * std_normal_quantile(p)?;
        out.push(x.clamp(spec.a, spec.b));
    }
    Ok(out)
}

/// Beta draws as `X / (X + Y)` with `X ~ Gamma(alpha)`, `Y ~ Gamma(beta)`.
pub fn sample_beta<R: Rng + ?Sized>(
    alpha: f64,
    beta: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let bad = |v: f64| !(v > 0.0) || !v.is_finite();
    if bad(alpha) || bad(beta) {
        return Err(Error::InvalidParameter(format!(
            "beta shapes must be positive, got ({alpha}, {beta})"
        )));
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let ga = Gamma::new(alpha, 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let gb = Gamma::new(beta, 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = ga.sample(rng);
        let y = gb.sample(rng);
        let v = x / (x + y);
        if v > 0.0 && v < 1.0 {
            out.push(v);
        }
    }
    Ok(out)
}

/// One of the three simulation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCase {
    pub id: u8,
    pub components: [TruncNormSpec; 2],
    /// Half-open intervals `[lo, hi)` where `csimb = 1`.
    pub intervals: [(f64, f64); 2],
    /// Search range for the `simb` threshold.
    pub simb_range: (f64, f64),
}

impl SimCase {
    pub fn new(id: u8) -> Result<Self> {
        let tn = |mu, sigma| TruncNormSpec {
            mu,
            sigma,
            a: 1.0,
            b: 10.0,
        };
        let case = match id {
            1 => Self {
                id,
                components: [tn(3.0, 1.75), tn(7.0, 0.75)],
                intervals: [(2.0, 4.0), (6.0, 8.0)],
                simb_range: (1.5, 8.0),
            },
            2 => Self {
                id,
                components: [tn(3.0, 0.75), tn(7.0, 1.75)],
                intervals: [(2.0, 4.0), (6.5, 8.5)],
                simb_range: (2.0, 9.0),
            },
            3 => Self {
                id,
                components: [tn(3.0, 0.75), tn(7.0, 0.75)],
                intervals: [(2.5, 3.5), (6.5, 7.5)],
                simb_range: (2.0, 8.0),
            },
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown simulation case {id}"
                )))
            }
        };
        Ok(case)
    }

    pub fn all() -> [SimCase; 3] {
        [1, 2, 3].map(|id| SimCase::new(id).expect("built-in case"))
    }

    pub fn label(&self, x: f64) -> usize {
        usize::from(self.intervals.iter().any(|&(lo, hi)| lo <= x && x < hi))
    }
}

/// 500 draws from each mixture component, shuffled together.
pub fn gen_simb<R: Rng + ?Sized>(case: &SimCase, rng: &mut R) -> Result<Vec<f64>> {
    use rand::seq::SliceRandom;
    let mut values = sample_truncated_normal(&case.components[0], SIMB_PER_COMPONENT, rng)?;
    values.extend(sample_truncated_normal(
        &case.components[1],
        SIMB_PER_COMPONENT,
        rng,
    )?);
    values.shuffle(rng);
    Ok(values)
}

pub fn gen_csimb(case: &SimCase, simb: &[f64]) -> Result<CategoricalSeries> {
    CategoricalSeries::binary("csimb", simb.iter().map(|&x| case.label(x)).collect())
}

pub fn gen_simc<R: Rng + ?Sized>(rng: &mut R) -> Result<Vec<f64>> {
    sample_beta(SIMC_SHAPE.0, SIMC_SHAPE.1, SIMC_LEN, rng)
}

/// csimb, simb and simc for one case.
pub fn gen_case_dataset<R: Rng + ?Sized>(case: &SimCase, rng: &mut R) -> Result<Dataset> {
    let simb = gen_simb(case, rng)?;
    let csimb = gen_csimb(case, &simb)?;
    let simc = gen_simc(rng)?;
    Dataset::new()
        .with("csimb", Column::Categorical(csimb))?
        .with("simb", Column::Continuous(simb))?
        .with("simc", Column::Continuous(simc))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSettings {
    pub master_seed: u64,
    pub iterations: usize,
    pub grid_size: usize,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            master_seed: 0,
            iterations: crate::pipeline::DEFAULT_ITERATIONS,
            grid_size: crate::discretize::DEFAULT_GRID_SIZE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelAic {
    pub mean_aic: f64,
    pub mean_absolute_aic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case: u8,
    pub simb_threshold: f64,
    pub simc_threshold: f64,
    /// csimb on simb and simc.
    pub model1: ModelAic,
    /// csimb on simb.
    pub model2: ModelAic,
    /// csimb on simc.
    pub model3: ModelAic,
    pub aggregate: AggregateResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub settings: SimulationSettings,
    pub cases: Vec<CaseReport>,
}

/// Stream offset for the data-generation RNG of each case, far away from
/// the iteration streams.
const DATA_STREAM_BASE: u64 = 1 << 40;

pub fn case_rng(master_seed: u64, case: u8) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(DATA_STREAM_BASE + u64::from(case));
    rng
}

pub fn case_config(
    case: &SimCase,
    settings: &SimulationSettings,
    analysis_seed: u64,
) -> AnalysisConfig {
    let mut config = AnalysisConfig::new("csimb", vec!["simb".into(), "simc".into()])
        .range(
            "simb",
            ThresholdRange {
                lower: case.simb_range.0,
                upper: case.simb_range.1,
                grid_size: settings.grid_size,
            },
        )
        .range(
            "simc",
            ThresholdRange {
                lower: SIMC_RANGE.0,
                upper: SIMC_RANGE.1,
                grid_size: settings.grid_size,
            },
        );
    config.iterations = settings.iterations;
    config.master_seed = analysis_seed;
    config
}

pub fn run_case(case: &SimCase, settings: &SimulationSettings) -> Result<CaseReport> {
    let mut rng = case_rng(settings.master_seed, case.id);
    let data = gen_case_dataset(case, &mut rng)?;
    let analysis_seed: u64 = rng.random();
    let agg = run_analysis(&data, &case_config(case, settings, analysis_seed))?;
    let model = |predictors: &[&str]| {
        let m = agg
            .models
            .iter()
            .find(|m| m.predictors == predictors)
            .expect("all subsets enumerated");
        ModelAic {
            mean_aic: m.mean_aic,
            mean_absolute_aic: m.mean_absolute_aic,
        }
    };
    Ok(CaseReport {
        case: case.id,
        simb_threshold: agg.threshold("simb").expect("simb is continuous"),
        simc_threshold: agg.threshold("simc").expect("simc is continuous"),
        model1: model(&["simb", "simc"]),
        model2: model(&["simb"]),
        model3: model(&["simc"]),
        aggregate: agg,
    })
}

/// All three cases with n = 1000 rows each.
pub fn run_simulation_study(settings: &SimulationSettings) -> Result<SimulationReport> {
    let cases = SimCase::all()
        .iter()
        .map(|case| run_case(case, settings))
        .collect::<Result<_>>()?;
    Ok(SimulationReport {
        settings: *settings,
        cases,
    })
}
