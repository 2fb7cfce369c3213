//! Sampling under alternatives and Monte-Carlo power.
//!
//! Replicates run in blocks of [`BLOCK_SIZE`]; block `b` draws from
//! `SeededRng::block(b)`. Each block reports integer counts, and blocks are
//! merged in index order, so estimates are bit-identical for a given seed
//! regardless of how rayon schedules the work.

use rayon::prelude::*;
use serde::Serialize;

use super::{critical_value, critical_value_from_histogram, CriticalMethod, CriticalValue, SeededRng};
use crate::design::Design;
use crate::error::{invalid, Result};
use crate::statistics::{count_cells, exceeding_count, Sample};

pub const BLOCK_SIZE: u64 = 4096;

/// Minimum replicate count accepted by [`mc_power`].
pub const MIN_POWER_REPS: u64 = 1_000;

/// Baseline `F` used when sampling a Lehmann alternative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    Uniform,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AlternativeKind {
    /// Varied group has cdf `F^gamma`.
    Lehmann { gamma: f64, baseline: Baseline },
    /// Baseline Exp(1); varied group Exp(rate).
    Exponential { rate: f64 },
    /// Baseline Weibull(shape, 1); varied group Weibull(shape, scale).
    Weibull { shape: f64, scale: f64 },
}

/// Which group carries the varied parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariedGroup {
    /// The test group Y.
    #[default]
    Test,
    /// The training group X.
    Training,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlternativeSpec {
    pub kind: AlternativeKind,
    pub convention: VariedGroup,
}

fn positive(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        return invalid(format!("{name} must be positive and finite, got {value}"));
    }
    Ok(())
}

impl AlternativeSpec {
    pub fn lehmann(gamma: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        Ok(AlternativeSpec {
            kind: AlternativeKind::Lehmann {
                gamma,
                baseline: Baseline::Uniform,
            },
            convention: VariedGroup::Test,
        })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(AlternativeSpec {
            kind: AlternativeKind::Exponential { rate },
            convention: VariedGroup::Test,
        })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        positive("shape", shape)?;
        positive("scale", scale)?;
        Ok(AlternativeSpec {
            kind: AlternativeKind::Weibull { shape, scale },
            convention: VariedGroup::Test,
        })
    }

    /// Both groups from the uniform distribution.
    pub fn null() -> Self {
        AlternativeSpec {
            kind: AlternativeKind::Lehmann {
                gamma: 1.0,
                baseline: Baseline::Uniform,
            },
            convention: VariedGroup::Test,
        }
    }

    pub fn with_baseline(mut self, baseline: Baseline) -> Self {
        if let AlternativeKind::Lehmann { gamma, .. } = self.kind {
            self.kind = AlternativeKind::Lehmann { gamma, baseline };
        }
        self
    }

    pub fn with_convention(mut self, convention: VariedGroup) -> Self {
        self.convention = convention;
        self
    }

    /// The varied parameter (`gamma`, `rate` or `scale`).
    pub fn parameter(&self) -> f64 {
        match self.kind {
            AlternativeKind::Lehmann { gamma, .. } => gamma,
            AlternativeKind::Exponential { rate } => rate,
            AlternativeKind::Weibull { scale, .. } => scale,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            AlternativeKind::Lehmann { .. } => "lehmann".into(),
            AlternativeKind::Exponential { .. } => "exponential".into(),
            AlternativeKind::Weibull { shape, .. } => format!("weibull({shape})"),
        }
    }

    fn draw(&self, rng: &mut SeededRng, varied: bool) -> f64 {
        match self.kind {
            AlternativeKind::Lehmann { gamma, baseline } => {
                let u = rng.uniform_open0();
                let u = if varied { u.powf(1.0 / gamma) } else { u };
                match baseline {
                    Baseline::Uniform => u,
                    // F^{-1}(u) for Exp(1), written for u near 1
                    Baseline::Exponential => -(-u).ln_1p(),
                }
            }
            AlternativeKind::Exponential { rate } => {
                let e = -rng.uniform_open0().ln();
                if varied {
                    e / rate
                } else {
                    e
                }
            }
            AlternativeKind::Weibull { shape, scale } => {
                let w = (-rng.uniform_open0().ln()).powf(1.0 / shape);
                if varied {
                    w * scale
                } else {
                    w
                }
            }
        }
    }

    /// Draws `m` training values then `n` test values.
    fn fill(&self, rng: &mut SeededRng, xs: &mut [f64], ys: &mut [f64]) {
        let vary_x = self.convention == VariedGroup::Training;
        for x in xs.iter_mut() {
            *x = self.draw(rng, vary_x);
        }
        for y in ys.iter_mut() {
            *y = self.draw(rng, !vary_x);
        }
    }
}

/// Draws one (training, test) pair under `spec`.
pub fn sample_pair(m: usize, n: usize, spec: &AlternativeSpec, rng: &mut SeededRng) -> Result<(Sample, Sample)> {
    if m == 0 || n == 0 {
        return invalid("sample sizes must be positive");
    }
    let mut xs = vec![0.0; m];
    let mut ys = vec![0.0; n];
    spec.fill(rng, &mut xs, &mut ys);
    Ok((Sample::new("training", xs)?, Sample::new("test", ys)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StatisticKind {
    /// Maximal precedence plus maximal exceedance.
    T,
    /// Precedence count plus exceedance count (`r = s`, `m = n`).
    V,
    /// Maximal precedence alone.
    Q,
}

impl StatisticKind {
    fn validate(self, design: Design) -> Result<()> {
        if self == StatisticKind::V && (design.r != design.s || design.m != design.n) {
            return invalid(format!("V is defined only for r = s and m = n ({design})"));
        }
        Ok(())
    }

    /// Largest value the statistic can take.
    fn max_value(self, design: Design) -> usize {
        match self {
            StatisticKind::T | StatisticKind::Q => design.m,
            StatisticKind::V => design.m + design.n,
        }
    }
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StatisticKind::T => "T",
            StatisticKind::V => "V",
            StatisticKind::Q => "Q",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for StatisticKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "T" | "t" => Ok(StatisticKind::T),
            "V" | "v" => Ok(StatisticKind::V),
            "Q" | "q" => Ok(StatisticKind::Q),
            other => invalid(format!("unknown statistic '{other}' (expected T, V or Q)")),
        }
    }
}

/// Reusable buffers for evaluating one statistic on simulated data.
struct Evaluator {
    design: Design,
    kind: StatisticKind,
    xs: Vec<f64>,
    ys: Vec<f64>,
    precedence: Vec<u64>,
    exceedance: Vec<u64>,
}

impl Evaluator {
    fn new(design: Design, kind: StatisticKind) -> Self {
        Evaluator {
            design,
            kind,
            xs: vec![0.0; design.m],
            ys: vec![0.0; design.n],
            precedence: vec![0; design.r],
            exceedance: vec![0; design.s],
        }
    }

    fn replicate(&mut self, spec: &AlternativeSpec, rng: &mut SeededRng) -> usize {
        spec.fill(rng, &mut self.xs, &mut self.ys);
        self.ys.sort_unstable_by(f64::total_cmp);
        count_cells(&self.xs, &self.ys, &mut self.precedence, &mut self.exceedance);
        let p = self.precedence.iter().copied().max().unwrap_or(0);
        let value = match self.kind {
            StatisticKind::T => p + self.exceedance.iter().copied().max().unwrap_or(0),
            StatisticKind::Q => p,
            StatisticKind::V => {
                self.xs.sort_unstable_by(f64::total_cmp);
                let b: u64 = self.precedence.iter().sum();
                b + exceeding_count(&self.xs, &self.ys, self.design.s)
            }
        };
        value as usize
    }
}

fn block_count(reps: u64) -> u64 {
    reps.div_ceil(BLOCK_SIZE)
}

fn block_len(reps: u64, block: u64) -> u64 {
    (reps - block * BLOCK_SIZE).min(BLOCK_SIZE)
}

/// Histogram of a statistic over `reps` replicates drawn under `spec`;
/// entry `t` counts replicates with value `t`.
pub fn simulate_histogram(
    design: Design,
    spec: &AlternativeSpec,
    kind: StatisticKind,
    reps: u64,
    rng: &SeededRng,
) -> Result<Vec<u64>> {
    kind.validate(design)?;
    let size = kind.max_value(design) + 1;
    let blocks: Vec<Vec<u64>> = (0..block_count(reps))
        .into_par_iter()
        .map(|b| {
            let mut local = rng.block(b);
            let mut eval = Evaluator::new(design, kind);
            let mut hist = vec![0u64; size];
            for _ in 0..block_len(reps, b) {
                hist[eval.replicate(spec, &mut local)] += 1;
            }
            hist
        })
        .collect();
    let mut total = vec![0u64; size];
    for hist in blocks {
        for (slot, v) in total.iter_mut().zip(hist) {
            *slot += v;
        }
    }
    Ok(total)
}

/// Monte-Carlo estimate of the randomized test's power.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerEstimate {
    pub power: f64,
    pub std_error: f64,
    pub reps: u64,
    pub critical: CriticalValue,
    pub phi: f64,
}

/// Stream offset used for null calibration of the V and Q tests.
const CALIBRATION_STREAM: u64 = 1 << 63;

/// Power of the level-`alpha` randomized test based on `statistic`.
///
/// `T` uses the exact null critical value. `V` and `Q` are calibrated on a
/// simulated null (uniform samples, at least `10^4` replicates) drawn from
/// the stream `rng.stream() ^ 2^63`.
pub fn mc_power(
    design: Design,
    alpha: f64,
    spec: &AlternativeSpec,
    statistic: StatisticKind,
    reps: u64,
    rng: &SeededRng,
) -> Result<PowerEstimate> {
    statistic.validate(design)?;
    if reps < MIN_POWER_REPS {
        return invalid(format!("power needs at least {MIN_POWER_REPS} replicates, got {reps}"));
    }
    let critical = match statistic {
        StatisticKind::T => critical_value(design, alpha, CriticalMethod::Exact)?,
        _ => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
            }
            let calib = rng.with_stream(rng.stream() ^ CALIBRATION_STREAM);
            let calib_reps = reps.max(super::MIN_CALIBRATION_REPS);
            let hist = simulate_histogram(design, &AlternativeSpec::null(), statistic, calib_reps, &calib)?;
            critical_value_from_histogram(&hist, alpha)
        }
    };
    let phi = critical.phi(alpha);
    let hist = simulate_histogram(design, spec, statistic, reps, rng)?;
    let c = critical.c;
    let rejected: u64 = hist.iter().skip(c).sum();
    let boundary = if c == 0 {
        0
    } else {
        hist.get(c - 1).copied().unwrap_or(0)
    };
    let power = (rejected as f64 + phi * boundary as f64) / reps as f64;
    let std_error = (power * (1.0 - power) / reps as f64).sqrt();
    Ok(PowerEstimate {
        power,
        std_error,
        reps,
        critical,
        phi,
    })
}

/// One cell of a power table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentCell {
    pub design: Design,
    pub spec: AlternativeSpec,
    pub statistic: StatisticKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRow {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub alternative: String,
    pub parameter: f64,
    pub statistic: StatisticKind,
    pub c: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub phi: f64,
    pub power: f64,
    pub std_error: f64,
}

/// Runs every cell with `reps` replicates. Cell `k` uses stream `k` of
/// `seed`, so adding cells at the end never changes earlier rows.
pub fn table_experiment(grid: &[ExperimentCell], alpha: f64, reps: u64, seed: u64) -> Result<Vec<PowerRow>> {
    if grid.is_empty() {
        return invalid("experiment grid is empty");
    }
    grid.iter()
        .enumerate()
        .map(|(k, cell)| {
            let rng = SeededRng::new(seed, k as u64);
            let est = mc_power(cell.design, alpha, &cell.spec, cell.statistic, reps, &rng)?;
            let Design { m, n, r, s } = cell.design;
            Ok(PowerRow {
                m,
                n,
                r,
                s,
                alternative: cell.spec.label(),
                parameter: cell.spec.parameter(),
                statistic: cell.statistic,
                c: est.critical.c,
                alpha1: est.critical.alpha1,
                alpha2: est.critical.alpha2,
                phi: est.phi,
                power: est.power,
                std_error: est.std_error,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lehmann_sampling_matches_power_law() {
        // fraction of Y below the F-median is 0.5^gamma
        let spec = AlternativeSpec::lehmann(4.0).unwrap();
        let mut rng = SeededRng::new(5, 0);
        let (_, y) = sample_pair(1, 200_000, &spec, &mut rng).unwrap();
        let frac = y.observations().iter().filter(|&&v| v < 0.5).count() as f64 / y.len() as f64;
        assert!((frac - 0.0625).abs() < 0.003, "{frac}");
    }

    #[test]
    fn weibull_mean() {
        let spec = AlternativeSpec::weibull(2.5, 1.0).unwrap();
        let mut rng = SeededRng::new(6, 0);
        let (x, _) = sample_pair(200_000, 1, &spec, &mut rng).unwrap();
        let mean = x.observations().iter().sum::<f64>() / x.len() as f64;
        let var = x.observations().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
        let expected = crate::combinatorics::ln_gamma(1.0 + 1.0 / 2.5).exp();
        assert!(
            (mean - expected).abs() < 3.0 * (var / x.len() as f64).sqrt(),
            "{mean} vs {expected}"
        );
    }

    #[test]
    fn varied_scale_goes_to_chosen_group() {
        let spec = AlternativeSpec::exponential(0.1).unwrap();
        let mut rng = SeededRng::new(8, 0);
        let (x, y) = sample_pair(5000, 5000, &spec, &mut rng).unwrap();
        let mean = |s: &Sample| s.observations().iter().sum::<f64>() / s.len() as f64;
        assert!(mean(&y) > 5.0 * mean(&x));
        let spec = spec.with_convention(VariedGroup::Training);
        let (x, y) = sample_pair(5000, 5000, &spec, &mut rng).unwrap();
        assert!(mean(&x) > 5.0 * mean(&y));
    }

    #[test]
    fn v_requires_balanced_design() {
        let design = Design::new(10, 12, 1, 1).unwrap();
        let spec = AlternativeSpec::lehmann(2.0).unwrap();
        let rng = SeededRng::new(1, 0);
        assert!(mc_power(design, 0.05, &spec, StatisticKind::V, 2000, &rng).is_err());
        let design = Design::new(10, 10, 1, 2).unwrap();
        assert!(mc_power(design, 0.05, &spec, StatisticKind::V, 2000, &rng).is_err());
        assert!(mc_power(design, 0.05, &spec, StatisticKind::T, 10, &rng).is_err());
    }

    #[test]
    fn same_seed_same_estimate() {
        let design = Design::new(10, 10, 1, 1).unwrap();
        let spec = AlternativeSpec::lehmann(2.0).unwrap();
        let rng = SeededRng::new(11, 0);
        let a = mc_power(design, 0.05, &spec, StatisticKind::T, 10_000, &rng).unwrap();
        let b = mc_power(design, 0.05, &spec, StatisticKind::T, 10_000, &rng).unwrap();
        assert_eq!(a.power.to_bits(), b.power.to_bits());
    }

    #[test]
    fn statistic_names_round_trip() {
        for k in [StatisticKind::T, StatisticKind::V, StatisticKind::Q] {
            assert_eq!(k.to_string().parse::<StatisticKind>().unwrap(), k);
        }
        assert!("W".parse::<StatisticKind>().is_err());
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(table_experiment(&[], 0.05, 1000, 1).is_err());
    }
}
