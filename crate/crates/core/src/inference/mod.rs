//! Critical values, the randomized test and Monte-Carlo power studies.
//!
//! The level-`alpha` test rejects when `T >= c`, where `c` is the smallest
//! threshold whose null upper tail is at most `alpha`. At `T = c - 1` it
//! rejects with probability `phi = (alpha - alpha1) / (alpha2 - alpha1)`,
//! `alpha1 = P[T >= c]`, `alpha2 = P[T >= c - 1]`, so the size is exactly
//! `alpha`.

mod rng;
mod simulation;

pub use rng::SeededRng;
pub use simulation::{
    mc_power, sample_pair, simulate_histogram, table_experiment, AlternativeKind, AlternativeSpec, Baseline,
    ExperimentCell, PowerEstimate, PowerRow, StatisticKind, VariedGroup, BLOCK_SIZE,
};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::design::Design;
use crate::error::{invalid, Result};
use crate::null_dist::{null_distribution, NullDistribution};
use crate::rational;

/// How the null tail is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalMethod {
    Exact,
    /// Simulated null with at least `10^4` replicates.
    MonteCarlo {
        reps: u64,
        seed: u64,
    },
}

/// Minimum replicate count for [`CriticalMethod::MonteCarlo`].
pub const MIN_CALIBRATION_REPS: u64 = 10_000;

/// Exact attained sizes, kept when the tail is known as a rational.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTails {
    pub alpha1: BigRational,
    pub alpha2: BigRational,
}

/// Critical value `c` with attained sizes `alpha1 = P[T >= c]` and
/// `alpha2 = P[T >= c - 1]` (`alpha2 = 1` when `c = 0`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalValue {
    pub c: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(skip)]
    pub exact: Option<ExactTails>,
}

impl CriticalValue {
    /// Rejection probability at `T = c - 1`.
    pub fn phi(&self, alpha: f64) -> f64 {
        if self.alpha2 > self.alpha1 {
            ((alpha - self.alpha1) / (self.alpha2 - self.alpha1)).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    /// Exact `phi` for a rational level, when exact tails are known.
    pub fn exact_phi(&self, alpha: &BigRational) -> Option<BigRational> {
        let tails = self.exact.as_ref()?;
        let width = &tails.alpha2 - &tails.alpha1;
        if width.is_zero() {
            return Some(BigRational::zero());
        }
        Some((alpha - &tails.alpha1) / width)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

/// Critical value for the design at level `alpha`.
pub fn critical_value(design: Design, alpha: f64, method: CriticalMethod) -> Result<CriticalValue> {
    check_alpha(alpha)?;
    match method {
        CriticalMethod::Exact => {
            let dist = null_distribution(design)?;
            Ok(critical_value_from_null(&dist, &rational::from_f64(alpha)))
        }
        CriticalMethod::MonteCarlo { reps, seed } => {
            if reps < MIN_CALIBRATION_REPS {
                return invalid(format!(
                    "Monte-Carlo critical values need at least {MIN_CALIBRATION_REPS} replicates, got {reps}"
                ));
            }
            let rng = SeededRng::new(seed, 0);
            let spec = AlternativeSpec::null();
            let hist = simulate_histogram(design, &spec, StatisticKind::T, reps, &rng)?;
            Ok(critical_value_from_histogram(&hist, alpha))
        }
    }
}

/// Critical value from an exact null distribution and a rational level.
pub fn critical_value_from_null(dist: &NullDistribution, alpha: &BigRational) -> CriticalValue {
    let top = dist.max_t() + 1;
    let c = (0..=top).find(|&c| dist.upper_tail(c) <= *alpha).unwrap_or(top);
    let alpha1 = dist.upper_tail(c);
    let alpha2 = if c == 0 {
        BigRational::one()
    } else {
        dist.upper_tail(c - 1)
    };
    CriticalValue {
        c,
        alpha1: rational::to_f64(&alpha1),
        alpha2: rational::to_f64(&alpha2),
        exact: Some(ExactTails { alpha1, alpha2 }),
    }
}

/// Critical value from simulated counts, `hist[t]` = replicates with value
/// `t`.
pub fn critical_value_from_histogram(hist: &[u64], alpha: f64) -> CriticalValue {
    let reps: u64 = hist.iter().sum();
    let mut tails = vec![0u64; hist.len() + 1];
    for t in (0..hist.len()).rev() {
        tails[t] = tails[t + 1] + hist[t];
    }
    let frac = |t: usize| tails[t] as f64 / reps as f64;
    let c = (0..tails.len()).find(|&c| frac(c) <= alpha).unwrap_or(hist.len());
    CriticalValue {
        c,
        alpha1: frac(c),
        alpha2: if c == 0 { 1.0 } else { frac(c - 1) },
        exact: None,
    }
}

/// Realized outcome of the randomized test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Reject,
    Accept,
    /// `T = c - 1`: rejected with probability `p`; `rejected` records the draw.
    Randomized {
        p: f64,
        rejected: bool,
    },
}

impl Outcome {
    pub fn rejected(&self) -> bool {
        match *self {
            Outcome::Reject => true,
            Outcome::Accept => false,
            Outcome::Randomized { rejected, .. } => rejected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomizedDecision {
    pub c: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub phi: f64,
    pub outcome: Outcome,
    pub t_observed: u64,
}

/// Applies the randomized test to an observed statistic. A uniform draw is
/// consumed only at the boundary `t = c - 1`.
pub fn randomized_decision(
    t_observed: u64,
    c: usize,
    alpha: f64,
    alpha1: f64,
    alpha2: f64,
    rng: &mut SeededRng,
) -> RandomizedDecision {
    let boundary_phi = if alpha2 > alpha1 {
        ((alpha - alpha1) / (alpha2 - alpha1)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let t = t_observed as usize;
    let (phi, outcome) = if t >= c {
        (1.0, Outcome::Reject)
    } else if t + 1 == c {
        let rejected = rng.uniform() < boundary_phi;
        (
            boundary_phi,
            Outcome::Randomized {
                p: boundary_phi,
                rejected,
            },
        )
    } else {
        (0.0, Outcome::Accept)
    };
    RandomizedDecision {
        c,
        alpha1,
        alpha2,
        phi,
        outcome,
        t_observed,
    }
}
