//! Distribution of `T` under the Lehmann alternative `G = F^gamma`.
//!
//! With `F` uniform, the probability of a frequency vector is an integral
//! over the `r` lowest and `s` highest Y order statistics. Expanding
//! `(v^gamma - u^gamma)^(n-r-s)` binomially and integrating cell by cell
//! gives, with `S_k = f_p1 + … + f_pk`, `M = m - N` leftover X values and
//! `L = n - r - s`,
//!
//! ```text
//! P[f | H1] = K gamma^(r+s)
//!             · prod_{k=1}^{r-1} B(S_k + k gamma, f_p(k+1) + 1)
//!             · prod_{j=1}^{s}   B(m - (f_ej + … + f_es) + gamma (n-s+j), f_ej + 1)
//!             · sum_{l=0}^{L} (-1)^l C(L, l) B(S_r + r gamma + gamma l, M + 1)
//! K = m! n! / (prod f_p! · M! · prod f_e! · L!)
//! ```
//!
//! Only the last factor alternates, and it depends on the vector through
//! `(S_r, M)` alone. The two Beta chains factor over the precedence and the
//! exceedance cells, so [`alternative_distribution`] runs one dynamic
//! program per side instead of enumerating every vector.
//!
//! All Beta factors are evaluated in log space. The alternating sum is
//! accumulated with Neumaier compensation; when its condition estimate
//! (`sum |terms| / |sum|`) passes [`CONDITION_LIMIT`] the sum is recomputed
//! in exact rational arithmetic from the exact binary value of `gamma` (or
//! the fraction it was parsed from).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combinatorics::{binomial, log_beta, LogReal};
use crate::design::Design;
use crate::error::{invalid, Error, Result};
use crate::inference::{critical_value, CriticalMethod};
use crate::rational;
use crate::statistics::FrequencyVector;
use crate::summation::NeumaierSum;

/// Condition estimate above which the floating-point alternating sum is
/// not trusted. Each term carries a relative error near `1e-14`, so a sum
/// accepted here is accurate to roughly `1e-8`.
pub const CONDITION_LIMIT: f64 = 1e6;

/// Default cap on elementary term evaluations for one distribution.
pub const DEFAULT_BUDGET: f64 = 1e8;

/// The Lehmann exponent `gamma > 0`; `gamma = 1` is the null hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct LehmannParams {
    gamma: f64,
    exact: BigRational,
}

impl LehmannParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return invalid(format!("gamma must be positive and finite, got {gamma}"));
        }
        Ok(LehmannParams {
            gamma,
            exact: rational::from_f64(gamma),
        })
    }

    /// From an exact rational such as `1/5`.
    pub fn from_ratio(exact: BigRational) -> Result<Self> {
        if exact <= BigRational::zero() {
            return invalid(format!("gamma must be positive, got {exact}"));
        }
        Ok(LehmannParams {
            gamma: rational::to_f64(&exact),
            exact,
        })
    }

    /// Parses `"2"`, `"0.5"` or `"1/5"`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_ratio(rational::parse_ratio(text)?)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }
}

/// What to do when an alternating sum is ill-conditioned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CancellationPolicy {
    /// Recompute the sum exactly.
    #[default]
    ExactFallback,
    /// Report [`Error::Cancellation`].
    Fail,
}

/// Value of one alternating sum together with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternatingSum {
    /// Natural log of the (positive) sum.
    pub ln_value: f64,
    pub condition: f64,
    pub exact: bool,
}

/// Table of `ln k!` for `k = 0..=limit`.
struct LnFactorials(Vec<f64>);

impl LnFactorials {
    fn new(limit: usize) -> Self {
        let mut table = Vec::with_capacity(limit + 1);
        let mut acc = 0.0f64;
        table.push(0.0);
        for k in 1..=limit {
            acc += (k as f64).ln();
            table.push(acc);
        }
        LnFactorials(table)
    }

    fn get(&self, k: u64) -> f64 {
        self.0[k as usize]
    }

    fn ln_binomial(&self, n: u64, k: u64) -> f64 {
        self.get(n) - self.get(k) - self.get(n - k)
    }
}

/// `sum_{l=0}^{len} (-1)^l C(len, l) B(first + gamma l, tail + 1)`.
///
/// The sum equals `int_0^1 u^(first-1) (1-u)^tail (1-u^gamma)^len du`, so it
/// is always positive.
pub fn alternating_beta_sum(
    first: &BigRational,
    params: &LehmannParams,
    tail: u64,
    len: u64,
    policy: CancellationPolicy,
) -> Result<AlternatingSum> {
    let ln_fact = LnFactorials::new(len as usize);
    alternating_beta_sum_with(first, params, tail, len, policy, &ln_fact)
}

fn alternating_beta_sum_with(
    first: &BigRational,
    params: &LehmannParams,
    tail: u64,
    len: u64,
    policy: CancellationPolicy,
    ln_fact: &LnFactorials,
) -> Result<AlternatingSum> {
    let gamma = params.gamma;
    let start = rational::to_f64(first);
    let mut logs = Vec::with_capacity(len as usize + 1);
    for l in 0..=len {
        logs.push(ln_fact.ln_binomial(len, l) + log_beta(start + gamma * l as f64, tail as f64 + 1.0)?);
    }
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut signed = NeumaierSum::default();
    let mut magnitude = 0.0f64;
    for (l, &lg) in logs.iter().enumerate() {
        let v = (lg - peak).exp();
        magnitude += v;
        signed.add(if l % 2 == 0 { v } else { -v });
    }
    let sum = signed.value();
    let condition = if sum > 0.0 { magnitude / sum } else { f64::INFINITY };
    if condition <= CONDITION_LIMIT {
        return Ok(AlternatingSum {
            ln_value: sum.ln() + peak,
            condition,
            exact: false,
        });
    }
    match policy {
        CancellationPolicy::Fail => Err(Error::Cancellation {
            condition,
            limit: CONDITION_LIMIT,
        }),
        CancellationPolicy::ExactFallback => {
            let exact = exact_alternating_beta_sum(first, params.exact(), tail, len);
            Ok(AlternatingSum {
                ln_value: rational::ln(&exact),
                condition,
                exact: true,
            })
        }
    }
}

/// Exact value of the alternating sum, using
/// `B(x, tail + 1) = tail! / prod_{c=0}^{tail} (x + c)`.
pub fn exact_alternating_beta_sum(first: &BigRational, gamma: &BigRational, tail: u64, len: u64) -> BigRational {
    let tail_fact = BigRational::from_integer(crate::combinatorics::factorial(tail).into());
    let mut acc = BigRational::zero();
    for l in 0..=len {
        let x = first + gamma * BigRational::from_integer(BigInt::from(l));
        let mut den = BigRational::one();
        for c in 0..=tail {
            den *= &x + BigRational::from_integer(BigInt::from(c));
        }
        let term = BigRational::from_integer(binomial(len, l as i64).into()) * &tail_fact / den;
        if l % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn small_rational(value: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// `P[f | H1]` for one frequency vector, falling back to exact arithmetic
/// when the alternating sum is ill-conditioned.
pub fn joint_frequency_pmf_lehmann(fv: &FrequencyVector, params: &LehmannParams) -> Result<f64> {
    joint_frequency_pmf_lehmann_with(fv, params, CancellationPolicy::ExactFallback).map(|(p, _)| p)
}

/// As [`joint_frequency_pmf_lehmann`], with an explicit policy; also
/// returns the alternating-sum diagnostics.
pub fn joint_frequency_pmf_lehmann_with(
    fv: &FrequencyVector,
    params: &LehmannParams,
    policy: CancellationPolicy,
) -> Result<(f64, AlternatingSum)> {
    let design = Design::new(fv.m, fv.n, fv.r(), fv.s())?;
    let Design { m, n, r, s } = design;
    let total = fv.total();
    if total > m as u64 {
        return invalid("frequency vector exceeds m");
    }
    let gamma = params.gamma;
    let leftover = m as u64 - total;
    let middle = design.middle() as u64;
    let ln_fact = LnFactorials::new(m.max(n));

    let mut ln_value = ln_fact.get(m as u64) + ln_fact.get(n as u64) - ln_fact.get(leftover) - ln_fact.get(middle)
        + (r + s) as f64 * gamma.ln();
    for &f in fv.precedence.iter().chain(&fv.exceedance) {
        ln_value -= ln_fact.get(f);
    }

    let mut prefix = 0u64;
    for (k, pair) in fv.precedence.windows(2).enumerate() {
        prefix += pair[0];
        ln_value += log_beta(prefix as f64 + (k + 1) as f64 * gamma, pair[1] as f64 + 1.0)?;
    }
    let mut suffix = 0u64;
    for (idx, &f) in fv.exceedance.iter().enumerate().rev() {
        suffix += f;
        let j = idx + 1;
        let a = (m as u64 - suffix) as f64 + gamma * (n - s + j) as f64;
        ln_value += log_beta(a, f as f64 + 1.0)?;
    }

    let prec_total = fv.precedence_total();
    let first = small_rational(prec_total) + small_rational(r as u64) * params.exact();
    let sum = alternating_beta_sum_with(&first, params, leftover, middle, policy, &ln_fact)?;
    let value = (ln_value + sum.ln_value).exp();
    Ok((value.clamp(0.0, 1.0), sum))
}

/// Visits every `(r + s)`-vector of non-negative counts with total at most
/// `m`, in lexicographic order.
pub fn for_each_frequency_vector(design: Design, mut visit: impl FnMut(&FrequencyVector)) {
    let Design { m, n, r, s } = design;
    let width = r + s;
    let mut cells = vec![0u64; width];
    let mut fv = FrequencyVector {
        m,
        n,
        precedence: vec![0; r],
        exceedance: vec![0; s],
    };
    let limit = m as u64;
    loop {
        fv.precedence.copy_from_slice(&cells[..r]);
        fv.exceedance.copy_from_slice(&cells[r..]);
        visit(&fv);
        // rightmost cell that can grow once everything after it is cleared
        let mut prefix = 0u64;
        let mut grow = None;
        for (pos, &c) in cells.iter().enumerate() {
            prefix += c;
            if prefix < limit {
                grow = Some(pos);
            }
        }
        let Some(pos) = grow else {
            return;
        };
        cells[pos] += 1;
        cells[pos + 1..].fill(0);
    }
}

/// Distribution of `T` under `G = F^gamma`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternativeDistribution {
    pub design: Design,
    pub gamma: f64,
    pub pmf: Vec<f64>,
    /// Largest condition estimate met among the alternating sums.
    pub condition_estimate: f64,
    /// Alternating sums that were recomputed exactly.
    pub exact_fallbacks: usize,
}

impl AlternativeDistribution {
    pub fn pmf(&self, t: usize) -> f64 {
        self.pmf.get(t).copied().unwrap_or(0.0)
    }

    pub fn cdf(&self, t: usize) -> f64 {
        let mut acc = NeumaierSum::default();
        for &p in self.pmf.iter().take(t + 1) {
            acc.add(p);
        }
        acc.value().min(1.0)
    }

    /// `P[T >= t | H1]`.
    pub fn upper_tail(&self, t: usize) -> f64 {
        let mut acc = NeumaierSum::default();
        for &p in self.pmf.iter().skip(t) {
            acc.add(p);
        }
        acc.value().clamp(0.0, 1.0)
    }

    pub fn total_mass(&self) -> f64 {
        let mut acc = NeumaierSum::default();
        for &p in &self.pmf {
            acc.add(p);
        }
        acc.value()
    }
}

/// Work estimate for the grouped algorithm.
pub fn grouped_work(design: Design) -> f64 {
    let width = (design.m + 1) as f64;
    (design.r + design.s) as f64 * width.powi(3) + width.powi(4) + (design.middle() + 1) as f64 * width * width
}

/// Number of frequency vectors an enumeration would visit, bounded as
/// `C(m + r, r) · C(m + s, s)`.
pub fn enumeration_work(design: Design) -> f64 {
    let Design { m, r, s, .. } = design;
    rational::to_f64(&BigRational::from_integer(
        (binomial((m + r) as u64, r as i64) * binomial((m + s) as u64, s as i64)).into(),
    ))
}

pub fn alternative_distribution(design: Design, params: &LehmannParams) -> Result<AlternativeDistribution> {
    alternative_distribution_with_budget(design, params, DEFAULT_BUDGET)
}

/// Log-weights `table[total][max]` of one side's Beta chain, summed over all
/// cell vectors with that total and maximum.
type SideTable = Vec<Vec<LogReal>>;

fn precedence_side(design: Design, gamma: f64, ln_fact: &LnFactorials) -> Result<SideTable> {
    let m = design.m;
    let mut table = vec![vec![LogReal::ZERO; m + 1]; m + 1];
    for (f, row) in table.iter_mut().enumerate() {
        row[f] = LogReal::from_log(-ln_fact.get(f as u64), 1);
    }
    for k in 1..design.r {
        let mut next = vec![vec![LogReal::ZERO; m + 1]; m + 1];
        for total in 0..=m {
            for max in 0..=total {
                let w = table[total][max];
                if w.is_zero() {
                    continue;
                }
                for f in 0..=(m - total) {
                    let factor = log_beta(total as f64 + k as f64 * gamma, f as f64 + 1.0)? - ln_fact.get(f as u64);
                    let slot = &mut next[total + f][max.max(f)];
                    *slot = slot.add_positive(w.times(LogReal::from_log(factor, 1)));
                }
            }
        }
        table = next;
    }
    Ok(table)
}

fn exceedance_side(design: Design, gamma: f64, ln_fact: &LnFactorials) -> Result<SideTable> {
    let Design { m, n, s, .. } = design;
    let coef = |suffix: usize, j: usize| (m - suffix) as f64 + gamma * (n - s + j) as f64;
    let mut table = vec![vec![LogReal::ZERO; m + 1]; m + 1];
    for (f, row) in table.iter_mut().enumerate() {
        let factor = log_beta(coef(f, s), f as f64 + 1.0)? - ln_fact.get(f as u64);
        row[f] = LogReal::from_log(factor, 1);
    }
    for j in (1..s).rev() {
        let mut next = vec![vec![LogReal::ZERO; m + 1]; m + 1];
        for total in 0..=m {
            for max in 0..=total {
                let w = table[total][max];
                if w.is_zero() {
                    continue;
                }
                for f in 0..=(m - total) {
                    let factor = log_beta(coef(total + f, j), f as f64 + 1.0)? - ln_fact.get(f as u64);
                    let slot = &mut next[total + f][max.max(f)];
                    *slot = slot.add_positive(w.times(LogReal::from_log(factor, 1)));
                }
            }
        }
        table = next;
    }
    Ok(table)
}

/// Distribution of `T` under the alternative, refusing designs whose
/// estimated work exceeds `budget` term evaluations.
pub fn alternative_distribution_with_budget(
    design: Design,
    params: &LehmannParams,
    budget: f64,
) -> Result<AlternativeDistribution> {
    let work = grouped_work(design);
    if work > budget {
        return Err(Error::Budget {
            what: "Lehmann distribution terms",
            required: work,
            budget,
        });
    }
    let Design { m, n, r, s } = design;
    let gamma = params.gamma;
    let middle = design.middle() as u64;
    let ln_fact = LnFactorials::new(m.max(n));
    let precedence = precedence_side(design, gamma, &ln_fact)?;
    let exceedance = exceedance_side(design, gamma, &ln_fact)?;
    let base = ln_fact.get(m as u64) + ln_fact.get(n as u64) - ln_fact.get(middle) + (r + s) as f64 * gamma.ln();

    let mut condition_estimate = 0.0f64;
    let mut exact_fallbacks = 0usize;
    let mut pmf = vec![NeumaierSum::default(); m + 1];
    for (prec_total, prec_row) in precedence.iter().enumerate() {
        let first = small_rational(prec_total as u64) + small_rational(r as u64) * params.exact();
        for (exc_total, exc_row) in exceedance.iter().enumerate().take(m - prec_total + 1) {
            let leftover = (m - prec_total - exc_total) as u64;
            let sum = alternating_beta_sum_with(
                &first,
                params,
                leftover,
                middle,
                CancellationPolicy::ExactFallback,
                &ln_fact,
            )?;
            condition_estimate = condition_estimate.max(sum.condition);
            exact_fallbacks += sum.exact as usize;
            let shared = base - ln_fact.get(leftover) + sum.ln_value;
            for (i, wp) in prec_row.iter().enumerate() {
                if wp.is_zero() {
                    continue;
                }
                for (j, we) in exc_row.iter().enumerate() {
                    if we.is_zero() {
                        continue;
                    }
                    pmf[i + j].add((shared + wp.log_magnitude + we.log_magnitude).exp());
                }
            }
        }
    }
    let pmf: Vec<f64> = pmf.iter().map(NeumaierSum::value).collect();
    check_distribution(&pmf)?;
    Ok(AlternativeDistribution {
        design,
        gamma,
        pmf: pmf.into_iter().map(|p| p.clamp(0.0, 1.0)).collect(),
        condition_estimate,
        exact_fallbacks,
    })
}

/// Same distribution by visiting every frequency vector and evaluating
/// [`joint_frequency_pmf_lehmann`] on each. Guarded by [`enumeration_work`].
pub fn enumerated_alternative_distribution(
    design: Design,
    params: &LehmannParams,
    budget: f64,
) -> Result<AlternativeDistribution> {
    let work = enumeration_work(design);
    if work > budget {
        return Err(Error::Budget {
            what: "frequency vectors",
            required: work,
            budget,
        });
    }
    let mut pmf = vec![NeumaierSum::default(); design.m + 1];
    let mut condition_estimate = 0.0f64;
    let mut exact_fallbacks = 0usize;
    let mut failure = None;
    for_each_frequency_vector(design, |fv| {
        if failure.is_some() {
            return;
        }
        match joint_frequency_pmf_lehmann_with(fv, params, CancellationPolicy::ExactFallback) {
            Ok((p, sum)) => {
                condition_estimate = condition_estimate.max(sum.condition);
                exact_fallbacks += sum.exact as usize;
                pmf[fv.t() as usize].add(p);
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let pmf: Vec<f64> = pmf.iter().map(NeumaierSum::value).collect();
    check_distribution(&pmf)?;
    Ok(AlternativeDistribution {
        design,
        gamma: params.gamma,
        pmf,
        condition_estimate,
        exact_fallbacks,
    })
}

fn check_distribution(pmf: &[f64]) -> Result<()> {
    const TOL: f64 = 1e-9;
    if let Some(bad) = pmf.iter().find(|p| !(**p >= -TOL && **p <= 1.0 + TOL)) {
        return Err(Error::Domain(format!("pmf entry {bad} outside [0, 1]")));
    }
    let mut acc = NeumaierSum::default();
    pmf.iter().for_each(|&p| acc.add(p));
    let total = acc.value();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Domain(format!("pmf sums to {total}, not 1")));
    }
    Ok(())
}

/// Exact power of the randomized level-`alpha` test against `G = F^gamma`.
pub fn exact_power(design: Design, params: &LehmannParams, alpha: f64) -> Result<f64> {
    exact_power_with_budget(design, params, alpha, DEFAULT_BUDGET)
}

/// [`exact_power`] with an explicit work budget (see [`grouped_work`]).
pub fn exact_power_with_budget(design: Design, params: &LehmannParams, alpha: f64, budget: f64) -> Result<f64> {
    let critical = critical_value(design, alpha, CriticalMethod::Exact)?;
    let dist = alternative_distribution_with_budget(design, params, budget)?;
    Ok(power_from_distribution(&dist, critical.c, critical.phi(alpha)))
}

pub(crate) fn power_from_distribution(dist: &AlternativeDistribution, c: usize, phi: f64) -> f64 {
    let boundary = if c == 0 { 0.0 } else { dist.pmf(c - 1) };
    (dist.upper_tail(c) + phi * boundary).clamp(0.0, 1.0)
}
