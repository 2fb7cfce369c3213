//! Exact null distribution of `T = P_r + E_s`.
//!
//! Under `F = G` every placement of the `m` X values among the `n` Y values
//! is equally likely. A frequency vector that puts `N` values into the
//! `r + s` outer cells leaves `m - N` values for the `n - r - s` middle
//! gaps, so
//!
//! ```text
//! P[f | H0] = C(m - N + n - r - s, n - r - s) / C(m + n, n)
//! ```
//!
//! Grouping vectors by `(P_r, E_s)` replaces enumeration with counts of
//! compositions whose largest part is fixed (see
//! [`exact_max_composition_count`]). All probabilities here are exact
//! rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::combinatorics::{binomial, bounded_composition_count, exact_max_composition_count, CompositionTable, Count};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::rational;
use crate::statistics::FrequencyVector;

/// Exact pmf and cdf of `T` on the support `0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    design: Design,
    pmf: Vec<BigRational>,
    cdf: Vec<BigRational>,
}

impl NullDistribution {
    fn from_pmf(design: Design, pmf: Vec<BigRational>) -> Self {
        let mut acc = BigRational::zero();
        let cdf = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc.clone()
            })
            .collect();
        NullDistribution { design, pmf, cdf }
    }

    /// Builds a distribution from integer weights over a common denominator.
    fn from_counts(design: Design, counts: Vec<Count>, denominator: &Count) -> Self {
        let den = BigInt::from(denominator.clone());
        let pmf = counts
            .into_iter()
            .map(|c| BigRational::new(BigInt::from(c), den.clone()))
            .collect();
        Self::from_pmf(design, pmf)
    }

    pub fn design(&self) -> Design {
        self.design
    }

    /// Largest support point, `m`.
    pub fn max_t(&self) -> usize {
        self.pmf.len() - 1
    }

    /// `P[T = t]`; zero outside the support.
    pub fn pmf(&self, t: usize) -> BigRational {
        self.pmf.get(t).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `P[T <= t]`.
    pub fn cdf(&self, t: usize) -> BigRational {
        match self.cdf.get(t) {
            Some(v) => v.clone(),
            None => BigRational::one(),
        }
    }

    /// `P[T >= t]`.
    pub fn upper_tail(&self, t: usize) -> BigRational {
        if t == 0 {
            BigRational::one()
        } else {
            BigRational::one() - self.cdf(t - 1)
        }
    }

    pub fn pmf_values(&self) -> &[BigRational] {
        &self.pmf
    }

    pub fn cdf_values(&self) -> &[BigRational] {
        &self.cdf
    }

    pub fn pmf_f64(&self) -> Vec<f64> {
        self.pmf.iter().map(rational::to_f64).collect()
    }

    pub fn cdf_f64(&self) -> Vec<f64> {
        self.cdf.iter().map(rational::to_f64).collect()
    }
}

fn total_placements(design: &Design) -> Count {
    binomial((design.m + design.n) as u64, design.n as i64)
}

/// Number of placements of the leftover `m - total` X values among the
/// middle gaps.
fn middle_placements(design: &Design, total: u64) -> Count {
    let middle = design.middle() as u64;
    binomial(design.m as u64 - total + middle, middle as i64)
}

/// `P[f | H0]` for one frequency vector.
pub fn joint_frequency_pmf_null(fv: &FrequencyVector) -> Result<BigRational> {
    let design = Design::new(fv.m, fv.n, fv.r(), fv.s())?;
    let total = fv.total();
    if total > fv.m as u64 {
        return Ok(BigRational::zero());
    }
    Ok(BigRational::new(
        middle_placements(&design, total).into(),
        total_placements(&design).into(),
    ))
}

/// `P[P_r = i, E_s = j | H0]`.
pub fn joint_pe_pmf(design: Design, i: u64, j: u64) -> Result<BigRational> {
    let Design { m, r, s, .. } = design;
    let (m, r, s) = (m as u64, r as u64, s as u64);
    let mut numer = Count::zero();
    for total in 0..=m.min(r * i + s * j) {
        let weight = middle_placements(&design, total);
        for prec in 0..=total.min(r * i) {
            let exc = total - prec;
            if exc > s * j {
                continue;
            }
            let ways = exact_max_composition_count(prec, r, i) * exact_max_composition_count(exc, s, j);
            if !ways.is_zero() {
                numer += ways * &weight;
            }
        }
    }
    Ok(BigRational::new(numer.into(), total_placements(&design).into()))
}

/// Exact null distribution of `T` for the given design.
pub fn null_distribution(design: Design) -> Result<NullDistribution> {
    let Design { m, r, s, .. } = design;
    let limit = m as u64;
    let precedence = CompositionTable::new(r as u64, limit);
    let exceedance = CompositionTable::new(s as u64, limit);
    let weights: Vec<Count> = (0..=limit).map(|k| middle_placements(&design, k)).collect();

    // numerators over the common denominator C(m+n, n)
    let counts: Vec<Count> = (0..=limit)
        .into_par_iter()
        .map(|t| {
            let mut acc = Count::zero();
            for i in 0..=t {
                let j = t - i;
                for prec in precedence.support(i) {
                    let wp = precedence.get(prec, i);
                    if wp.is_zero() {
                        continue;
                    }
                    let room = limit - prec;
                    for exc in exceedance.support(j) {
                        if exc > room {
                            break;
                        }
                        let we = exceedance.get(exc, j);
                        if !we.is_zero() {
                            acc += wp * we * &weights[(prec + exc) as usize];
                        }
                    }
                }
            }
            acc
        })
        .collect();
    Ok(NullDistribution::from_counts(
        design,
        counts,
        &total_placements(&design),
    ))
}

/// Designs whose placement count exceeds this are refused by
/// [`brute_force_null_distribution`].
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Null distribution by walking every placement of the X values among the
/// Y values. Exponential in `m + n`; meant as an independent check.
pub fn brute_force_null_distribution(design: Design) -> Result<NullDistribution> {
    let placements = total_placements(&design);
    if placements > Count::from(BRUTE_FORCE_LIMIT) {
        return Err(Error::Budget {
            what: "brute-force placements",
            required: rational::to_f64(&BigRational::from_integer(placements.into())),
            budget: BRUTE_FORCE_LIMIT as f64,
        });
    }
    let Design { m, n, r, s } = design;
    // gaps[k] = number of X values between Y(k) and Y(k+1), k = 0..=n
    let mut gaps = vec![0u64; n + 1];
    gaps[n] = m as u64;
    let mut tally = vec![0u64; m + 1];
    loop {
        let p = gaps[..r].iter().max().copied().unwrap_or(0);
        let e = gaps[n + 1 - s..].iter().max().copied().unwrap_or(0);
        tally[(p + e) as usize] += 1;
        if !next_composition(&mut gaps) {
            break;
        }
    }
    let counts = tally.into_iter().map(Count::from).collect();
    Ok(NullDistribution::from_counts(design, counts, &placements))
}

/// Steps to the next weak composition in reverse-lexicographic order of the
/// tail; returns `false` after the last one (everything in the first slot).
fn next_composition(parts: &mut [u64]) -> bool {
    let last = parts.len() - 1;
    // find the rightmost non-zero part other than the first slot
    let Some(pos) = (1..=last).rev().find(|&k| parts[k] > 0) else {
        return false;
    };
    let moved = parts[pos];
    parts[pos] = 0;
    parts[pos - 1] += 1;
    parts[last] += moved - 1;
    true
}

/// Smallest truncation point for [`asymptotic_null_cdf`] whose neglected
/// limiting mass (totals above it) is below `1e-12`.
pub fn default_asymptotic_n_max(r: usize, s: usize) -> u64 {
    // limiting law of the outer total: negative binomial, success prob 1/2
    let cells = (r + s) as i32;
    let mut covered = 0.0f64;
    let mut total = 0u64;
    loop {
        let count = crate::rational::to_f64(&BigRational::from_integer(
            binomial(total + cells as u64 - 1, cells as i64 - 1).into(),
        ));
        covered += count * 0.5f64.powi(total as i32 + cells);
        if 1.0 - covered < 1e-12 || total > 10_000 {
            return total;
        }
        total += 1;
    }
}

/// Large-sample approximation of `P[T <= t | H0]` for `m, n -> inf` with
/// `m/n -> 1`: each outer-cell configuration with total `N` gets weight
/// `(1/2)^(N + r + s)`. Totals above `n_max` are dropped.
pub fn asymptotic_null_cdf(r: usize, s: usize, t: u64, n_max: u64) -> f64 {
    let (rb, sb) = (r as u64, s as u64);
    let cells = (r + s) as i32;
    let mut acc = 0.0f64;
    for k in 0..=t {
        for i in 0..=k {
            let j = k - i;
            for total in 0..=n_max.min(rb * i + sb * j) {
                let weight = 0.5f64.powi(total as i32 + cells);
                if weight == 0.0 {
                    break;
                }
                for prec in total.saturating_sub(sb * j)..=total.min(rb * i) {
                    let ways =
                        exact_max_composition_count(prec, rb, i) * exact_max_composition_count(total - prec, sb, j);
                    if !ways.is_zero() {
                        acc += rational::to_f64(&BigRational::from_integer(ways.into())) * weight;
                    }
                }
            }
        }
    }
    acc
}

/// `P[P_r <= i, E_s <= j | H0]`, from bounded (not exact-maximum) counts.
/// A second route to the joint law, used in tests.
pub fn joint_pe_cdf(design: Design, i: u64, j: u64) -> BigRational {
    let Design { m, r, s, .. } = design;
    let mut numer = Count::zero();
    for total in 0..=m as u64 {
        let mut ways = Count::zero();
        for prec in 0..=total {
            ways += bounded_composition_count(prec, r as u64, i as i64)
                * bounded_composition_count(total - prec, s as u64, j as i64);
        }
        numer += ways * middle_placements(&design, total);
    }
    BigRational::new(numer.into(), total_placements(&design).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn design(m: usize, n: usize, r: usize, s: usize) -> Design {
        Design::new(m, n, r, s).unwrap()
    }

    #[test]
    fn frequency_pmf_tiny_case() {
        let fv = FrequencyVector::new(1, 2, vec![1], vec![0]).unwrap();
        assert_eq!(joint_frequency_pmf_null(&fv).unwrap(), q(1, 3));
        let fv = FrequencyVector::new(1, 2, vec![0], vec![0]).unwrap();
        assert_eq!(joint_frequency_pmf_null(&fv).unwrap(), q(1, 3));
    }

    #[test]
    fn frequency_pmf_at_zero_total() {
        let d = design(7, 9, 2, 3);
        let fv = FrequencyVector::new(7, 9, vec![0, 0], vec![0, 0, 0]).unwrap();
        let expected = BigRational::new(binomial(7 + 9 - 5, 4).into(), binomial(16, 9).into());
        assert_eq!(joint_frequency_pmf_null(&fv).unwrap(), expected);
        let _ = d;
    }

    #[test]
    fn joint_pe_tiny_case() {
        let d = design(1, 2, 1, 1);
        assert_eq!(joint_pe_pmf(d, 1, 0).unwrap(), q(1, 3));
        assert_eq!(joint_pe_pmf(d, 0, 0).unwrap(), q(1, 3));
        assert_eq!(joint_pe_pmf(d, 0, 1).unwrap(), q(1, 3));
        assert_eq!(joint_pe_pmf(d, 1, 1).unwrap(), q(0, 1));
    }

    #[test]
    fn joint_pe_sums_to_one() {
        for (m, n, r, s) in [(3, 4, 1, 2), (5, 5, 2, 2), (4, 7, 3, 1)] {
            let d = design(m, n, r, s);
            let mut total = BigRational::zero();
            for i in 0..=m as u64 {
                for j in 0..=m as u64 {
                    total += joint_pe_pmf(d, i, j).unwrap();
                }
            }
            assert_eq!(total, BigRational::one());
        }
    }

    #[test]
    fn joint_pe_agrees_with_bounded_cdf_route() {
        let d = design(6, 7, 2, 3);
        for i in 0..=6u64 {
            for j in 0..=6u64 {
                let mut cum = BigRational::zero();
                for a in 0..=i {
                    for b in 0..=j {
                        cum += joint_pe_pmf(d, a, b).unwrap();
                    }
                }
                assert_eq!(cum, joint_pe_cdf(d, i, j), "i={i} j={j}");
            }
        }
    }

    #[test]
    fn tiny_null_distribution() {
        let dist = null_distribution(design(1, 2, 1, 1)).unwrap();
        assert_eq!(dist.pmf(0), q(1, 3));
        assert_eq!(dist.pmf(1), q(2, 3));
        assert_eq!(dist.cdf(1), BigRational::one());
        assert_eq!(dist.upper_tail(1), q(2, 3));
        assert_eq!(dist, brute_force_null_distribution(design(1, 2, 1, 1)).unwrap());
    }

    #[test]
    fn brute_force_cross_checks() {
        for (m, n, r, s) in [(2, 2, 1, 1), (5, 5, 2, 1), (4, 6, 2, 3)] {
            let d = design(m, n, r, s);
            assert_eq!(null_distribution(d).unwrap(), brute_force_null_distribution(d).unwrap());
        }
    }

    #[test]
    fn brute_force_size_guard() {
        let err = brute_force_null_distribution(design(20, 20, 1, 1)).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn composition_walk_visits_every_placement() {
        let mut parts = vec![0, 0, 0, 4];
        let mut seen = 1;
        while next_composition(&mut parts) {
            assert_eq!(parts.iter().sum::<u64>(), 4);
            seen += 1;
        }
        assert_eq!(seen, 35);
        assert_eq!(parts, vec![4, 0, 0, 0]);
    }

    #[test]
    fn table3_first_cell() {
        let dist = null_distribution(design(10, 10, 1, 1)).unwrap();
        let tail6 = rational::to_f64(&dist.upper_tail(6));
        let tail5 = rational::to_f64(&dist.upper_tail(5));
        assert!((tail6 - 0.03).abs() <= 0.005, "{tail6}");
        assert!((tail5 - 0.07).abs() <= 0.005, "{tail5}");
    }

    #[test]
    fn asymptotic_single_term() {
        assert!((asymptotic_null_cdf(1, 1, 0, 40) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_approaches_one() {
        let n_max = default_asymptotic_n_max(2, 2);
        let v = asymptotic_null_cdf(2, 2, 60, n_max);
        assert!((v - 1.0).abs() < 1e-9, "{v}");
        let mut prev = 0.0;
        for t in 0..20 {
            let v = asymptotic_null_cdf(2, 2, t, n_max);
            assert!(v >= prev);
            prev = v;
        }
    }
}
