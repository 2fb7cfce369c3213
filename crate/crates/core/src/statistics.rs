//! Precedence and exceedance frequencies and the statistics built on them.
//!
//! The Y sample ("test" group) is sorted and split into cells. The first `r`
//! cells are `(Y(i-1), Y(i)]` with `Y(0) = -inf`; the last `s` cells are
//! `[Y(n-s+i), Y(n-s+i+1))` with `Y(n+1) = +inf`. X values ("training"
//! group) landing exactly on a boundary follow those half-open conventions.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rational::parse_ratio;

/// One group's observations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    label: String,
    observations: Vec<f64>,
}

impl Sample {
    pub fn new(label: impl Into<String>, observations: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if observations.is_empty() {
            return Err(Error::Input(format!("sample '{label}' is empty")));
        }
        if let Some(bad) = observations.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "sample '{label}' contains a non-finite value ({bad})"
            )));
        }
        Ok(Sample { label, observations })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.observations.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Same sample with every value mapped through `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Sample> {
        Sample::new(self.label.clone(), self.observations.iter().map(|&v| f(v)).collect())
    }
}

/// Number of X values that coincide with some Y value.
pub fn cross_sample_ties(x: &Sample, y: &Sample) -> usize {
    let ys = y.sorted();
    x.observations()
        .iter()
        .filter(|v| ys.binary_search_by(|p| p.total_cmp(v)).is_ok())
        .count()
}

/// How many low (`r`) and high (`s`) Y cells enter the statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Orders {
    pub r: usize,
    pub s: usize,
}

impl Orders {
    /// Checks `r, s >= 1` and `r + s <= n`.
    pub fn new(r: usize, s: usize, n: usize) -> Result<Self> {
        if r == 0 || s == 0 {
            return invalid(format!("r and s must be at least 1 (r={r}, s={s})"));
        }
        if r + s > n {
            return invalid(format!("r + s = {} exceeds n = {n}", r + s));
        }
        Ok(Orders { r, s })
    }

    /// `r = floor(rho1·n) + 1`, `s = floor(rho2·n) + 1`, with rates parsed
    /// exactly from decimal or fraction strings such as `"0.35"` or `"1/20"`.
    pub fn from_rates(rho1: &str, rho2: &str, n: usize) -> Result<Self> {
        let r = order_from_rate(rho1, n)?;
        let s = order_from_rate(rho2, n)?;
        Orders::new(r, s, n)
    }
}

/// `floor(rho·n) + 1` for a rate in `[0, 1)`.
pub fn order_from_rate(rho: &str, n: usize) -> Result<usize> {
    let rate = parse_ratio(rho)?;
    if rate < BigRational::zero() || rate >= BigRational::from_integer(1.into()) {
        return invalid(format!("rate {rho} outside [0, 1)"));
    }
    let scaled = (rate * BigRational::from_integer(n.into())).floor();
    Ok(scaled.to_integer().to_usize().unwrap_or(0) + 1)
}

/// Precedence counts `f_p` and exceedance counts `f_e` for one sample pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FrequencyVector {
    pub m: usize,
    pub n: usize,
    pub precedence: Vec<u64>,
    pub exceedance: Vec<u64>,
}

impl FrequencyVector {
    pub fn new(m: usize, n: usize, precedence: Vec<u64>, exceedance: Vec<u64>) -> Result<Self> {
        Orders::new(precedence.len(), exceedance.len(), n)?;
        let fv = FrequencyVector {
            m,
            n,
            precedence,
            exceedance,
        };
        if fv.total() > m as u64 {
            return invalid(format!("frequencies sum to {} but only {m} X values exist", fv.total()));
        }
        Ok(fv)
    }

    pub fn r(&self) -> usize {
        self.precedence.len()
    }

    pub fn s(&self) -> usize {
        self.exceedance.len()
    }

    pub fn orders(&self) -> Orders {
        Orders {
            r: self.r(),
            s: self.s(),
        }
    }

    pub fn precedence_total(&self) -> u64 {
        self.precedence.iter().sum()
    }

    pub fn exceedance_total(&self) -> u64 {
        self.exceedance.iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.precedence_total() + self.exceedance_total()
    }

    /// Maximal precedence `P_r`.
    pub fn max_precedence(&self) -> u64 {
        self.precedence.iter().copied().max().unwrap_or(0)
    }

    /// Maximal exceedance `E_s`.
    pub fn max_exceedance(&self) -> u64 {
        self.exceedance.iter().copied().max().unwrap_or(0)
    }

    /// `T = P_r + E_s`.
    pub fn t(&self) -> u64 {
        self.max_precedence() + self.max_exceedance()
    }
}

/// Computes the frequency vector of `x` against the cells of `y`.
pub fn frequency_vector(x: &Sample, y: &Sample, r: usize, s: usize) -> Result<FrequencyVector> {
    let n = y.len();
    Orders::new(r, s, n)?;
    let ys = y.sorted();
    let mut precedence = vec![0u64; r];
    let mut exceedance = vec![0u64; s];
    count_cells(x.observations(), &ys, &mut precedence, &mut exceedance);
    Ok(FrequencyVector {
        m: x.len(),
        n,
        precedence,
        exceedance,
    })
}

/// Fills the cell counts for `xs` against ascending `ys`. The slices'
/// lengths fix `r` and `s`.
pub(crate) fn count_cells(xs: &[f64], ys: &[f64], precedence: &mut [u64], exceedance: &mut [u64]) {
    let (r, s, n) = (precedence.len(), exceedance.len(), ys.len());
    precedence.fill(0);
    exceedance.fill(0);
    let low_edge = ys[r - 1];
    let high_edge = ys[n - s];
    for &v in xs {
        if v <= low_edge {
            // cell k holds (Y(k-1), Y(k)]: k-1 = #{y < v}
            let below = ys.partition_point(|&y| y < v);
            precedence[below] += 1;
        } else if v >= high_edge {
            // cell i holds [Y(n-s+i), Y(n-s+i+1)): n-s+i = #{y <= v}
            let at_or_below = ys.partition_point(|&y| y <= v);
            exceedance[at_or_below - (n - s) - 1] += 1;
        }
    }
}

/// All statistics for one data pair.
///
/// `a` needs `s <= m`; `v` is defined only for `r = s` and `m = n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StatisticBundle {
    pub p: u64,
    pub e: u64,
    pub t: u64,
    pub q: u64,
    pub a: Option<u64>,
    pub b: u64,
    pub v: Option<u64>,
}

pub fn statistic_bundle(x: &Sample, y: &Sample, r: usize, s: usize) -> Result<StatisticBundle> {
    let fv = frequency_vector(x, y, r, s)?;
    let xs = x.sorted();
    let ys = y.sorted();
    Ok(bundle_from_parts(&fv, &xs, &ys))
}

pub(crate) fn bundle_from_parts(fv: &FrequencyVector, xs: &[f64], ys: &[f64]) -> StatisticBundle {
    let (m, r, s) = (fv.m, fv.r(), fv.s());
    let p = fv.max_precedence();
    let e = fv.max_exceedance();
    let b = fv.precedence_total();
    let a = (s <= m).then(|| exceeding_count(xs, ys, s));
    let v = match a {
        Some(a) if r == s && m == fv.n => Some(a + b),
        _ => None,
    };
    StatisticBundle {
        p,
        e,
        t: p + e,
        q: p,
        a,
        b,
        v,
    }
}

/// `A_s`: number of Y strictly above `X(m-s+1)`, both slices ascending.
pub(crate) fn exceeding_count(xs: &[f64], ys: &[f64], s: usize) -> u64 {
    let pivot = xs[xs.len() - s];
    (ys.len() - ys.partition_point(|&y| y <= pivot)) as u64
}
