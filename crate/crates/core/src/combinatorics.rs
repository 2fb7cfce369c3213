//! Exact integer combinatorics and the Γ/B special functions.
//!
//! Everything that feeds a null-hypothesis probability is an exact
//! [`Count`]; floating point only enters through [`log_beta`] when the
//! Lehmann exponent is not an integer.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision non-negative integer.
pub type Count = BigUint;

/// `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> Count {
    if k < 0 || k as u64 > n {
        return Count::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = Count::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// Row `n` of Pascal's triangle, `C(n, 0..=n)`.
pub fn binomial_row(n: u64) -> Vec<Count> {
    let mut row = Vec::with_capacity(n as usize + 1);
    row.push(Count::one());
    for k in 0..n {
        let next = row[k as usize].clone() * (n - k) / (k + 1);
        row.push(next);
    }
    row
}

/// `n!` as an exact integer.
pub fn factorial(n: u64) -> Count {
    (2..=n).fold(Count::one(), |acc, k| acc * k)
}

/// Number of ordered `parts`-tuples of non-negative integers that sum to
/// `total` with every part at most `cap`, by inclusion–exclusion.
///
/// A negative cap admits no part at all, so the result is `[total == 0]`
/// only for the empty tuple (`parts == 0`).
pub fn bounded_composition_count(total: u64, parts: u64, cap: i64) -> Count {
    if parts == 0 {
        return if total == 0 { Count::one() } else { Count::zero() };
    }
    if cap < 0 {
        return Count::zero();
    }
    let width = cap as u64 + 1;
    let mut acc = BigInt::zero();
    let mut j = 0u64;
    while j <= parts && j * width <= total {
        let term = BigInt::from(binomial(parts, j as i64))
            * BigInt::from(binomial(total - j * width + parts - 1, parts as i64 - 1));
        if j.is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
        j += 1;
    }
    debug_assert!(!acc.is_negative());
    acc.to_biguint().unwrap_or_default()
}

/// Same count as [`bounded_composition_count`], by dynamic programming over
/// the coefficients of `(1 + x + … + x^cap)^parts`.
pub fn bounded_composition_count_dp(total: u64, parts: u64, cap: i64) -> Count {
    bounded_composition_series(total, parts, cap).pop().unwrap_or_default()
}

/// Coefficients `0..=limit` of `(1 + x + … + x^cap)^parts`.
fn bounded_composition_series(limit: u64, parts: u64, cap: i64) -> Vec<Count> {
    let len = limit as usize + 1;
    let mut poly = vec![Count::zero(); len];
    poly[0] = Count::one();
    if parts == 0 {
        return poly;
    }
    if cap < 0 {
        return vec![Count::zero(); len];
    }
    let width = cap as usize + 1;
    for _ in 0..parts {
        // prefix sums turn the windowed convolution into one subtraction
        let mut prefix = Vec::with_capacity(len + 1);
        prefix.push(Count::zero());
        for c in &poly {
            let next = prefix.last().unwrap() + c;
            prefix.push(next);
        }
        for (k, slot) in poly.iter_mut().enumerate() {
            let lo = k.saturating_sub(width - 1);
            *slot = &prefix[k + 1] - &prefix[lo];
        }
    }
    poly
}

/// Number of ordered `parts`-tuples summing to `total` whose largest part
/// is exactly `max`.
pub fn exact_max_composition_count(total: u64, parts: u64, max: u64) -> Count {
    let upper = bounded_composition_count(total, parts, max as i64);
    let lower = bounded_composition_count(total, parts, max as i64 - 1);
    upper - lower
}

/// Exact-maximum composition counts for every `(max, total)` with both at
/// most `limit`, laid out as `table[max][total]`.
#[derive(Debug, Clone)]
pub struct CompositionTable {
    parts: u64,
    rows: Vec<Vec<Count>>,
}

impl CompositionTable {
    pub fn new(parts: u64, limit: u64) -> Self {
        let mut rows = Vec::with_capacity(limit as usize + 1);
        let mut below = vec![Count::zero(); limit as usize + 1];
        for max in 0..=limit {
            let at_most = bounded_composition_series(limit, parts, max as i64);
            let exact = at_most.iter().zip(&below).map(|(a, b)| a - b).collect::<Vec<_>>();
            rows.push(exact);
            below = at_most;
        }
        CompositionTable { parts, rows }
    }

    pub fn parts(&self) -> u64 {
        self.parts
    }

    pub fn limit(&self) -> u64 {
        self.rows.len() as u64 - 1
    }

    /// Count for `(total, max)`; zero outside the tabulated range.
    pub fn get(&self, total: u64, max: u64) -> &Count {
        static ZERO: std::sync::OnceLock<Count> = std::sync::OnceLock::new();
        self.rows
            .get(max as usize)
            .and_then(|row| row.get(total as usize))
            .unwrap_or_else(|| ZERO.get_or_init(Count::zero))
    }

    /// Range of totals that can carry a non-zero count for `max`.
    pub fn support(&self, max: u64) -> std::ops::RangeInclusive<u64> {
        let hi = (self.parts * max).min(self.limit());
        max.min(hi + 1)..=hi
    }
}

/// A real number stored as `sign · exp(log_magnitude)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogReal {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn from_log(log_magnitude: f64, sign: i8) -> Self {
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogReal {
                log_magnitude,
                sign: sign.signum(),
            }
        }
    }

    pub fn from_f64(value: f64) -> Self {
        if value == 0.0 {
            Self::ZERO
        } else {
            LogReal {
                log_magnitude: value.abs().ln(),
                sign: if value > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_magnitude.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn times(self, other: LogReal) -> LogReal {
        LogReal::from_log(self.log_magnitude + other.log_magnitude, self.sign * other.sign)
    }

    /// Sum of two non-negative values without leaving log space.
    pub fn add_positive(self, other: LogReal) -> LogReal {
        debug_assert!(self.sign >= 0 && other.sign >= 0);
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.log_magnitude >= other.log_magnitude {
            (self.log_magnitude, other.log_magnitude)
        } else {
            (other.log_magnitude, self.log_magnitude)
        };
        LogReal::from_log(hi + (lo - hi).exp().ln_1p(), 1)
    }
}

const LN_PI: f64 = 1.144_729_885_849_400_2;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
/// ln(2·sqrt(e/π))
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

const LANCZOS_R: f64 = 10.900511;
const LANCZOS_DK: [f64; 11] = [
    2.485_740_891_387_536e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077e-9,
];

/// ln Γ(x) for `x > 0` (Lanczos, Pugh's 11-term set).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |s, (k, d)| s + d / (k as f64 - x));
        LN_PI
            - (PI * x).sin().ln()
            - s.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - x) * ((0.5 - x + LANCZOS_R) / std::f64::consts::E).ln()
    } else {
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |s, (k, d)| s + d / (x + k as f64 - 1.0));
        s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).ln()
    }
}

/// Remainder of Stirling's series, `ln Γ(x) − [(x − ½)ln x − x + ln √(2π)]`,
/// for `x ≥ 10`.
fn stirling_correction(x: f64) -> f64 {
    const C: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in C.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b).
///
/// Large arguments go through Stirling's series so the leading terms cancel
/// analytically instead of in floating point.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "log_beta needs positive finite arguments, got ({a}, {b})"
        )));
    }
    let (p, q) = if a <= b { (a, b) } else { (b, a) };
    let total = p + q;
    let value = if p >= 10.0 {
        let corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(total);
        -0.5 * q.ln() + LN_SQRT_2PI + corr + (p - 0.5) * (p / total).ln() + q * (-p / total).ln_1p()
    } else if q >= 10.0 {
        let corr = stirling_correction(q) - stirling_correction(total);
        ln_gamma(p) + corr + p - p * total.ln() + (q - 0.5) * (-p / total).ln_1p()
    } else {
        ln_gamma(p) + ln_gamma(q) - ln_gamma(total)
    };
    Ok(value)
}

/// Natural logarithm of a positive big integer, accurate to f64 precision.
pub fn ln_count(value: &Count) -> f64 {
    if value.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = value.bits();
    if bits <= 1000 {
        return value.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (value >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
