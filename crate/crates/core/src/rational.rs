//! Small helpers around `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"3"`, `"-0.35"`, `"1/5"` or `"2.5e-1"` into an exact rational.
pub fn parse_ratio(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse '{text}' as a number"));
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(bad)?;
        let den = parse_decimal(den.trim()).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(num / den);
    }
    parse_decimal(text).ok_or_else(bad)
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(joined.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Exact rational value of a finite double.
pub fn from_f64(value: f64) -> BigRational {
    BigRational::from_float(value).unwrap_or_else(BigRational::zero)
}

/// Nearest-ish double of a rational, robust to huge numerators and
/// denominators.
pub fn to_f64(value: &BigRational) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    let num = value.numer();
    let den = value.denom();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    if nb < 1000 && db < 1000 {
        if let (Some(a), Some(b)) = (num.to_f64(), den.to_f64()) {
            return a / b;
        }
    }
    // scale so the integer quotient carries 64 significant bits
    let shift = 64 - (nb - db);
    let scaled = if shift >= 0 {
        (num.abs() << shift as u64) / den
    } else {
        num.abs() / (den << (-shift) as u64)
    };
    let mag = scaled.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-shift as i32);
    if num.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Natural log of a positive rational.
pub fn ln(value: &BigRational) -> f64 {
    debug_assert!(value.is_positive());
    crate::combinatorics::ln_count(value.numer().magnitude())
        - crate::combinatorics::ln_count(value.denom().magnitude())
}

/// Positional decimal expansion with `significant` significant digits,
/// rounded half away from zero. Zero prints as `0`.
///
/// ```
/// use maxprec::rational::{parse_ratio, to_decimal};
/// assert_eq!(to_decimal(&parse_ratio("1/3").unwrap(), 5), "0.33333");
/// assert_eq!(to_decimal(&parse_ratio("2/3").unwrap(), 3), "0.667");
/// assert_eq!(to_decimal(&parse_ratio("1").unwrap(), 3), "1.00");
/// assert_eq!(to_decimal(&parse_ratio("1/800").unwrap(), 2), "0.0013");
/// ```
pub fn to_decimal(value: &BigRational, significant: usize) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let significant = significant.max(1);
    let ten = BigInt::from(10);
    let numer = value.numer().abs();
    let denom = value.denom().clone();
    // decimals = digits after the point needed for `significant` digits
    let int_part = &numer / &denom;
    let int_len = if int_part.is_zero() {
        0
    } else {
        int_part.to_string().len()
    };
    let decimals = if int_part.is_zero() {
        let mut zeros = 0usize;
        let mut scaled = &numer * &ten;
        while scaled < denom {
            scaled *= &ten;
            zeros += 1;
        }
        zeros + significant
    } else {
        significant.saturating_sub(int_len)
    };
    let scale = num_traits::pow(ten, decimals);
    let twice: BigInt = &numer * &scale * 2 + &denom;
    let mut rounded: BigInt = twice / (&denom * 2);
    let mut decimals = decimals;
    let expected_len = if int_len == 0 { significant } else { int_len + decimals };
    if decimals > 0 && rounded.to_string().len() > expected_len {
        // rounding carried into a new leading digit, e.g. 0.995 -> 1.00
        rounded /= 10;
        decimals -= 1;
    }
    let digits = format!("{:0>width$}", rounded.to_string(), width = decimals + 1);
    let (int_digits, frac_digits) = digits.split_at(digits.len() - decimals);
    let sign = if value.is_negative() { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{int_digits}")
    } else {
        format!("{sign}{int_digits}.{frac_digits}")
    }
}
