//! Exact rationals.
//!
//! [`Rat`] is the only number type used for probability bounds, constraint
//! coefficients and measures. It is always kept in lowest terms with a
//! positive denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

pub type Rat = num_rational::BigRational;

/// Builds `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Number of binary digits of `|n|`; the integer 0 takes one bit.
pub fn bit_length(n: &BigInt) -> u64 {
    if n.is_zero() {
        1
    } else {
        n.bits()
    }
}

/// Size of a rational in bits: digits of the numerator plus digits of the
/// denominator, both taken in lowest terms.
pub fn rat_size(r: &Rat) -> u64 {
    bit_length(r.numer()) + bit_length(r.denom())
}

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn ceil_log2(n: u64) -> u64 {
    assert!(n >= 1, "ceil_log2 of 0");
    if n == 1 {
        0
    } else {
        u64::from(64 - (n - 1).leading_zeros())
    }
}

pub fn in_unit_interval(r: &Rat) -> bool {
    !r.is_negative() && *r <= Rat::one()
}

/// Formats as `num/den`, always including the denominator.
pub fn to_fraction_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Formats as `num` for integers and `num/den` otherwise.
pub fn to_compact_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        to_fraction_string(r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatParseError {
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `INT`, `INT/INT` or `INT.DIGITS` (optionally signed). Decimals are
/// converted exactly, so `0.6` becomes `3/5`.
pub fn parse_rat(text: &str) -> Result<Rat, RatParseError> {
    let malformed = || RatParseError::Malformed(text.to_string());
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_int(n).ok_or_else(malformed)?;
        let d = parse_int(d).ok_or_else(malformed)?;
        if d.is_zero() {
            return Err(RatParseError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let negative = whole.starts_with('-');
        let whole = parse_int(whole).ok_or_else(malformed)?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = BigInt::from_str(frac).map_err(|_| malformed())?;
        let magnitude = whole.abs() * &scale + frac;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rat::new(numer, scale));
    }
    parse_int(t).map(Rat::from_integer).ok_or_else(malformed)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// Least common multiple of the denominators of `values` (1 for none).
pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}
