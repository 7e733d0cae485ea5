//! Exact scalar arithmetic.
//!
//! Every coefficient in the crate is a [`Rational`]: an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator. On top of it
//! this module provides the rising factorial and terminating `3F2` sums at
//! unit argument.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number, always reduced with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("series does not terminate within {upper} terms")]
    NotTerminating { upper: usize },
    #[error("denominator Pochhammer ({param})_{k} vanishes before the series terminates")]
    VanishingDenominator { param: String, k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational {input:?}: expected \"p/q\" or \"p\"")]
pub struct ParseRationalError {
    pub input: String,
}

/// `n/d` as a rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational, ExactError> {
    if b.is_zero() {
        Err(ExactError::DivisionByZero)
    } else {
        Ok(a / b)
    }
}

/// Parses `"p/q"` or `"p"` with optional leading sign on `p`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { input: s.to_string() };
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let is_int = |x: &str, signed: bool| {
        let digits = if signed {
            x.strip_prefix(['-', '+']).unwrap_or(x)
        } else {
            x
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(num, true) || den.is_some_and(|d| !is_int(d, false)) {
        return Err(err());
    }
    let n = BigInt::from_str(num.trim_start_matches('+')).map_err(|_| err())?;
    let d = match den {
        Some(d) => BigInt::from_str(d).map_err(|_| err())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Returns `Some(n)` when `r` is the integer `-n` with `n >= 0`.
pub fn as_nonpositive_integer(r: &Rational) -> Option<usize> {
    if r.is_integer() && !r.is_positive() {
        (-r.to_integer()).to_usize()
    } else {
        None
    }
}

/// Serializes a sequence of rationals as `"p/q"` strings.
pub fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: &Rational, n: usize) -> Rational {
    let mut acc = Rational::one();
    let mut factor = a.clone();
    for _ in 0..n {
        acc *= &factor;
        factor += Rational::one();
    }
    acc
}

/// Terminating `3F2(a, b, c; d, e; 1)`.
///
/// The series must terminate through a numerator parameter equal to `-n`
/// with `n <= upper`; the smallest such `n` is the last index summed.
/// Terms are accumulated with the running ratio
/// `t_{k+1} = t_k (a+k)(b+k)(c+k) / ((d+k)(e+k)(k+1))`.
pub fn hyp3f2_terminating(
    num: &[Rational; 3],
    den: &[Rational; 2],
    upper: usize,
) -> Result<Rational, ExactError> {
    let last = num
        .iter()
        .filter_map(as_nonpositive_integer)
        .filter(|&n| n <= upper)
        .min()
        .ok_or(ExactError::NotTerminating { upper })?;

    let mut term = Rational::one();
    let mut sum = Rational::one();
    for k in 0..last {
        let kq = int(k as i64);
        let mut denom = int(k as i64 + 1);
        for d in den {
            let dk = d + &kq;
            if dk.is_zero() {
                return Err(ExactError::VanishingDenominator {
                    param: format_rational(d),
                    k: k + 1,
                });
            }
            denom *= dk;
        }
        let numer: Rational = num.iter().map(|a| a + &kq).product();
        term = term * numer / denom;
        sum += &term;
    }
    Ok(sum)
}
