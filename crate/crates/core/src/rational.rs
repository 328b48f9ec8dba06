//! Exact rational numbers and their text forms.
//!
//! Literals are either `a/b` fractions or terminating decimals. Decimals are
//! read as scaled integers, so `0.99` is exactly `99/100`; exponent notation
//! is rejected outright.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// `numer / denom` as an exact rational. Panics if `denom == 0`.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalParseError {
    #[error("empty numeric literal")]
    Empty,
    #[error("malformed numeric literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `-12`, `0.99`, `-3/4`. Fractions may not carry decimal points.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    if text.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let malformed = || RationalParseError::Malformed(text.to_string());
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_digits(num).ok_or_else(malformed)?;
        let den = parse_digits(den).ok_or_else(malformed)?;
        if den.is_zero() {
            return Err(RationalParseError::ZeroDenominator(text.to_string()));
        }
        Rational::new(num, den)
    } else if let Some((whole, frac)) = body.split_once('.') {
        let whole = parse_digits(whole).ok_or_else(malformed)?;
        let frac_digits = parse_digits(frac).ok_or_else(malformed)?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        Rational::new(whole * &scale + frac_digits, scale)
    } else {
        Rational::from_integer(parse_digits(body).ok_or_else(malformed)?)
    };
    Ok(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical literal: reduced `a/b`, or a bare integer when `b == 1`.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// A decimal rendering that says whether it is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal {
    pub text: String,
    pub exact: bool,
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            f.write_str(&self.text)
        } else {
            write!(f, "~{}", self.text)
        }
    }
}

const ROUNDED_PLACES: usize = 6;
const MAX_EXACT_PLACES: usize = 40;

/// Dollar rendering with thousands separators, e.g. `$1,001,000` or
/// `-$0.5`. Values without a short terminating expansion are rounded to six
/// places and flagged inexact.
pub fn format_dollars(value: &Rational) -> Decimal {
    let (digits, exact) = decimal_digits(value);
    let (sign, digits) = match digits.strip_prefix('-') {
        Some(rest) => ("-", rest.to_string()),
        None => ("", digits),
    };
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w.to_string(), Some(f.to_string())),
        None => (digits, None),
    };
    let mut grouped = String::new();
    for (i, ch) in whole.chars().enumerate() {
        if i > 0 && (whole.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    let text = match frac {
        Some(f) => format!("{sign}${grouped}.{f}"),
        None => format!("{sign}${grouped}"),
    };
    Decimal { text, exact }
}

/// Plain decimal digits (no grouping), exact when the expansion terminates.
pub fn format_decimal(value: &Rational) -> Decimal {
    let (text, exact) = decimal_digits(value);
    Decimal { text, exact }
}

fn decimal_digits(value: &Rational) -> (String, bool) {
    let places = terminating_places(value.denom());
    let (places, exact) = match places {
        Some(p) if p <= MAX_EXACT_PLACES => (p, true),
        _ => (ROUNDED_PLACES, false),
    };
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = value * Rational::from_integer(scale);
    // round half away from zero for the inexact case
    let rounded = if exact {
        scaled.to_integer()
    } else {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        if scaled.is_negative() {
            (scaled - half).ceil().to_integer()
        } else {
            (scaled + half).floor().to_integer()
        }
    };
    let negative = rounded.is_negative();
    let mut digits = rounded.abs().to_string();
    if places > 0 {
        if digits.len() <= places {
            digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
        }
        let split = digits.len() - places;
        let (whole, frac) = digits.split_at(split);
        let frac = if exact {
            frac.trim_end_matches('0')
        } else {
            frac
        };
        digits = if frac.is_empty() {
            whole.to_string()
        } else {
            format!("{whole}.{frac}")
        };
    }
    if negative {
        digits.insert(0, '-');
    }
    (digits, exact)
}

/// Number of decimal places needed for `1/denom`, if the expansion terminates.
fn terminating_places(denom: &BigInt) -> Option<usize> {
    let mut d = denom.clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut twos = 0usize;
    let mut fives = 0usize;
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    d.is_one().then(|| twos.max(fives))
}
