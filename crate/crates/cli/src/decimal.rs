//! Exact rationals from decimal input.

use driftgreen::Rational;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// The rational with the shortest decimal expansion that round-trips `v`,
/// so `0.1` becomes `1/10` rather than its binary approximation.
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    if !v.is_finite() {
        return None;
    }
    parse_decimal(&format!("{v:e}"))
}

/// Parses `[±]digits[.digits][e[±]digits]`.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp.checked_sub(i32::try_from(frac.len()).ok()?)?;
    let power = Rational::from_integer(num_traits::pow(
        BigInt::from(10),
        shift.unsigned_abs() as usize,
    ));
    let magnitude = if shift >= 0 {
        Rational::from_integer(digits) * power
    } else {
        Rational::from_integer(digits) / power
    };
    Some(if negative { -magnitude } else { magnitude })
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
