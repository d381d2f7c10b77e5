//! Distance values.
//!
//! Every computation in the crate is generic over [`Real`]. Two implementations
//! are provided: [`Exact`] (rationals over `i128`, the default) and [`Float`]
//! (`f64` with a total order). Exact mode makes barcode equality bit-exact;
//! float mode compares feasibility thresholds with a small slack.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use ordered_float::OrderedFloat;
use serde_json::Value;
use thiserror::Error;

/// Exact rational distance.
pub type Exact = Ratio<i128>;

/// Floating point distance with a total order.
pub type Float = OrderedFloat<f64>;

/// Slack used by float mode when a cost is compared against a threshold.
pub const FLOAT_SLACK: f64 = 1e-12;

/// Tolerance used by float mode when a result is compared against a reference value.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseValueError {
    #[error("empty numeric token")]
    Empty,
    #[error("cannot parse `{0}` as a number")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("`{0}` is not finite")]
    NotFinite(String),
}

/// A totally ordered distance value.
pub trait Real: Copy + Ord + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn parse(token: &str) -> Result<Self, ParseValueError>;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn half(self) -> Self;
    fn to_f64(self) -> f64;
    fn to_json(self) -> Value;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn abs_diff(self, other: Self) -> Self {
        if self >= other {
            self.sub(other)
        } else {
            other.sub(self)
        }
    }

    fn is_negative(self) -> bool {
        self < Self::zero()
    }

    /// `self <= bound`, with float slack where applicable.
    fn within(self, bound: Self) -> bool {
        self <= bound
    }

    /// Equality against a reference value: exact, or within [`FLOAT_TOLERANCE`] in float mode.
    fn close(self, other: Self) -> bool {
        self == other
    }

    /// Feasibility slack reported in output metadata (0 in exact mode).
    fn slack() -> f64 {
        0.0
    }

    fn mode_name() -> &'static str;
}

fn parse_decimal(token: &str) -> Result<Exact, ParseValueError> {
    let invalid = || ParseValueError::Invalid(token.to_string());
    let (negative, body) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token.strip_prefix('+').unwrap_or(token)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(invalid());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(invalid());
    }
    if frac_part.len() > 30 {
        return Err(invalid());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| invalid())? };
    let denom = 10i128.checked_pow(frac_part.len() as u32).ok_or_else(invalid)?;
    let value = Ratio::new(numer, denom);
    Ok(if negative { -value } else { value })
}

impl Real for Exact {
    fn zero() -> Self {
        Zero::zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }

    fn parse(token: &str) -> Result<Self, ParseValueError> {
        let token = token.trim();
        if token.is_empty() {
            return Err(ParseValueError::Empty);
        }
        match token.split_once('/') {
            Some((p, q)) => {
                let p = parse_decimal(p.trim())?;
                let q = parse_decimal(q.trim())?;
                if q.is_zero() {
                    return Err(ParseValueError::ZeroDenominator(token.to_string()));
                }
                Ok(p / q)
            }
            None => parse_decimal(token),
        }
    }

    fn add(self, other: Self) -> Self {
        self + other
    }

    fn sub(self, other: Self) -> Self {
        self - other
    }

    fn half(self) -> Self {
        self / Ratio::from_integer(2)
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn to_json(self) -> Value {
        Value::String(self.to_string())
    }

    fn abs_diff(self, other: Self) -> Self {
        (self - other).abs()
    }

    fn mode_name() -> &'static str {
        "exact"
    }
}

impl Real for Float {
    fn zero() -> Self {
        OrderedFloat(0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        OrderedFloat(num as f64 / den as f64)
    }

    fn parse(token: &str) -> Result<Self, ParseValueError> {
        let token = token.trim();
        if token.is_empty() {
            return Err(ParseValueError::Empty);
        }
        let value = match token.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p.trim().parse().map_err(|_| ParseValueError::Invalid(token.into()))?;
                let q: f64 = q.trim().parse().map_err(|_| ParseValueError::Invalid(token.into()))?;
                if q == 0.0 {
                    return Err(ParseValueError::ZeroDenominator(token.to_string()));
                }
                p / q
            }
            None => token.parse().map_err(|_| ParseValueError::Invalid(token.into()))?,
        };
        if !value.is_finite() {
            return Err(ParseValueError::NotFinite(token.to_string()));
        }
        Ok(OrderedFloat(value))
    }

    fn add(self, other: Self) -> Self {
        self + other
    }

    fn sub(self, other: Self) -> Self {
        self - other
    }

    fn half(self) -> Self {
        OrderedFloat(self.0 / 2.0)
    }

    fn to_f64(self) -> f64 {
        self.0
    }

    fn to_json(self) -> Value {
        serde_json::Number::from_f64(self.0).map(Value::Number).unwrap_or(Value::Null)
    }

    fn within(self, bound: Self) -> bool {
        self.0 <= bound.0 + FLOAT_SLACK
    }

    fn close(self, other: Self) -> bool {
        (self.0 - other.0).abs() <= FLOAT_TOLERANCE
    }

    fn slack() -> f64 {
        FLOAT_SLACK
    }

    fn mode_name() -> &'static str {
        "float"
    }
}

/// A value in `[0, ∞]`: either finite or infinite. `Infinite` sorts last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Extended<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(v) => v.to_f64(),
            Extended::Infinite => f64::INFINITY,
        }
    }

    pub fn to_json(self) -> Value {
        match self {
            Extended::Finite(v) => v.to_json(),
            Extended::Infinite => Value::String("inf".into()),
        }
    }

    pub fn parse(token: &str) -> Result<Self, ParseValueError> {
        match token.trim() {
            "inf" | "Inf" | "infinity" | "∞" => Ok(Extended::Infinite),
            other => T::parse(other).map(Extended::Finite),
        }
    }

    pub fn close(self, other: Self) -> bool {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.close(b),
            (a, b) => a == b,
        }
    }

    /// `self <= bound` with the float slack of `T`.
    pub fn within(self, bound: Self) -> bool {
        match (self, bound) {
            (_, Extended::Infinite) => true,
            (Extended::Infinite, Extended::Finite(_)) => false,
            (Extended::Finite(a), Extended::Finite(b)) => a.within(b),
        }
    }
}

impl<T: Real> From<T> for Extended<T> {
    fn from(v: T) -> Self {
        Extended::Finite(v)
    }
}

impl<T: Real> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => f.write_str("∞"),
        }
    }
}

/// Maximum of two extended values.
pub fn ext_max<T: Real>(a: Extended<T>, b: Extended<T>) -> Extended<T> {
    match a.cmp(&b) {
        Ordering::Less => b,
        _ => a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Exact {
        Exact::from_ratio(n, d)
    }

    #[test]
    fn parses_integers_decimals_and_fractions() {
        assert_eq!(Exact::parse("2").unwrap(), q(2, 1));
        assert_eq!(Exact::parse("0.5").unwrap(), q(1, 2));
        assert_eq!(Exact::parse(".25").unwrap(), q(1, 4));
        assert_eq!(Exact::parse("3/6").unwrap(), q(1, 2));
        assert_eq!(Exact::parse("-1.5").unwrap(), q(-3, 2));
        assert!(matches!(Exact::parse("1/0"), Err(ParseValueError::ZeroDenominator(_))));
        assert!(Exact::parse("abc").is_err());
        assert!(Exact::parse("1e3").is_err());
        assert_eq!(Float::parse("1/4").unwrap(), OrderedFloat(0.25));
        assert!(Float::parse("nan").is_err());
    }

    #[test]
    fn extended_orders_infinity_last() {
        let a: Extended<Exact> = Extended::Finite(q(100, 1));
        assert!(a < Extended::Infinite);
        assert_eq!(ext_max(a, Extended::Infinite), Extended::Infinite);
        assert_eq!(Extended::<Exact>::parse("inf").unwrap(), Extended::Infinite);
        assert_eq!(Extended::<Exact>::Infinite.to_json(), Value::String("inf".into()));
    }

    #[test]
    fn exact_json_uses_fraction_strings() {
        assert_eq!(q(1, 2).to_json(), Value::String("1/2".into()));
        assert_eq!(q(2, 1).to_json(), Value::String("2".into()));
    }

    #[test]
    fn float_within_has_slack() {
        let a = OrderedFloat(1.0 + 1e-13);
        assert!(a.within(OrderedFloat(1.0)));
        assert!(!OrderedFloat(1.0 + 1e-9).within(OrderedFloat(1.0)));
        assert!(!q(1000001, 1000000).within(q(1, 1)));
    }
}
