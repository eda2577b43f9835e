//! Scalar abstractions for the numeric parts of the crate.
//!
//! Alignment costs and F-beta arithmetic are written against these traits so
//! the same code runs over `f32`/`f64` or over exact rationals.  The crate
//! roots its concrete choices in the [`crate::Cost`] and [`crate::Score`]
//! aliases.

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num};

/// Scalar usable as an alignment cost: closed under `+`/`*`, totally
/// comparable on the values we produce, and constructible from small
/// integers.
pub trait CostScalar: Num + PartialOrd + FromPrimitive + Copy + std::fmt::Debug {}

impl CostScalar for f32 {}
impl CostScalar for f64 {}
impl CostScalar for Ratio<i32> {}
impl CostScalar for Ratio<i64> {}

/// Floating-point scalar for metric values (precision, recall, F-beta).
pub trait MetricScalar: Float + FromPrimitive + std::fmt::Debug {}

impl MetricScalar for f32 {}
impl MetricScalar for f64 {}

/// Parses a plain decimal literal (`"0.1"`, `"2"`, `"-1.25"`) into an exact
/// scalar value, scaling by a power of ten rather than rounding through an
/// intermediate float.  Returns `None` for anything else (exponents, empty
/// fraction digits, overflow).
pub fn decimal<C: CostScalar>(text: &str) -> Option<C> {
    let text = text.trim();
    let (neg, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mantissa: u64 = format!("{int_part}{frac_part}").parse().ok()?;
    let mut value = C::from_u64(mantissa)?;
    if !frac_part.is_empty() {
        let scale = 10u64.checked_pow(frac_part.len() as u32)?;
        value = value / C::from_u64(scale)?;
    }
    if neg {
        value = C::zero() - value;
    }
    Some(value)
}

/// Converts an `f64` (e.g. a TOML number) into a cost scalar by way of its
/// shortest decimal rendering, so `0.1` becomes the exact rational `1/10`
/// instead of the nearest binary fraction.
pub fn decimal_from_f64<C: CostScalar>(value: f64) -> Option<C> {
    if !value.is_finite() {
        return None;
    }
    let rendered = format!("{value}");
    if rendered.contains(['e', 'E']) {
        return C::from_f64(value);
    }
    decimal(&rendered)
}
