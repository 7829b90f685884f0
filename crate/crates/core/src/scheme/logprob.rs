use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Base-10 logarithm of a probability-like, nonnegative quantity.
///
/// Exact zero is `-inf`. NaN is never stored, which makes the ordering total.
/// Values above zero are legal: several of the error laws are upper bounds
/// that exceed one outside their useful regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    /// Panics on NaN or `+inf`.
    pub fn from_log10(value: f64) -> Self {
        assert!(
            !value.is_nan() && value != f64::INFINITY,
            "log10 value must be finite or -inf, got {value}"
        );
        LogProb(value)
    }

    pub fn try_from_log10(value: f64) -> Option<Self> {
        (!value.is_nan() && value != f64::INFINITY).then_some(LogProb(value))
    }

    /// Panics unless `p` is finite and nonnegative.
    pub fn from_linear(p: f64) -> Self {
        assert!(p >= 0.0 && p.is_finite(), "linear value must be finite and >= 0, got {p}");
        LogProb(p.log10())
    }

    pub fn log10(self) -> f64 {
        self.0
    }

    pub fn ln(self) -> f64 {
        self.0 * std::f64::consts::LN_10
    }

    /// Linear value; underflows to 0 and overflows to `inf` outside the f64 range.
    pub fn to_linear(self) -> f64 {
        10f64.powf(self.0)
    }

    /// Linear value clamped to `[0, 1]` for reporting.
    pub fn to_probability(self) -> f64 {
        self.saturate().to_linear()
    }

    pub fn saturate(self) -> Self {
        LogProb(self.0.min(0.0))
    }

    /// True when the linear value can be represented as a normal f64.
    pub fn is_representable(self) -> bool {
        self.0 > f64::MIN_POSITIVE.log10() && self.0 < f64::MAX.log10()
    }

    /// `self^exponent` for a nonnegative real exponent.
    pub fn powf(self, exponent: f64) -> Self {
        debug_assert!(exponent >= 0.0);
        if exponent == 0.0 {
            return LogProb::ONE;
        }
        LogProb::from_log10(self.0 * exponent)
    }
}

impl Mul for LogProb {
    type Output = LogProb;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: LogProb) -> LogProb {
        LogProb::from_log10(self.0 + rhs.0)
    }
}

impl Eq for LogProb {}

impl PartialOrd for LogProb {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogProb {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1e{}", self.0)
    }
}

// JSON has no infinities: -inf (exact zero) travels as null.
impl Serialize for LogProb {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            serializer.serialize_some(&self.0)
        } else {
            serializer.serialize_none()
        }
    }
}

impl<'de> Deserialize<'de> for LogProb {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Option::<f64>::deserialize(deserializer)?;
        match value {
            None => Ok(LogProb::ZERO),
            Some(v) => LogProb::try_from_log10(v)
                .ok_or_else(|| serde::de::Error::custom("log10 value must not be NaN or +inf")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_one() {
        assert_eq!(LogProb::from_linear(0.0), LogProb::ZERO);
        assert_eq!(LogProb::from_linear(1.0), LogProb::ONE);
        assert_eq!(LogProb::ZERO.to_linear(), 0.0);
    }

    #[test]
    fn ordering_is_total_with_zero_smallest() {
        let mut v = [LogProb::from_log10(-3.0), LogProb::ZERO, LogProb::from_log10(2.0)];
        v.sort();
        assert_eq!(v[0], LogProb::ZERO);
        assert_eq!(v[2].log10(), 2.0);
    }

    #[test]
    fn saturation_only_clamps_above_one() {
        assert_eq!(LogProb::from_log10(3.0).to_probability(), 1.0);
        assert_eq!(LogProb::from_log10(-2.0).saturate().log10(), -2.0);
    }

    #[test]
    fn deep_underflow_survives_multiplication() {
        let p = LogProb::from_log10(-6000.0) * LogProb::from_log10(-5.0);
        assert_eq!(p.log10(), -6005.0);
        assert!(!p.is_representable());
        assert_eq!(p.to_linear(), 0.0);
    }

    #[test]
    fn json_uses_null_for_zero() {
        let s = serde_json::to_string(&LogProb::ZERO).unwrap();
        assert_eq!(s, "null");
        let back: LogProb = serde_json::from_str(&s).unwrap();
        assert_eq!(back, LogProb::ZERO);
        let x: LogProb = serde_json::from_str("-7.5").unwrap();
        assert_eq!(x.log10(), -7.5);
    }

    #[test]
    #[should_panic]
    fn nan_rejected() {
        LogProb::from_log10(f64::NAN);
    }
}
