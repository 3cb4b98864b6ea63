//! Numeric types the DP engine runs over.

use std::fmt::{Debug, Display};
use std::ops::{Add, Neg, Sub};

/// Scalar edge weight. `i64` gives exact arithmetic for integer-valued laws;
/// `f64` covers continuous laws.
pub trait Weight:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    const ZERO: Self;

    /// Converts a sampled value. Integer mode only ever sees integral samples.
    fn from_sample(value: f64) -> Self;

    fn to_f64(self) -> f64;

    #[inline(always)]
    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    #[inline(always)]
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Equality at relative tolerance `rel`; exact for integers.
    fn close_to(self, other: Self, rel: f64) -> bool;

    /// `|self - other| <= rel * max(|self|, |other|, scale)`; exact for integers.
    fn close_within(self, other: Self, scale: f64, rel: f64) -> bool;
}

impl Weight for i64 {
    const ZERO: Self = 0;

    #[inline(always)]
    fn from_sample(value: f64) -> Self {
        value as i64
    }

    #[inline(always)]
    fn to_f64(self) -> f64 {
        self as f64
    }

    #[inline(always)]
    fn min_of(self, other: Self) -> Self {
        self.min(other)
    }

    #[inline(always)]
    fn max_of(self, other: Self) -> Self {
        self.max(other)
    }

    fn close_to(self, other: Self, _rel: f64) -> bool {
        self == other
    }

    fn close_within(self, other: Self, _scale: f64, _rel: f64) -> bool {
        self == other
    }
}

impl Weight for f64 {
    const ZERO: Self = 0.0;

    #[inline(always)]
    fn from_sample(value: f64) -> Self {
        value
    }

    #[inline(always)]
    fn min_of(self, other: Self) -> Self {
        self.min(other)
    }

    #[inline(always)]
    fn max_of(self, other: Self) -> Self {
        self.max(other)
    }

    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }

    fn close_to(self, other: Self, rel: f64) -> bool {
        relative_difference(self, other) <= rel
    }

    fn close_within(self, other: Self, scale: f64, rel: f64) -> bool {
        (self - other).abs() <= rel * self.abs().max(other.abs()).max(scale.abs())
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Relative tolerance for equality of real-valued first-passage quantities.
pub const REAL_REL_TOL: f64 = 1e-9;
