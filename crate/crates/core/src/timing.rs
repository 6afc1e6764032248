//! Durations far beyond `f64` seconds, held as `log2(seconds)`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// 365 days.
pub const SECONDS_PER_YEAR: f64 = 31_536_000.0;

/// `log2` of an arbitrary-precision integer; `-inf` for zero.
pub fn log2_biguint(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().expect("64 bits");
    (top as f64).log2() + shift as f64
}

/// `log2(2^n - 1)` without overflow for large `n`.
pub fn log2_mersenne(n: u32) -> f64 {
    if n <= 52 {
        (((1u64 << n) - 1) as f64).log2()
    } else {
        n as f64 + (-(-(n as f64)).exp2()).ln_1p() / std::f64::consts::LN_2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogDuration {
    log2_seconds: f64,
}

impl LogDuration {
    pub fn from_log2_seconds(log2_seconds: f64) -> Self {
        Self { log2_seconds }
    }

    pub fn from_seconds(seconds: f64) -> Self {
        Self::from_log2_seconds(seconds.log2())
    }

    pub fn from_years(years: f64) -> Self {
        Self::from_seconds(years * SECONDS_PER_YEAR)
    }

    /// `count * tau`.
    pub fn from_count(count: &BigUint, tau: f64) -> Self {
        Self::from_log2_seconds(log2_biguint(count) + tau.log2())
    }

    pub fn log2_seconds(&self) -> f64 {
        self.log2_seconds
    }

    /// Seconds as `f64`; infinite when out of range.
    pub fn seconds(&self) -> f64 {
        self.log2_seconds.exp2()
    }

    pub fn years(&self) -> f64 {
        self.seconds() / SECONDS_PER_YEAR
    }

    pub fn log10_seconds(&self) -> f64 {
        self.log2_seconds * std::f64::consts::LOG10_2
    }

    pub fn log10_years(&self) -> f64 {
        self.log10_seconds() - SECONDS_PER_YEAR.log10()
    }

    /// `factor` times this duration.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_log2_seconds(self.log2_seconds + factor.log2())
    }
}

impl fmt::Display for LogDuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let secs = self.seconds();
        if secs.is_finite() && secs < SECONDS_PER_YEAR {
            write!(f, "{secs:.4e} s")
        } else {
            write!(f, "10^{:.3} years", self.log10_years())
        }
    }
}
