use std::fmt;

use crate::error::{Error, Result};

/// Exact `2^e` as an `f64`, including the subnormal range.
///
/// Returns `0.0` below `2^-1074` and `+inf` above `2^1023`.
pub fn pow2(e: i32) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e >= -1074 {
        f64::from_bits(1u64 << (e + 1074))
    } else {
        0.0
    }
}

/// `x * 2^e` without leaving the exact range early: the scale is split in
/// two steps when `2^e` alone would not be representable.
pub fn scale_pow2(x: f64, e: i32) -> f64 {
    if (-1022..=1023).contains(&e) {
        x * pow2(e)
    } else {
        let half = e / 2;
        x * pow2(half) * pow2(e - half)
    }
}

/// Largest `e` with `2^e <= a`, for finite positive `a`.
pub(crate) fn floor_log2(a: f64) -> i32 {
    debug_assert!(a > 0.0 && a.is_finite());
    let bits = a.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    if biased == 0 {
        // subnormal: value = mantissa * 2^-1074
        let mantissa = bits & ((1u64 << 52) - 1);
        63 - mantissa.leading_zeros() as i32 - 1074
    } else {
        biased - 1023
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v.is_sign_negative() && v != 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(s: i8) -> Option<Sign> {
        match s {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A nonzero signed power of two, `sign * 2^exponent`.
///
/// Zero is never a `ScalarPo2`; sparse containers express it by omitting
/// the entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScalarPo2 {
    pub sign: Sign,
    pub exponent: i32,
}

impl ScalarPo2 {
    pub fn new(sign: Sign, exponent: i32) -> Self {
        ScalarPo2 { sign, exponent }
    }

    pub fn value(self) -> f64 {
        let m = pow2(self.exponent);
        match self.sign {
            Sign::Plus => m,
            Sign::Minus => -m,
        }
    }

    /// `self * x` computed as an exponent shift plus sign.
    pub fn apply(self, x: f64) -> f64 {
        let y = scale_pow2(x, self.exponent);
        match self.sign {
            Sign::Plus => y,
            Sign::Minus => -y,
        }
    }
}

impl fmt::Display for ScalarPo2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Minus { "-" } else { "+" };
        write!(f, "{s}2^{}", self.exponent)
    }
}

/// Exponent clamp and zero threshold for nearest power-of-two rounding.
///
/// Magnitudes are rounded to the nearest `2^e` in linear distance; the
/// decision boundary between `2^(e-1)` and `2^e` sits at `0.75 * 2^e`, and a
/// magnitude exactly on the boundary goes to the larger exponent. Values
/// below `0.75 * 2^e_min` become zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantizerConfig {
    pub e_min: i32,
    pub e_max: i32,
}

impl Default for QuantizerConfig {
    fn default() -> Self {
        QuantizerConfig {
            e_min: -126,
            e_max: 127,
        }
    }
}

impl QuantizerConfig {
    pub fn new(e_min: i32, e_max: i32) -> Result<Self> {
        let cfg = QuantizerConfig { e_min, e_max };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.e_min >= self.e_max {
            return Err(Error::InvalidInput(format!(
                "exponent clamp requires e_min < e_max, got [{}, {}]",
                self.e_min, self.e_max
            )));
        }
        if self.e_min < -1000 || self.e_max > 1000 {
            return Err(Error::InvalidInput(format!(
                "exponent clamp [{}, {}] exceeds [-1000, 1000]",
                self.e_min, self.e_max
            )));
        }
        Ok(())
    }

    pub fn zero_threshold(&self) -> f64 {
        0.75 * pow2(self.e_min)
    }
}

/// Rounds `v` to the nearest signed power of two, or `None` for zero.
pub fn quantize_scalar(v: f64, cfg: &QuantizerConfig) -> Result<Option<ScalarPo2>> {
    if !v.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite value {v}")));
    }
    let a = v.abs();
    if a < cfg.zero_threshold() {
        return Ok(None);
    }
    let mut e = floor_log2(a);
    // a lies in [2^e, 2^(e+1)); the upper half starts at 1.5 * 2^e
    if a >= 1.5 * pow2(e) {
        e += 1;
    }
    let e = e.clamp(cfg.e_min, cfg.e_max);
    Ok(Some(ScalarPo2::new(Sign::of(v), e)))
}

/// The element of `{0} ∪ {±2^e : e_min <= e <= e_max}` closest to `v`.
///
/// Differs from [`quantize_scalar`] only in `(2^(e_min-1), 0.75 * 2^e_min)`,
/// where the true nearest point is `±2^e_min` rather than zero.
pub(crate) fn nearest_in_alphabet(v: f64, cfg: &QuantizerConfig) -> Result<Option<ScalarPo2>> {
    match quantize_scalar(v, cfg)? {
        Some(q) => Ok(Some(q)),
        None if v.abs() > pow2(cfg.e_min - 1) => Ok(Some(ScalarPo2::new(Sign::of(v), cfg.e_min))),
        None => Ok(None),
    }
}
