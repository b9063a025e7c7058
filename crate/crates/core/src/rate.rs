use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A positive rational number `num/den` kept in lowest terms.
///
/// Used for the sparsification rate (which must lie in `(0, 1]`) and for
/// additions-per-entry budgets (any positive rational).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rate {
    num: u32,
    den: u32,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rate {
    pub const ONE: Rate = Rate { num: 1, den: 1 };

    /// Builds `num/den`, reduced. Both parts must be positive.
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidInput(format!(
                "rational {num}/{den} must have positive numerator and denominator"
            )));
        }
        let g = gcd(num as u64, den as u64) as u32;
        Ok(Rate {
            num: num / g,
            den: den / g,
        })
    }

    /// `1/den`.
    pub fn reciprocal(den: u32) -> Result<Self> {
        Rate::new(1, den)
    }

    /// Like [`Rate::new`] but additionally requires the value to be at most one.
    pub fn fraction(num: u32, den: u32) -> Result<Self> {
        let r = Rate::new(num, den)?;
        if r.num > r.den {
            return Err(Error::InvalidInput(format!("rate {r} must lie in (0, 1]")));
        }
        Ok(r)
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_at_most_one(self) -> bool {
        self.num <= self.den
    }

    /// `ceil(self * n)` in exact integer arithmetic.
    pub fn ceil_mul(self, n: u64) -> u64 {
        (n * self.num as u64).div_ceil(self.den as u64)
    }

    /// `round(self * n)` with halves rounded up, in exact integer arithmetic.
    pub fn round_mul(self, n: u64) -> u64 {
        (2 * n * self.num as u64 + self.den as u64) / (2 * self.den as u64)
    }

    /// `self / other` if that quotient is a positive integer.
    pub fn div_exact(self, other: Rate) -> Option<u64> {
        let num = self.num as u64 * other.den as u64;
        let den = self.den as u64 * other.num as u64;
        num.is_multiple_of(den).then(|| num / den)
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rate {
    type Err = Error;

    /// Accepts `"a/b"` or a bare integer `"a"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse rational from {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((a, b)) => Rate::new(
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ),
            None => Rate::new(s.parse().map_err(|_| bad())?, 1),
        }
    }
}
