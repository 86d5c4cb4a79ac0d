//! Integer valuations and the exponent-only magnitude algebra.
//!
//! Absolute values in a discretely valued field take values in
//! `{q^-j : j in Z} ∪ {0}`, so every magnitude is carried as its exponent.
//! Nothing in this module touches floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integer valuation, or `Infinity` for the valuation of zero.
///
/// The derived order puts every `Finite` value below `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExtendedValuation {
    Finite(i64),
    Infinity,
}

impl ExtendedValuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedValuation::Infinity)
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtendedValuation::Finite(v) => Some(v),
            ExtendedValuation::Infinity => None,
        }
    }

    /// Replaces `Infinity` by `cap`.
    pub fn or_cap(self, cap: i64) -> i64 {
        match self {
            ExtendedValuation::Finite(v) => v,
            ExtendedValuation::Infinity => cap,
        }
    }

    /// Adds an integer offset; `Infinity` absorbs.
    pub fn shift(self, by: i64) -> Self {
        match self {
            ExtendedValuation::Finite(v) => ExtendedValuation::Finite(v + by),
            ExtendedValuation::Infinity => ExtendedValuation::Infinity,
        }
    }
}

impl From<i64> for ExtendedValuation {
    fn from(v: i64) -> Self {
        ExtendedValuation::Finite(v)
    }
}

impl Add for ExtendedValuation {
    type Output = ExtendedValuation;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedValuation::Finite(a), ExtendedValuation::Finite(b)) => {
                ExtendedValuation::Finite(a + b)
            }
            _ => ExtendedValuation::Infinity,
        }
    }
}

impl fmt::Display for ExtendedValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValuation::Finite(v) => write!(f, "{v}"),
            ExtendedValuation::Infinity => f.write_str("inf"),
        }
    }
}

/// The magnitude `base^(-exponent)`; an infinite exponent is magnitude zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Magnitude {
    pub base: u64,
    pub exponent: ExtendedValuation,
}

impl Magnitude {
    pub fn new(base: u64, exponent: impl Into<ExtendedValuation>) -> Self {
        Magnitude { base, exponent: exponent.into() }
    }

    pub fn zero(base: u64) -> Self {
        Magnitude { base, exponent: ExtendedValuation::Infinity }
    }

    pub fn one(base: u64) -> Self {
        Magnitude::new(base, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.exponent.is_infinite()
    }

    fn check_base(&self, other: &Magnitude) -> Result<()> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(Error::MismatchedBase(self.base, other.base))
        }
    }

    /// Product: exponents add, zero absorbs.
    pub fn mul(&self, other: &Magnitude) -> Result<Magnitude> {
        self.check_base(other)?;
        Ok(Magnitude { base: self.base, exponent: self.exponent + other.exponent })
    }

    /// Larger of the two magnitudes, i.e. the smaller exponent.
    pub fn max(&self, other: &Magnitude) -> Result<Magnitude> {
        self.check_base(other)?;
        Ok(Magnitude { base: self.base, exponent: self.exponent.min(other.exponent) })
    }

    /// Compares magnitudes; a larger exponent is a smaller magnitude.
    pub fn compare(&self, other: &Magnitude) -> Result<Ordering> {
        self.check_base(other)?;
        Ok(other.exponent.cmp(&self.exponent))
    }

    /// Integer power; `None` for a negative power of zero.
    pub fn pow(&self, k: i64) -> Option<Magnitude> {
        match self.exponent {
            ExtendedValuation::Finite(e) => Some(Magnitude::new(self.base, e * k)),
            ExtendedValuation::Infinity if k > 0 => Some(*self),
            ExtendedValuation::Infinity if k == 0 => Some(Magnitude::one(self.base)),
            ExtendedValuation::Infinity => None,
        }
    }

    /// Exact value as a rational number.
    pub fn to_rational(&self) -> BigRational {
        match self.exponent {
            ExtendedValuation::Infinity => BigRational::zero(),
            ExtendedValuation::Finite(e) => {
                let b = BigInt::from(self.base).pow(e.unsigned_abs() as u32);
                if e >= 0 {
                    BigRational::new(BigInt::from(1), b)
                } else {
                    BigRational::from_integer(b)
                }
            }
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent {
            ExtendedValuation::Infinity => f.write_str("0"),
            ExtendedValuation::Finite(e) => write!(f, "{}^({})", self.base, -e),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Strips factors of `p` from a nonzero integer, returning the count and the cofactor.
pub(crate) fn split_power(p: u64, n: &BigInt) -> (i64, BigInt) {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut count = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&pb);
        if !r.is_zero() {
            return (count, rest);
        }
        rest = q;
        count += 1;
    }
}

/// The p-adic valuation of an integer.
pub fn vp_integer(p: u64, n: &BigInt) -> Result<ExtendedValuation> {
    require_prime(p)?;
    if n.is_zero() {
        return Ok(ExtendedValuation::Infinity);
    }
    Ok(ExtendedValuation::Finite(split_power(p, &n.abs()).0))
}

/// The p-adic valuation of a rational: `j` with `x = p^j a/b`, `p ∤ ab`.
pub fn vp(p: u64, x: &BigRational) -> Result<ExtendedValuation> {
    require_prime(p)?;
    if x.is_zero() {
        return Ok(ExtendedValuation::Infinity);
    }
    let (num, _) = split_power(p, x.numer());
    let (den, _) = split_power(p, x.denom());
    Ok(ExtendedValuation::Finite(num - den))
}

/// Number of factors of `p` in `j!`, by Legendre's formula `Σ floor(j/p^l)`.
pub fn factorial_valuation(p: u64, j: u64) -> u64 {
    debug_assert!(p >= 2);
    let mut total = 0;
    let mut rest = j;
    while rest > 0 {
        rest /= p;
        total += rest;
    }
    total
}

/// Smallest integer valuation `v` with `v * (p - 1) > 1`, i.e. the integer form
/// of `|x| < p^(-1/(p-1))`.
pub fn exp_threshold(p: u64) -> i64 {
    if p == 2 {
        2
    } else {
        1
    }
}
