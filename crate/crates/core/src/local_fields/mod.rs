//! Finite-precision elements of `Q_p` and `F_q((T))`.
//!
//! Both fields share one precision model: an element is a valuation, a
//! normalized unit part, and an absolute precision `N` meaning the element is
//! known modulo `q^N`. An element whose known digits are all zero is "zero to
//! precision `N`" and reports an infinite valuation.

mod laurent;
mod padic;
pub mod text;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::valuation::{require_prime, ExtendedValuation, Magnitude};

pub use laurent::{laurent_invert, LaurentNumber};
pub use padic::PAdicNumber;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    PAdic,
    Laurent,
}

/// Which field an element lives in: `Q_q` or `F_q((T))`, plus the
/// normalization `rho_1 = q^-rho1_exponent` of the absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub kind: FieldKind,
    pub q: u64,
    pub rho1_exponent: u32,
}

impl FieldDescriptor {
    pub fn padic(p: u64) -> Result<Self> {
        require_prime(p)?;
        Ok(FieldDescriptor { kind: FieldKind::PAdic, q: p, rho1_exponent: 1 })
    }

    pub fn laurent(q: u64) -> Result<Self> {
        require_prime(q)?;
        Ok(FieldDescriptor { kind: FieldKind::Laurent, q, rho1_exponent: 1 })
    }

    /// Same field with the absolute value rescaled so that `rho_1 = q^-e`.
    pub fn with_rho1_exponent(self, e: u32) -> Result<Self> {
        if e == 0 {
            return Err(Error::InvalidArgument("rho1 exponent must be positive".into()));
        }
        Ok(FieldDescriptor { rho1_exponent: e, ..self })
    }

    pub fn uniformizer_symbol(&self) -> String {
        match self.kind {
            FieldKind::PAdic => self.q.to_string(),
            FieldKind::Laurent => "T".to_string(),
        }
    }

    pub fn residue_size(&self) -> u64 {
        self.q
    }

    /// Magnitude of an element of valuation `v` under this normalization.
    pub fn magnitude(&self, v: ExtendedValuation) -> Magnitude {
        Magnitude { base: self.q.pow(self.rho1_exponent), exponent: v }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::PAdic => write!(f, "Q_{}", self.q),
            FieldKind::Laurent => write!(f, "F_{}((T))", self.q),
        }
    }
}

/// Residue class in the residue field `Z/qZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueElement {
    pub value: u64,
    pub q: u64,
}

impl std::ops::Add for ResidueElement {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        ResidueElement { value: (self.value + other.value) % self.q, q: self.q }
    }
}

impl std::ops::Mul for ResidueElement {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        ResidueElement { value: (self.value * other.value) % self.q, q: self.q }
    }
}

/// Common interface of the two discretely valued fields.
///
/// Binary operations panic when the operands come from different fields.
pub trait LocalElement:
    Clone + fmt::Debug + fmt::Display + PartialEq + Eq + std::hash::Hash + Send + Sync + Sized + 'static
{
    fn field(&self) -> FieldDescriptor;

    /// Valuation, or `Infinity` when the element is zero to its precision.
    fn valuation(&self) -> ExtendedValuation;

    /// The element is known modulo `q^abs_precision`.
    fn abs_precision(&self) -> i64;

    /// Base-`q` digits of the unit part, least significant first. Empty for zero.
    fn unit_digits(&self) -> Vec<u64>;

    fn zero(field: FieldDescriptor, prec: i64) -> Self;

    fn from_integer(field: FieldDescriptor, n: &BigInt, prec: i64) -> Self;

    /// `num/den` modulo `q^prec`.
    fn from_rational(field: FieldDescriptor, num: &BigInt, den: &BigInt, prec: i64)
        -> Result<Self>;

    /// `q^shift * Σ digits[i] q^i + O(q^prec)`.
    fn from_digits(field: FieldDescriptor, shift: i64, digits: &[u64], prec: i64) -> Self;

    fn add(&self, rhs: &Self) -> Self;

    fn neg(&self) -> Self;

    fn mul(&self, rhs: &Self) -> Self;

    /// Multiplicative inverse; relative precision is preserved.
    fn inverse(&self) -> Result<Self>;

    /// Product with an exact integer.
    fn mul_bigint(&self, n: &BigInt) -> Self;

    /// Forgets digits at positions `>= prec`. No-op if `prec` is not lower.
    fn truncate_to(&self, prec: i64) -> Self;

    /// Treats the stored digits as an exact representative and extends it with
    /// zero digits up to `prec`. No-op if `prec` is not higher.
    fn lift_to(&self, prec: i64) -> Self;

    /// Exact product with `q^k` (or `T^k`).
    fn scale_by_uniformizer(&self, k: i64) -> Self;

    fn mul_integer(&self, n: i64) -> Self {
        self.mul_bigint(&BigInt::from(n))
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inverse()?))
    }

    fn is_zero(&self) -> bool {
        self.valuation().is_infinite()
    }

    /// Valuation if known, otherwise the precision (a certified lower bound).
    fn valuation_bound(&self) -> i64 {
        self.valuation().or_cap(self.abs_precision())
    }

    fn magnitude(&self) -> Magnitude {
        self.field().magnitude(self.valuation())
    }

    fn one(field: FieldDescriptor, prec: i64) -> Self {
        Self::from_integer(field, &BigInt::from(1), prec)
    }

    /// Digit at absolute position `i`; zero below the valuation.
    fn digit(&self, i: i64) -> Option<u64> {
        if i >= self.abs_precision() {
            return None;
        }
        match self.valuation() {
            ExtendedValuation::Infinity => Some(0),
            ExtendedValuation::Finite(v) if i < v => Some(0),
            ExtendedValuation::Finite(v) => Some(self.unit_digits()[(i - v) as usize]),
        }
    }

    /// `self^k`; `k = 0` gives an exact one at this element's precision.
    fn pow(&self, k: u64) -> Self {
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc.unwrap_or_else(|| Self::one(self.field(), self.abs_precision().max(1)))
    }

    /// Whether `self - other` vanishes modulo `q^prec`.
    fn agrees_to(&self, other: &Self, prec: i64) -> bool {
        let d = self.sub(other);
        d.valuation_bound() >= prec && d.abs_precision() >= prec
    }

    /// Residue class of an element of the valuation ring.
    fn residue(&self) -> Result<ResidueElement> {
        let q = self.field().q;
        match self.valuation() {
            ExtendedValuation::Finite(v) if v < 0 => Err(Error::NegativeValuation(v)),
            ExtendedValuation::Finite(0) => {
                Ok(ResidueElement { value: self.unit_digits()[0], q })
            }
            _ if self.abs_precision() < 1 => {
                Err(Error::InsufficientPrecision { needed: 1, available: self.abs_precision() })
            }
            _ => Ok(ResidueElement { value: 0, q }),
        }
    }

    /// Image in `Z/q^jZ` (p-adic), or the first `j` coefficients packed as a
    /// base-`q` integer (Laurent).
    fn reduce_mod(&self, j: u32) -> Result<BigUint> {
        if let ExtendedValuation::Finite(v) = self.valuation() {
            if v < 0 {
                return Err(Error::NegativeValuation(v));
            }
        }
        if (j as i64) > self.abs_precision() {
            return Err(Error::InsufficientPrecision {
                needed: j as i64,
                available: self.abs_precision(),
            });
        }
        let q = BigUint::from(self.field().q);
        let mut acc = BigUint::from(0u32);
        let v = match self.valuation() {
            ExtendedValuation::Finite(v) if v < j as i64 => v,
            _ => return Ok(acc),
        };
        let digits = self.unit_digits();
        for i in (v..j as i64).rev() {
            acc = acc * &q + BigUint::from(digits[(i - v) as usize]);
        }
        Ok(acc * q.pow(v as u32))
    }
}

/// `1 / (1 - x)` for `v(x) >= 1`, by summing `x^j` until the terms vanish to
/// precision `prec`.
pub fn invert_one_minus<F: LocalElement>(x: &F, prec: i64) -> Result<F> {
    if x.valuation_bound() < 1 {
        return Err(Error::DomainError(format!(
            "geometric series needs valuation >= 1, got {}",
            x.valuation()
        )));
    }
    let prec = prec.min(x.abs_precision());
    let one = F::one(x.field(), prec);
    let mut sum = one.clone();
    let mut term = one;
    loop {
        term = term.mul(x);
        if term.valuation_bound() >= prec {
            break;
        }
        sum = sum.add(&term);
    }
    Ok(sum.truncate_to(prec))
}

pub(crate) fn pow_q(q: u64, k: i64) -> BigUint {
    debug_assert!(k >= 0);
    BigUint::from(q).pow(k as u32)
}
