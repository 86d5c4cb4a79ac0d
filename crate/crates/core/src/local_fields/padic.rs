use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{pow_q, text, FieldDescriptor, FieldKind, LocalElement};
use crate::error::{Error, Result};
use crate::valuation::{split_power, ExtendedValuation};

/// An element of `Q_p` known modulo `p^precision`.
///
/// The value is `p^valuation * unit` with `unit` a `p`-adic unit reduced modulo
/// `p^(precision - valuation)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PAdicNumber {
    field: FieldDescriptor,
    valuation: ExtendedValuation,
    unit: BigUint,
    precision: i64,
}

impl PAdicNumber {
    /// Builds `p^shift * value + O(p^prec)` from any integer `value`.
    fn normalize(field: FieldDescriptor, shift: i64, value: BigInt, prec: i64) -> Self {
        if prec <= shift {
            return Self::zero(field, prec);
        }
        let modulus = BigInt::from(pow_q(field.q, prec - shift));
        let reduced = value.mod_floor(&modulus);
        if reduced.is_zero() {
            return Self::zero(field, prec);
        }
        let (k, unit) = split_power(field.q, &reduced);
        PAdicNumber {
            field,
            valuation: ExtendedValuation::Finite(shift + k),
            unit: unit.to_biguint().expect("reduced value is nonnegative"),
            precision: prec,
        }
    }

    /// The unit part as an integer in `[1, p^relative_precision)`.
    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    pub fn relative_precision(&self) -> i64 {
        match self.valuation {
            ExtendedValuation::Finite(v) => self.precision - v,
            ExtendedValuation::Infinity => 0,
        }
    }

    /// Exact rational `p^v * unit` represented by the stored digits.
    pub fn representative(&self) -> num_rational::BigRational {
        use num_rational::BigRational;
        match self.valuation {
            ExtendedValuation::Infinity => BigRational::zero(),
            ExtendedValuation::Finite(v) => {
                let u = BigRational::from_integer(BigInt::from(self.unit.clone()));
                let pv = BigInt::from(pow_q(self.field.q, v.abs()));
                if v >= 0 {
                    u * BigRational::from_integer(pv)
                } else {
                    u / BigRational::from_integer(pv)
                }
            }
        }
    }

    fn check_field(&self, other: &Self) {
        assert_eq!(self.field, other.field, "operands from different fields");
    }
}

/// Inverse of a unit modulo `q^n` through the geometric identity
/// `1/(1 - x) = (1 + x)(1 + x^2)(1 + x^4)...` with `v(x) >= 1`.
pub(crate) fn unit_inverse(u: &BigUint, q: u64, n: i64) -> BigUint {
    debug_assert!(n >= 1);
    let m = pow_q(q, n);
    let qb = BigUint::from(q);
    let u0 = u % &qb;
    debug_assert!(!u0.is_zero(), "not a unit");
    // Fermat: u0^(q-2) is the inverse modulo q.
    let i0 = u0.modpow(&BigUint::from(q - 2), &qb);
    let r = (u * &i0) % &m;
    let x = (&m + 1u32 - r) % &m;
    let mut acc = BigUint::one();
    let mut power = x;
    let mut known = 1i64;
    while known < n && !power.is_zero() {
        acc = (&acc * (&power + 1u32)) % &m;
        power = (&power * &power) % &m;
        known *= 2;
    }
    (acc * i0) % m
}

impl LocalElement for PAdicNumber {
    fn field(&self) -> FieldDescriptor {
        self.field
    }

    fn valuation(&self) -> ExtendedValuation {
        self.valuation
    }

    fn abs_precision(&self) -> i64 {
        self.precision
    }

    fn unit_digits(&self) -> Vec<u64> {
        let rel = self.relative_precision();
        if rel == 0 {
            return Vec::new();
        }
        let mut digits = self.unit.to_radix_le(self.field.q as u32);
        digits.resize(rel as usize, 0);
        digits.into_iter().map(u64::from).collect()
    }

    fn zero(field: FieldDescriptor, prec: i64) -> Self {
        debug_assert_eq!(field.kind, FieldKind::PAdic);
        PAdicNumber { field, valuation: ExtendedValuation::Infinity, unit: BigUint::zero(), precision: prec }
    }

    fn from_integer(field: FieldDescriptor, n: &BigInt, prec: i64) -> Self {
        Self::normalize(field, 0, n.clone(), prec)
    }

    fn from_rational(field: FieldDescriptor, num: &BigInt, den: &BigInt, prec: i64) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByIndistinguishableZero);
        }
        if num.is_zero() {
            return Ok(Self::zero(field, prec));
        }
        let (vn, un) = split_power(field.q, num);
        let (vd, ud) = split_power(field.q, den);
        let v = vn - vd;
        if prec <= v {
            return Ok(Self::zero(field, prec));
        }
        let rel = prec - v;
        let m = BigInt::from(pow_q(field.q, rel));
        let ud_pos = ud.mod_floor(&m).to_biguint().expect("nonnegative");
        let inv = BigInt::from(unit_inverse(&ud_pos, field.q, rel));
        Ok(Self::normalize(field, v, un * inv, prec))
    }

    fn from_digits(field: FieldDescriptor, shift: i64, digits: &[u64], prec: i64) -> Self {
        let q = BigInt::from(field.q);
        let mut acc = BigInt::zero();
        for &d in digits.iter().rev() {
            acc = acc * &q + BigInt::from(d);
        }
        Self::normalize(field, shift, acc, prec)
    }

    fn add(&self, rhs: &Self) -> Self {
        self.check_field(rhs);
        let prec = self.precision.min(rhs.precision);
        match (self.valuation, rhs.valuation) {
            (ExtendedValuation::Infinity, _) => rhs.truncate_to(prec),
            (_, ExtendedValuation::Infinity) => self.truncate_to(prec),
            (ExtendedValuation::Finite(a), ExtendedValuation::Finite(b)) => {
                let v = a.min(b);
                let lhs = BigInt::from(&self.unit * pow_q(self.field.q, a - v));
                let rhs_v = BigInt::from(&rhs.unit * pow_q(self.field.q, b - v));
                Self::normalize(self.field, v, lhs + rhs_v, prec)
            }
        }
    }

    fn neg(&self) -> Self {
        match self.valuation {
            ExtendedValuation::Infinity => self.clone(),
            ExtendedValuation::Finite(v) => Self::normalize(
                self.field,
                v,
                BigInt::from_biguint(Sign::Minus, self.unit.clone()),
                self.precision,
            ),
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.check_field(rhs);
        let va = self.valuation_bound();
        let vb = rhs.valuation_bound();
        let prec = (self.precision + vb).min(rhs.precision + va);
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(self.field, prec);
        }
        Self::normalize(self.field, va + vb, BigInt::from(&self.unit * &rhs.unit), prec)
    }

    fn inverse(&self) -> Result<Self> {
        let v = match self.valuation {
            ExtendedValuation::Infinity => return Err(Error::DivisionByIndistinguishableZero),
            ExtendedValuation::Finite(v) => v,
        };
        let rel = self.precision - v;
        let inv = unit_inverse(&self.unit, self.field.q, rel);
        Ok(PAdicNumber {
            field: self.field,
            valuation: ExtendedValuation::Finite(-v),
            unit: inv,
            precision: rel - v,
        })
    }

    fn mul_bigint(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(self.field, self.precision);
        }
        let (k, cofactor) = split_power(self.field.q, n);
        match self.valuation {
            ExtendedValuation::Infinity => Self::zero(self.field, self.precision + k),
            ExtendedValuation::Finite(v) => Self::normalize(
                self.field,
                v + k,
                BigInt::from(self.unit.clone()) * cofactor,
                self.precision + k,
            ),
        }
    }

    fn scale_by_uniformizer(&self, k: i64) -> Self {
        PAdicNumber {
            valuation: self.valuation.shift(k),
            precision: self.precision + k,
            ..self.clone()
        }
    }

    fn truncate_to(&self, prec: i64) -> Self {
        if prec >= self.precision {
            return self.clone();
        }
        match self.valuation {
            ExtendedValuation::Finite(v) if v < prec => {
                Self::normalize(self.field, v, BigInt::from(self.unit.clone()), prec)
            }
            _ => Self::zero(self.field, prec),
        }
    }

    fn lift_to(&self, prec: i64) -> Self {
        if prec <= self.precision {
            return self.clone();
        }
        PAdicNumber { precision: prec, ..self.clone() }
    }
}

impl fmt::Display for PAdicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render_element(self))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl $tr<&PAdicNumber> for &PAdicNumber {
            type Output = PAdicNumber;
            fn $method(self, rhs: &PAdicNumber) -> PAdicNumber {
                LocalElement::$call(self, rhs)
            }
        }
        impl $tr for PAdicNumber {
            type Output = PAdicNumber;
            fn $method(self, rhs: PAdicNumber) -> PAdicNumber {
                LocalElement::$call(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl Neg for &PAdicNumber {
    type Output = PAdicNumber;
    fn neg(self) -> PAdicNumber {
        LocalElement::neg(self)
    }
}

impl Neg for PAdicNumber {
    type Output = PAdicNumber;
    fn neg(self) -> PAdicNumber {
        LocalElement::neg(&self)
    }
}
