use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{text, FieldDescriptor, FieldKind, LocalElement};
use crate::error::{Error, Result};
use crate::valuation::ExtendedValuation;

/// An element of `F_q((T))` known modulo `T^precision`.
///
/// `coeffs[i]` is the coefficient of `T^(valuation + i)`; `coeffs[0] != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentNumber {
    field: FieldDescriptor,
    valuation: ExtendedValuation,
    coeffs: Vec<u64>,
    precision: i64,
}

fn inv_mod(a: u64, q: u64) -> u64 {
    // q is prime, so a^(q-2) inverts a.
    let mut result = 1u128;
    let mut base = (a % q) as u128;
    let mut e = q - 2;
    let m = q as u128;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    result as u64
}

/// Truncated product of two coefficient vectors modulo `q`.
fn convolve(a: &[u64], b: &[u64], len: usize, q: u64) -> Vec<u64> {
    let mut out = vec![0u64; len];
    let m = q as u128;
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % m) as u64;
        }
    }
    out
}

impl LaurentNumber {
    /// Builds `T^shift * Σ coeffs[i] T^i + O(T^prec)`; coefficients already reduced.
    fn normalize(field: FieldDescriptor, shift: i64, mut coeffs: Vec<u64>, prec: i64) -> Self {
        if prec <= shift {
            return Self::zero(field, prec);
        }
        coeffs.truncate((prec - shift) as usize);
        match coeffs.iter().position(|&c| c != 0) {
            None => Self::zero(field, prec),
            Some(k) => {
                coeffs.drain(..k);
                coeffs.resize((prec - shift) as usize - k, 0);
                LaurentNumber {
                    field,
                    valuation: ExtendedValuation::Finite(shift + k as i64),
                    coeffs,
                    precision: prec,
                }
            }
        }
    }

    /// Coefficients of the unit part, lowest degree first.
    pub fn coefficients(&self) -> &[u64] {
        &self.coeffs
    }

    fn check_field(&self, other: &Self) {
        assert_eq!(self.field, other.field, "operands from different fields");
    }

    /// Inverse of the unit part `c (1 - T a(T))` to `len` coefficients, via
    /// `c^-1 (1 + w)(1 + w^2)(1 + w^4)...` with `w = T a(T)`.
    fn unit_inverse(&self, len: usize) -> Vec<u64> {
        let q = self.field.q;
        let c_inv = inv_mod(self.coeffs[0], q);
        // w = 1 - c^-1 * unit, which has zero constant term
        let mut w: Vec<u64> = self.coeffs.iter().take(len).map(|&c| (q - c * c_inv % q) % q).collect();
        w.resize(len, 0);
        w[0] = 0;
        let mut acc = vec![0u64; len];
        acc[0] = 1;
        let mut known = 1usize;
        while known < len && w.iter().any(|&c| c != 0) {
            let mut factor = w.clone();
            factor[0] = (factor[0] + 1) % q;
            acc = convolve(&acc, &factor, len, q);
            w = convolve(&w, &w, len, q);
            known *= 2;
        }
        acc.iter().map(|&a| a * c_inv % q).collect()
    }
}

/// Inverse of a Laurent series to `terms` coefficients of relative precision,
/// so that `f * result = 1 + O(T^terms)`.
pub fn laurent_invert(f: &LaurentNumber, terms: i64) -> Result<LaurentNumber> {
    let inv = f.inverse()?;
    let v = inv.valuation_bound();
    Ok(inv.truncate_to(v + terms))
}

impl LocalElement for LaurentNumber {
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
        self.coeffs.clone()
    }

    fn zero(field: FieldDescriptor, prec: i64) -> Self {
        debug_assert_eq!(field.kind, FieldKind::Laurent);
        LaurentNumber { field, valuation: ExtendedValuation::Infinity, coeffs: Vec::new(), precision: prec }
    }

    fn from_integer(field: FieldDescriptor, n: &BigInt, prec: i64) -> Self {
        let c = n.mod_floor(&BigInt::from(field.q)).to_u64().expect("reduced");
        Self::normalize(field, 0, vec![c], prec)
    }

    fn from_rational(field: FieldDescriptor, num: &BigInt, den: &BigInt, prec: i64) -> Result<Self> {
        let q = BigInt::from(field.q);
        let d = den.mod_floor(&q).to_u64().expect("reduced");
        if d == 0 {
            // the denominator vanishes in characteristic q
            return Err(Error::DivisionByIndistinguishableZero);
        }
        let n = num.mod_floor(&q).to_u64().expect("reduced");
        Ok(Self::normalize(field, 0, vec![n * inv_mod(d, field.q) % field.q], prec))
    }

    fn from_digits(field: FieldDescriptor, shift: i64, digits: &[u64], prec: i64) -> Self {
        let coeffs = digits.iter().map(|d| d % field.q).collect();
        Self::normalize(field, shift, coeffs, prec)
    }

    fn add(&self, rhs: &Self) -> Self {
        self.check_field(rhs);
        let prec = self.precision.min(rhs.precision);
        match (self.valuation, rhs.valuation) {
            (ExtendedValuation::Infinity, _) => rhs.truncate_to(prec),
            (_, ExtendedValuation::Infinity) => self.truncate_to(prec),
            (ExtendedValuation::Finite(a), ExtendedValuation::Finite(b)) => {
                let v = a.min(b);
                if prec <= v {
                    return Self::zero(self.field, prec);
                }
                let q = self.field.q;
                let mut out = vec![0u64; (prec - v) as usize];
                for (src, start) in [(&self.coeffs, a - v), (&rhs.coeffs, b - v)] {
                    for (i, &c) in src.iter().enumerate() {
                        let pos = start as usize + i;
                        if pos >= out.len() {
                            break;
                        }
                        out[pos] = (out[pos] + c) % q;
                    }
                }
                Self::normalize(self.field, v, out, prec)
            }
        }
    }

    fn neg(&self) -> Self {
        let q = self.field.q;
        LaurentNumber {
            coeffs: self.coeffs.iter().map(|&c| (q - c) % q).collect(),
            ..self.clone()
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
        let len = (prec - va - vb) as usize;
        let out = convolve(&self.coeffs, &rhs.coeffs, len, self.field.q);
        Self::normalize(self.field, va + vb, out, prec)
    }

    fn inverse(&self) -> Result<Self> {
        let v = match self.valuation {
            ExtendedValuation::Infinity => return Err(Error::DivisionByIndistinguishableZero),
            ExtendedValuation::Finite(v) => v,
        };
        let rel = self.precision - v;
        let coeffs = self.unit_inverse(rel as usize);
        Ok(Self::normalize(self.field, -v, coeffs, rel - v))
    }

    fn mul_bigint(&self, n: &BigInt) -> Self {
        let q = self.field.q;
        let c = n.mod_floor(&BigInt::from(q)).to_u64().expect("reduced");
        if c == 0 {
            return Self::zero(self.field, self.precision);
        }
        LaurentNumber {
            coeffs: self.coeffs.iter().map(|&x| x * c % q).collect(),
            ..self.clone()
        }
    }

    fn scale_by_uniformizer(&self, k: i64) -> Self {
        LaurentNumber {
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
                Self::normalize(self.field, v, self.coeffs.clone(), prec)
            }
            _ => Self::zero(self.field, prec),
        }
    }

    fn lift_to(&self, prec: i64) -> Self {
        if prec <= self.precision {
            return self.clone();
        }
        let mut out = self.clone();
        out.precision = prec;
        if let ExtendedValuation::Finite(v) = self.valuation {
            out.coeffs.resize((prec - v) as usize, 0);
        }
        out
    }
}

impl fmt::Display for LaurentNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render_element(self))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl $tr<&LaurentNumber> for &LaurentNumber {
            type Output = LaurentNumber;
            fn $method(self, rhs: &LaurentNumber) -> LaurentNumber {
                LocalElement::$call(self, rhs)
            }
        }
        impl $tr for LaurentNumber {
            type Output = LaurentNumber;
            fn $method(self, rhs: LaurentNumber) -> LaurentNumber {
                LocalElement::$call(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl Neg for &LaurentNumber {
    type Output = LaurentNumber;
    fn neg(self) -> LaurentNumber {
        LocalElement::neg(self)
    }
}
