//! Exact dimensions `log(count)/log(scale)` and digit-set covers.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::local_fields::FieldDescriptor;
use crate::parallel::{map_collect, ExecutionMode};
use crate::valuation::require_prime;

/// `log(count) / log(scale)`, kept in a canonical form where both bases are
/// reduced to their smallest common perfect-power root when they share one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimensionValue {
    pub count: BigUint,
    pub scale: BigUint,
}

/// `n = r^k` with `k` maximal.
fn primitive_root(n: &BigUint) -> (BigUint, u32) {
    let bits = n.bits() as u32;
    for k in (2..=bits.max(2)).rev() {
        let r = n.nth_root(k);
        if r > BigUint::one() && r.pow(k) == *n {
            let (r, k2) = primitive_root(&r);
            return (r, k * k2);
        }
    }
    (n.clone(), 1)
}

impl DimensionValue {
    pub fn new(count: BigUint, scale: BigUint) -> Result<Self> {
        if count.is_zero() || scale <= BigUint::one() {
            return Err(Error::InvalidArgument("dimension needs count >= 1 and scale >= 2".into()));
        }
        if count.is_one() {
            return Ok(DimensionValue { count, scale: BigUint::from(2u32) });
        }
        let (r, k) = primitive_root(&count);
        let (t, l) = primitive_root(&scale);
        let g = k.gcd(&l);
        Ok(DimensionValue { count: r.pow(k / g), scale: t.pow(l / g) })
    }

    pub fn from_u64(count: u64, scale: u64) -> Result<Self> {
        Self::new(BigUint::from(count), BigUint::from(scale))
    }

    /// Exact value when it is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.count.is_one() {
            return Some(BigRational::zero());
        }
        let (r, k) = primitive_root(&self.count);
        let (t, l) = primitive_root(&self.scale);
        (r == t).then(|| BigRational::new(BigInt::from(k), BigInt::from(l)))
    }

    pub fn approx(&self) -> f64 {
        ln_big(&self.count) / ln_big(&self.scale)
    }
}

fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Display for DimensionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "log({})/log({})", self.count, self.scale),
        }
    }
}

/// `alpha = 1/(a * rho1_exponent)`, the dimension of the field with its
/// absolute value raised to the power `a`.
pub fn hausdorff_alpha(desc: FieldDescriptor, snowflake_a: &BigRational) -> Result<DimensionValue> {
    if !snowflake_a.is_positive() {
        return Err(Error::InvalidArgument(format!("snowflake exponent {snowflake_a} must be positive")));
    }
    let n = snowflake_a.numer().to_u32().ok_or(Error::InvalidArgument("snowflake numerator too large".into()))?;
    let d = snowflake_a.denom().to_u32().ok_or(Error::InvalidArgument("snowflake denominator too large".into()))?;
    let q = BigUint::from(desc.q);
    DimensionValue::new(q.pow(d), q.pow(n * desc.rho1_exponent))
}

/// Exponent `beta` of a Hausdorff content sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Rational(BigRational),
    LogRatio(DimensionValue),
}

/// The positive real `radicand^(1/root_index)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentEstimate {
    pub radicand: BigRational,
    pub root_index: u32,
}

impl ContentEstimate {
    pub fn is_one(&self) -> bool {
        self.radicand.is_one()
    }

    pub fn approx(&self) -> f64 {
        let r = &self.radicand;
        let ln = ln_big(&r.numer().to_biguint().expect("positive")) - ln_big(&r.denom().to_biguint().expect("positive"));
        (ln / self.root_index as f64).exp()
    }
}

impl PartialOrd for ContentEstimate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ContentEstimate {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = num_traits::pow(self.radicand.clone(), other.root_index as usize);
        let b = num_traits::pow(other.radicand.clone(), self.root_index as usize);
        a.cmp(&b)
    }
}

impl fmt::Display for ContentEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.root_index == 1 {
            write!(f, "{}", self.radicand)
        } else {
            write!(f, "({})^(1/{})", self.radicand, self.root_index)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitSetReport {
    /// Number of radius `p^-n` balls covering the set.
    pub ball_count: BigUint,
    /// `ball_count * p^(-beta n)`.
    pub content_estimate: ContentEstimate,
    pub dimension: DimensionValue,
}

fn check_digits(p: u64, digits: &[u64]) -> Result<Vec<u64>> {
    require_prime(p)?;
    if digits.is_empty() {
        return Err(Error::EmptyDigitSet);
    }
    let mut s = digits.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&d) = s.iter().find(|&&d| d >= p) {
        return Err(Error::InvalidArgument(format!("digit {d} is not below {p}")));
    }
    Ok(s)
}

/// Cover of `{Σ s_i p^i : s_i in S}` by balls of radius `p^-n`.
pub fn digit_set_analysis(p: u64, digits: &[u64], n: u32, beta: &Exponent) -> Result<DigitSetReport> {
    let s = check_digits(p, digits)?;
    if n == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let size = BigUint::from(s.len());
    let ball_count = size.pow(n);
    let count = BigInt::from(ball_count.clone());
    let pb = BigInt::from(p);
    let content_estimate = match beta {
        Exponent::Rational(b) => {
            // (|S|^n p^(-b n))^den = |S|^(n den) p^(-num n)
            let den = b.denom().to_u32().ok_or(Error::InvalidArgument("exponent denominator too large".into()))?;
            let num = b.numer().to_i64().ok_or(Error::InvalidArgument("exponent numerator too large".into()))?;
            let e = num * n as i64;
            let pw = BigRational::from_integer(pb.pow(e.unsigned_abs() as u32));
            let p_part = if e >= 0 { pw.recip() } else { pw };
            ContentEstimate { radicand: BigRational::from_integer(count.pow(den)) * p_part, root_index: den }
        }
        Exponent::LogRatio(dim) => {
            // scale = p^k, so p^(-beta n) = count^(-n/k)
            let (t, k) = primitive_root(&dim.scale);
            if t != BigUint::from(p) {
                return Err(Error::InvalidArgument(format!("exponent base {} is not a power of {p}", dim.scale)));
            }
            let c = BigInt::from(dim.count.clone()).pow(n);
            ContentEstimate { radicand: BigRational::new(count.pow(k), c), root_index: k }
        }
    };
    Ok(DigitSetReport { ball_count, content_estimate, dimension: DimensionValue::new(size, BigUint::from(p))? })
}

/// Every residue mod `p^n` whose digits all lie in `S`, sorted.
pub fn digit_set_cover(p: u64, digits: &[u64], n: u32, mode: ExecutionMode) -> Result<Vec<u128>> {
    let s = check_digits(p, digits)?;
    (p as u128).checked_pow(n).ok_or(Error::InvalidArgument(format!("{p}^{n} is too large")))?;
    let head = n / 2;
    let mut prefixes = vec![0u128];
    for i in 0..head {
        let w = (p as u128).pow(i);
        prefixes = prefixes.iter().flat_map(|&r| s.iter().map(move |&d| r + d as u128 * w)).collect();
    }
    let chunks = map_collect(mode, prefixes, |r| {
        let mut acc = vec![r];
        for i in head..n {
            let w = (p as u128).pow(i);
            acc = acc.iter().flat_map(|&r| s.iter().map(move |&d| r + d as u128 * w)).collect();
        }
        acc
    });
    let mut out: Vec<u128> = chunks.into_iter().flatten().collect();
    out.sort_unstable();
    Ok(out)
}
