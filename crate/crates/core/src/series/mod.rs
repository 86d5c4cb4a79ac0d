//! Truncated power series `Σ a_j X^j` with certified tail bounds.
//!
//! A series stores `a_0..a_M` and either nothing more (a polynomial) or a
//! [`TailProfile`] bounding `v(a_j)` for `j > M`. Radii are always value-group
//! radii `q^-m`, so every supremum over `j` is a computable minimum of integer
//! exponents.

mod tail;
pub mod text;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_fields::{FieldDescriptor, LocalElement};
use crate::valuation::{ExtendedValuation, Magnitude};

pub use tail::{Growth, TailProfile};

/// Closed-ball radius `q^-m`, stored as the exponent `m`.
pub type RadiusExponent = i64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries<F: LocalElement> {
    field: FieldDescriptor,
    coeffs: Vec<F>,
    tail: Option<TailProfile>,
}

/// Where a series converges, as a bound on `v(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvergenceThreshold {
    /// Polynomials converge for every `x`.
    Everywhere,
    /// Converges whenever `v(x) >= e_min`.
    AtLeast(i64),
}

/// Result of the isometry test `M_2(r) r' < |f'(y)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsometryReport {
    pub certified: bool,
    pub derivative: Magnitude,
    pub second_order: Magnitude,
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl<F: LocalElement> TruncatedSeries<F> {
    pub fn polynomial(field: FieldDescriptor, coeffs: Vec<F>) -> Self {
        TruncatedSeries { field, coeffs, tail: None }
    }

    pub fn with_tail(field: FieldDescriptor, coeffs: Vec<F>, tail: TailProfile) -> Self {
        TruncatedSeries { field, coeffs, tail: Some(tail) }
    }

    /// Polynomial with exact integer coefficients held to precision `prec`.
    pub fn from_integers(field: FieldDescriptor, coeffs: &[i64], prec: i64) -> Self {
        let coeffs = coeffs.iter().map(|&c| F::from_integer(field, &BigInt::from(c), prec)).collect();
        Self::polynomial(field, coeffs)
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn tail(&self) -> Option<&TailProfile> {
        self.tail.as_ref()
    }

    pub fn is_polynomial(&self) -> bool {
        self.tail.is_none()
    }

    /// Smallest absolute precision among the stored coefficients.
    pub fn working_precision(&self) -> Option<i64> {
        self.coeffs.iter().map(|c| c.abs_precision()).min()
    }

    fn stored_bounds(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.coeffs.iter().enumerate().map(|(j, c)| (j as u64, c.valuation_bound()))
    }

    fn check_radius(&self, m: RadiusExponent) -> Result<()> {
        match &self.tail {
            Some(t) if !t.admits(m) => Err(Error::InadmissibleRadius(m)),
            _ => Ok(()),
        }
    }

    /// Exponent of `M_k(r) = max_{j >= k} |a_j| r^(j-k)` for `r = q^-m`.
    ///
    /// Coefficients that are zero to their precision contribute that precision
    /// as a bound, so the result is always a certified upper bound on `M_k`.
    pub fn sup_term_exponent(&self, m: RadiusExponent, k: usize) -> Result<ExtendedValuation> {
        self.check_radius(m)?;
        let mut best = ExtendedValuation::Infinity;
        for (j, v) in self.stored_bounds().skip(k) {
            best = best.min(ExtendedValuation::Finite(v + (j as i64 - k as i64) * m));
        }
        if let Some(t) = &self.tail {
            let start = (self.coeffs.len() as u64).max(k as u64);
            let rest = t.min_term(start, m) - k as i64 * m;
            best = best.min(ExtendedValuation::Finite(rest));
        }
        Ok(best)
    }

    pub fn sup_term(&self, m: RadiusExponent, k: usize) -> Result<Magnitude> {
        Ok(self.field.magnitude(self.sup_term_exponent(m, k)?))
    }

    /// `f(x)` modulo `q^target`, or to the lower precision the inputs allow.
    pub fn eval(&self, x: &F, target: i64) -> Result<F> {
        let w = x.valuation_bound();
        if let Some(t) = &self.tail {
            if !t.admits(w) {
                return Err(Error::DomainError(format!(
                    "series does not converge at valuation {w}"
                )));
            }
            let stored = self.coeffs.len();
            if t.min_term(stored as u64, w) < target {
                return Err(Error::InsufficientTerms {
                    needed: t.terms_needed(w, target) as usize,
                    stored,
                });
            }
        }
        let mut sum = F::zero(self.field, target);
        let mut power: Option<F> = None;
        for (j, a) in self.coeffs.iter().enumerate() {
            if j > 0 {
                power = Some(match power {
                    None => x.clone(),
                    Some(p) => p.mul(x),
                });
            }
            if a.valuation_bound() + j as i64 * w >= target {
                continue;
            }
            let term = match &power {
                None => a.clone(),
                Some(p) => a.mul(p),
            };
            sum = sum.add(&term);
        }
        Ok(sum.truncate_to(target))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, a)| a.mul_integer(j as i64))
            .collect();
        TruncatedSeries { field: self.field, coeffs, tail: self.tail.map(|t| t.shifted(1)) }
    }

    /// Cauchy product. Stored coefficients are those fully determined by the
    /// stored coefficients of both factors.
    pub fn cauchy_product(&self, other: &Self) -> Self {
        assert_eq!(self.field, other.field, "series over different fields");
        let (a, b) = (&self.coeffs, &other.coeffs);
        let tail = match (&self.tail, &other.tail) {
            (None, None) => None,
            _ => Some(self.covering().convolve(&other.covering())),
        };
        if a.is_empty() || b.is_empty() {
            return TruncatedSeries { field: self.field, coeffs: Vec::new(), tail };
        }
        let len = match (&self.tail, &other.tail) {
            (None, None) => a.len() + b.len() - 1,
            (None, Some(_)) => b.len(),
            (Some(_), None) => a.len(),
            (Some(_), Some(_)) => a.len().min(b.len()),
        };
        let coeffs = (0..len)
            .map(|n| {
                let lo = n.saturating_sub(b.len() - 1);
                let hi = n.min(a.len() - 1);
                let mut acc: Option<F> = None;
                for j in lo..=hi {
                    let t = a[j].mul(&b[n - j]);
                    acc = Some(match acc {
                        None => t,
                        Some(s) => s.add(&t),
                    });
                }
                acc.expect("nonempty range")
            })
            .collect();
        TruncatedSeries { field: self.field, coeffs, tail }
    }

    /// A profile bounding every coefficient, stored or not.
    fn covering(&self) -> TailProfile {
        let base = self.tail.unwrap_or(TailProfile::flat(i64::MAX / 4));
        base.covering(self.stored_bounds())
    }

    fn check_center(&self, x0: &F, m: RadiusExponent) -> Result<i64> {
        self.check_radius(m)?;
        let w = x0.valuation_bound();
        if w < m {
            return Err(Error::DomainError(format!(
                "center has valuation {w}, outside the ball of radius exponent {m}"
            )));
        }
        Ok(w)
    }

    /// Valuation bound on the part of a stored coefficient that depends on
    /// unstored terms: `min_{l > M} lb(l) + (l - j) w`.
    fn tail_contribution(&self, j: usize, w: i64) -> Option<i64> {
        self.tail.map(|t| t.min_term(self.coeffs.len() as u64, w) - j as i64 * w)
    }

    /// Coefficients `ã_j = Σ_{l >= j} C(l, j) a_l x0^(l-j)` of `f(W + x0)`.
    pub fn recenter(&self, x0: &F, m: RadiusExponent) -> Result<Self> {
        let w = self.check_center(x0, m)?;
        let powers = self.center_powers(x0);
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|j| {
                let mut acc = self.coeffs[j].clone();
                for l in j + 1..n {
                    let t = self.coeffs[l].mul(&powers[l - j]).mul_bigint(&binomial(l as u64, j as u64));
                    acc = acc.add(&t);
                }
                match self.tail_contribution(j, w) {
                    Some(cap) => acc.truncate_to(cap),
                    None => acc,
                }
            })
            .collect();
        Ok(TruncatedSeries { field: self.field, coeffs, tail: self.tail.map(|t| t.monotone()) })
    }

    /// `g_0` with `f(x) - f(x0) = (x - x0) g_0(x)`:
    /// `b_l = Σ_{j > l} a_j x0^(j-l-1)`.
    pub fn deflate(&self, x0: &F, m: RadiusExponent) -> Result<Self> {
        let w = self.check_center(x0, m)?;
        let powers = self.center_powers(x0);
        let n = self.coeffs.len();
        let coeffs = (0..n.saturating_sub(1))
            .map(|l| {
                let mut acc = self.coeffs[l + 1].clone();
                for j in l + 2..n {
                    acc = acc.add(&self.coeffs[j].mul(&powers[j - l - 1]));
                }
                match self.tail_contribution(l + 1, w) {
                    Some(cap) => acc.truncate_to(cap),
                    None => acc,
                }
            })
            .collect();
        let tail = self.tail.map(|t| t.monotone().shifted(1));
        Ok(TruncatedSeries { field: self.field, coeffs, tail })
    }

    /// `x0^0, x0^1, ..., x0^M` with `x0^0` an exact one.
    fn center_powers(&self, x0: &F) -> Vec<F> {
        let prec = self.working_precision().unwrap_or(1).max(x0.abs_precision());
        let mut out = vec![F::one(self.field, prec)];
        if self.coeffs.len() > 1 {
            out.push(x0.clone());
        }
        for k in 2..self.coeffs.len() {
            let next = out[k - 1].mul(x0);
            out.push(next);
        }
        out
    }

    pub fn convergence_threshold(&self) -> ConvergenceThreshold {
        match &self.tail {
            None => ConvergenceThreshold::Everywhere,
            Some(t) => ConvergenceThreshold::AtLeast(t.threshold()),
        }
    }

    /// Tests `M_2(q^-m) q^-sep < |f'(y)|`, which forces
    /// `|f(x) - f(y)| = |f'(y)| |x - y|` whenever `|x|, |y| <= q^-m` and
    /// `|x - y| <= q^-sep`.
    pub fn isometry_criterion(&self, m: RadiusExponent, y: &F, sep: i64) -> Result<IsometryReport> {
        self.check_center(y, m)?;
        let prec = self.working_precision().unwrap_or(y.abs_precision());
        let d = self.derivative().eval(y, prec)?;
        let m2 = self.sup_term_exponent(m, 2)?;
        let certified = !d.is_zero() && m2.shift(sep) > d.valuation();
        Ok(IsometryReport {
            certified,
            derivative: d.magnitude(),
            second_order: self.field.magnitude(m2),
        })
    }
}
