//! The p-adic exponential `E(X) = Σ X^j / j!` and its inverse.
//!
//! `E` converges exactly when `v(x) >= e_min` (1 for odd `p`, 2 for `p = 2`),
//! and on that domain `v(E(x) - 1) = v(x)`. The logarithm is obtained by
//! Newton iteration on `E(x) = z` starting from `x0 = 0`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::local_fields::{FieldDescriptor, LocalElement, PAdicNumber};
use crate::rootfind::{hensel_solve, HenselProblem};
use crate::series::{TailProfile, TruncatedSeries};
use crate::valuation::{exp_threshold, ExtendedValuation};

type CoefficientCache = RwLock<HashMap<(u64, u64), PAdicNumber>>;

fn cache() -> &'static CoefficientCache {
    static CACHE: OnceLock<CoefficientCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `1/j!` in `Q_p` to absolute precision `prec`.
pub fn inverse_factorial(p: u64, j: u64, prec: i64) -> PAdicNumber {
    if let Some(c) = cache().read().expect("cache poisoned").get(&(p, j)) {
        if c.abs_precision() >= prec {
            return c.truncate_to(prec);
        }
    }
    let field = FieldDescriptor::padic(p).expect("prime checked by caller");
    let fact: BigInt = (1..=j).map(BigInt::from).product();
    let c = PAdicNumber::from_rational(field, &BigInt::from(1), &fact, prec).expect("nonzero factorial");
    let mut w = cache().write().expect("cache poisoned");
    let slot = w.entry((p, j)).or_insert_with(|| c.clone());
    if slot.abs_precision() < prec {
        *slot = c.clone();
    }
    c
}

/// The exponential series with `terms` stored coefficients at absolute
/// precision `prec` and the `1/j!` tail profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpSeries {
    p: u64,
    series: TruncatedSeries<PAdicNumber>,
}

impl ExpSeries {
    pub fn new(p: u64, terms: usize, prec: i64) -> Result<Self> {
        let field = FieldDescriptor::padic(p)?;
        let coeffs = (0..terms as u64).map(|j| inverse_factorial(p, j, prec)).collect();
        Ok(ExpSeries { p, series: TruncatedSeries::with_tail(field, coeffs, TailProfile::exponential(p)) })
    }

    /// Enough terms to evaluate the series and its derivative to precision
    /// `target` whenever `v(x) >= m`.
    pub fn for_target(p: u64, m: i64, target: i64) -> Result<Self> {
        let m = m.max(exp_threshold(p));
        let terms = TailProfile::exponential(p).terms_needed(m, target + m);
        Self::new(p, terms.max(2) as usize, target)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn series(&self) -> &TruncatedSeries<PAdicNumber> {
        &self.series
    }

    /// `-floor((j - 1)/(p - 1))`, a lower bound for `v(1/j!)` when `j >= 1`.
    pub fn sharpened_bound(&self, j: u64) -> i64 {
        TailProfile::sharpened(self.p, 0, 0).lower_bound(j)
    }
}

fn check_domain(x: &PAdicNumber) -> Result<i64> {
    let e_min = exp_threshold(x.field().q);
    let w = x.valuation_bound();
    if w < e_min {
        return Err(Error::DomainError(match x.valuation() {
            ExtendedValuation::Finite(v) => format!("exponential diverges at valuation {v}, needs {e_min}"),
            ExtendedValuation::Infinity => format!("argument known only to precision {w}, needs {e_min}"),
        }));
    }
    Ok(w)
}

/// `E(x)` modulo `q^target_prec`, or to the precision of `x` if lower.
pub fn exp_eval(x: &PAdicNumber, target_prec: i64) -> Result<PAdicNumber> {
    let w = check_domain(x)?;
    let field = x.field();
    if x.is_zero() {
        return Ok(PAdicNumber::one(field, target_prec.min(x.abs_precision())));
    }
    let e = ExpSeries::for_target(field.q, w, target_prec)?;
    e.series().eval(x, target_prec)
}

/// Whether `E(x + y)` and `E(x) E(y)` agree to `target_prec` (or to the
/// precision both sides carry, if lower).
pub fn exp_functional_check(x: &PAdicNumber, y: &PAdicNumber, target_prec: i64) -> Result<bool> {
    let lhs = exp_eval(&x.add(y), target_prec)?;
    let rhs = exp_eval(x, target_prec)?.mul(&exp_eval(y, target_prec)?);
    let prec = lhs.abs_precision().min(rhs.abs_precision());
    Ok(lhs.agrees_to(&rhs, prec))
}

/// The unique `x` in the domain with `E(x) = z`, modulo `q^target_prec`.
pub fn log_solve(z: &PAdicNumber, target_prec: i64) -> Result<PAdicNumber> {
    let field = z.field();
    let target = target_prec.min(z.abs_precision());
    let d = z.sub(&PAdicNumber::one(field, target));
    let m = check_domain(&d).map_err(|_| {
        Error::DomainError(format!("logarithm needs v(z - 1) >= {}", exp_threshold(field.q)))
    })?;
    if d.is_zero() {
        return Ok(PAdicNumber::zero(field, target));
    }
    let e = ExpSeries::for_target(field.q, m, target)?;
    let problem = HenselProblem {
        f: e.series().clone(),
        x0: PAdicNumber::zero(field, target),
        z: z.truncate_to(target),
        m,
        target_prec: target,
    };
    Ok(hensel_solve(&problem)?.root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::factorial_valuation;
    use proptest::prelude::*;

    fn int(p: u64, n: i64, prec: i64) -> PAdicNumber {
        PAdicNumber::from_integer(FieldDescriptor::padic(p).unwrap(), &BigInt::from(n), prec)
    }

    #[test]
    fn exp_of_five() {
        let e = exp_eval(&int(5, 5, 3), 3).unwrap();
        assert_eq!(e, int(5, 81, 3));
        assert_eq!(e.unit_digits(), vec![1, 1, 3]);
        assert_eq!(e.sub(&int(5, 1, 3)).valuation(), ExtendedValuation::Finite(1));
    }

    #[test]
    fn exp_of_zero() {
        assert_eq!(exp_eval(&int(3, 0, 10), 6).unwrap(), int(3, 1, 6));
    }

    #[test]
    fn domain() {
        assert!(matches!(exp_eval(&int(2, 2, 10), 5), Err(Error::DomainError(_))));
        assert!(exp_eval(&int(2, 4, 10), 5).is_ok());
        assert!(matches!(exp_eval(&int(7, 1, 10), 5), Err(Error::DomainError(_))));
        assert!(matches!(log_solve(&int(5, 2, 5), 5), Err(Error::DomainError(_))));
        assert!(matches!(log_solve(&int(2, 3, 5), 5), Err(Error::DomainError(_))));
    }

    #[test]
    fn log_examples() {
        assert_eq!(log_solve(&int(5, 1, 6), 6).unwrap(), int(5, 0, 6));
        assert_eq!(log_solve(&int(5, 81, 3), 3).unwrap(), int(5, 5, 3));
    }

    #[test]
    fn coefficients_match_rationals() {
        let e = ExpSeries::new(3, 12, 6).unwrap();
        let field = FieldDescriptor::padic(3).unwrap();
        let mut fact = BigInt::from(1);
        for (j, c) in e.series().coeffs().iter().enumerate() {
            if j > 0 {
                fact *= j;
            }
            let expected = PAdicNumber::from_rational(field, &BigInt::from(1), &fact, 6).unwrap();
            assert_eq!(c, &expected);
            assert_eq!(c.valuation(), ExtendedValuation::Finite(-(factorial_valuation(3, j as u64) as i64)));
            assert!(c.valuation_bound() >= e.sharpened_bound(j as u64) || j == 0);
        }
    }

    #[test]
    fn cached_coefficients_are_truncated() {
        let hi = inverse_factorial(7, 9, 20);
        let lo = inverse_factorial(7, 9, 4);
        assert_eq!(lo, hi.truncate_to(4));
        assert_eq!(inverse_factorial(7, 9, 20), hi);
    }

    fn domain_element() -> impl Strategy<Value = (u64, i64, i64)> {
        prop_oneof![Just(2u64), Just(3), Just(5), Just(7)].prop_flat_map(|p| {
            let e = exp_threshold(p);
            (Just(p), e..e + 4, 1i64..100_000)
        })
    }

    proptest! {
        #[test]
        fn isometry_and_round_trip((p, v, u) in domain_element()) {
            prop_assume!(u % p as i64 != 0);
            let field = FieldDescriptor::padic(p).unwrap();
            let x = int(p, u, 30 - v).scale_by_uniformizer(v);
            let e = exp_eval(&x, 30).unwrap();
            prop_assert_eq!(e.valuation(), ExtendedValuation::Finite(0));
            prop_assert_eq!(e.sub(&PAdicNumber::one(field, 30)).valuation(), x.valuation());
            let back = log_solve(&e, 30).unwrap();
            prop_assert!(back.agrees_to(&x, 30));
            prop_assert!(exp_eval(&x.neg(), 30).unwrap().mul(&e).agrees_to(&PAdicNumber::one(field, 30), 30));
        }

        #[test]
        fn group_law((p, v, u) in domain_element(), w in 0i64..3, u2 in 1i64..100_000) {
            let x = int(p, u, 20).scale_by_uniformizer(v);
            let y = int(p, u2, 20).scale_by_uniformizer(v + w);
            prop_assert!(exp_functional_check(&x, &y, 20).unwrap());
            prop_assert!(exp_functional_check(&int(p, 0, 20), &y, 20).unwrap());
        }
    }
}
