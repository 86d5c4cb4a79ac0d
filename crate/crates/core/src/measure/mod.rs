//! Balls, finite ball families and their Haar measure.
//!
//! Every ball is the closed ball `{y : v(y - c) >= j}` with `c` stored
//! truncated to precision `j`, so two balls are equal exactly when their
//! stored forms are. Haar measure is normalized by `H(unit ball) = 1`.

mod dimension;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_fields::{FieldDescriptor, LocalElement};
use crate::series::TruncatedSeries;

pub use dimension::{
    digit_set_analysis, digit_set_cover, hausdorff_alpha, ContentEstimate, DigitSetReport, DimensionValue, Exponent,
};

pub type RationalMeasure = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BallSpec<F: LocalElement> {
    center: F,
    radius_exponent: i64,
}

pub type BallFamily<F> = Vec<BallSpec<F>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BallRelation {
    Disjoint,
    Equal,
    FirstInsideSecond,
    SecondInsideFirst,
}

impl fmt::Display for BallRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BallRelation::Disjoint => "DISJOINT",
            BallRelation::Equal => "EQUAL",
            BallRelation::FirstInsideSecond => "FIRST_INSIDE_SECOND",
            BallRelation::SecondInsideFirst => "SECOND_INSIDE_FIRST",
        })
    }
}

impl<F: LocalElement> BallSpec<F> {
    /// The closed ball of radius `q^-j` around `center`.
    pub fn closed(center: &F, j: i64) -> Result<Self> {
        if center.abs_precision() < j {
            return Err(Error::InsufficientCenterPrecision { needed: j, available: center.abs_precision() });
        }
        Ok(BallSpec { center: center.truncate_to(j), radius_exponent: j })
    }

    /// The open ball of radius `q^-j`, which is the closed ball of radius `q^-(j+1)`.
    pub fn open(center: &F, j: i64) -> Result<Self> {
        Self::closed(center, j + 1)
    }

    pub fn center(&self) -> &F {
        &self.center
    }

    pub fn radius_exponent(&self) -> i64 {
        self.radius_exponent
    }

    pub fn field(&self) -> FieldDescriptor {
        self.center.field()
    }

    pub fn contains(&self, x: &F) -> Result<bool> {
        let j = self.radius_exponent;
        if x.abs_precision() < j {
            return Err(Error::InsufficientCenterPrecision { needed: j, available: x.abs_precision() });
        }
        Ok(x.sub(&self.center).valuation_bound() >= j)
    }

    /// `H(B) = q^-j`.
    pub fn measure(&self) -> RationalMeasure {
        q_power(self.field().q, -self.radius_exponent)
    }

    /// Radius, then the center's digits from position `j - 1` downwards.
    fn sort_key(&self) -> (i64, Vec<u64>) {
        let j = self.radius_exponent;
        let lo = self.center.valuation().or_cap(j).min(0);
        let digits = (lo..j).rev().map(|i| self.center.digit(i).unwrap_or(0)).collect();
        (j, digits)
    }
}

impl<F: LocalElement> fmt::Display for BallSpec<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({}, {})", self.center, self.radius_exponent)
    }
}

/// `q^k` as an exact rational.
pub(crate) fn q_power(q: u64, k: i64) -> BigRational {
    let b = BigInt::from(q).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

fn same_field<F: LocalElement>(a: &BallSpec<F>, b: &BallSpec<F>) -> Result<()> {
    if a.field() == b.field() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("balls over {} and {}", a.field(), b.field())))
    }
}

/// Two balls are either disjoint or nested.
pub fn ball_relation<F: LocalElement>(b1: &BallSpec<F>, b2: &BallSpec<F>) -> Result<BallRelation> {
    same_field(b1, b2)?;
    let (j1, j2) = (b1.radius_exponent, b2.radius_exponent);
    let d = b1.center.sub(&b2.center);
    if d.valuation_bound() < j1.min(j2) {
        return Ok(BallRelation::Disjoint);
    }
    Ok(match j1.cmp(&j2) {
        std::cmp::Ordering::Equal => BallRelation::Equal,
        std::cmp::Ordering::Less => BallRelation::SecondInsideFirst,
        std::cmp::Ordering::Greater => BallRelation::FirstInsideSecond,
    })
}

/// The maximal balls of the family, sorted by radius exponent and center.
pub fn maximal_disjointify<F: LocalElement>(family: &[BallSpec<F>]) -> Vec<BallSpec<F>> {
    let mut order: Vec<&BallSpec<F>> = family.iter().collect();
    order.sort_by_key(|b| b.radius_exponent);
    let mut kept_radii = BTreeSet::new();
    let mut kept_keys: HashSet<(i64, F)> = HashSet::new();
    let mut out = Vec::new();
    for b in order {
        let j = b.radius_exponent;
        let covered = kept_radii
            .range(..=j)
            .any(|&r| kept_keys.contains(&(r, b.center.truncate_to(r))));
        if !covered {
            kept_radii.insert(j);
            kept_keys.insert((j, b.center.clone()));
            out.push(b.clone());
        }
    }
    out.sort_by_key(|b| b.sort_key());
    out
}

pub fn haar_union_measure<F: LocalElement>(family: &[BallSpec<F>]) -> RationalMeasure {
    maximal_disjointify(family).iter().map(|b| b.measure()).fold(BigRational::zero(), |a, b| a + b)
}

/// Image of the family under `x -> c x`, with the measure ratio `q^-v(c)`.
pub fn scale_family<F: LocalElement>(c: &F, family: &[BallSpec<F>]) -> Result<(BallFamily<F>, RationalMeasure)> {
    let v = c.valuation().finite().ok_or(Error::ZeroScalar)?;
    let scaled = family
        .iter()
        .map(|b| BallSpec::closed(&c.mul(&b.center), b.radius_exponent + v))
        .collect::<Result<Vec<_>>>()?;
    Ok((scaled, q_power(c.field().q, -v)))
}

/// A ball on which `f` scales all distances by `q^-scale_exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleImage<F: LocalElement> {
    pub ball: BallSpec<F>,
    pub image: BallSpec<F>,
    /// `v(f'(c))`, constant on the ball.
    pub scale_exponent: i64,
}

/// Certifies that `f` maps `B` onto the ball around `f(c)` of radius
/// `q^-(j + v(f'(c)))`, via `M_2 q^-j < |f'(c)|`.
pub fn admissible_ball<F: LocalElement>(f: &TruncatedSeries<F>, ball: &BallSpec<F>) -> Result<AdmissibleImage<F>> {
    let j = ball.radius_exponent;
    let w = f.working_precision().unwrap_or(j);
    let c = ball.center.lift_to(w);
    let m = j.min(c.valuation_bound());
    let mu2 = f.sup_term_exponent(m, 2)?;
    let d = f.derivative().eval(&c, w)?;
    let dv = match d.valuation().finite() {
        Some(dv) if mu2.shift(j) > dv.into() => dv,
        Some(dv) => {
            return Err(Error::NotCertified(format!("second-order exponent {} + {j} does not exceed {dv}", mu2)))
        }
        None => return Err(Error::NotCertified("derivative vanishes at the center".into())),
    };
    let image = map_ball(f, &c, j, dv, w)?;
    Ok(AdmissibleImage { ball: ball.clone(), image, scale_exponent: dv })
}

fn map_ball<F: LocalElement>(f: &TruncatedSeries<F>, c: &F, j: i64, dv: i64, w: i64) -> Result<BallSpec<F>> {
    let fc = f.eval(&c.lift_to(w), w)?;
    BallSpec::closed(&fc, j + dv).map_err(|_| Error::InsufficientPrecision { needed: j + dv, available: w })
}

fn check_inside<F: LocalElement>(outer: &BallSpec<F>, family: &[BallSpec<F>]) -> Result<()> {
    for b in family {
        match ball_relation(b, outer)? {
            BallRelation::Equal | BallRelation::FirstInsideSecond => {}
            _ => return Err(Error::NotContained),
        }
    }
    Ok(())
}

/// Images of sub-balls of an admissible ball.
pub fn map_family<F: LocalElement>(
    f: &TruncatedSeries<F>,
    ball: &BallSpec<F>,
    family: &[BallSpec<F>],
) -> Result<BallFamily<F>> {
    let adm = admissible_ball(f, ball)?;
    check_inside(ball, family)?;
    let w = f.working_precision().unwrap_or(ball.radius_exponent);
    family.iter().map(|b| map_ball(f, &b.center, b.radius_exponent, adm.scale_exponent, w)).collect()
}

/// `H(f(E)) = |f'(c)| H(E)` for a union `E` of sub-balls of an admissible ball.
pub fn image_measure<F: LocalElement>(
    f: &TruncatedSeries<F>,
    ball: &BallSpec<F>,
    family: &[BallSpec<F>],
) -> Result<RationalMeasure> {
    let adm = admissible_ball(f, ball)?;
    check_inside(ball, family)?;
    Ok(q_power(ball.field().q, -adm.scale_exponent) * haar_union_measure(family))
}

#[cfg(test)]
mod tests;
