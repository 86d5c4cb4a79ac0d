use super::*;
use crate::local_fields::{LaurentNumber, PAdicNumber};
use crate::parallel::ExecutionMode;
use num_bigint::BigUint;
use proptest::prelude::*;

fn qp(p: u64) -> FieldDescriptor {
    FieldDescriptor::padic(p).unwrap()
}

fn int(p: u64, n: i64, prec: i64) -> PAdicNumber {
    PAdicNumber::from_integer(qp(p), &BigInt::from(n), prec)
}

fn ball(p: u64, c: i64, j: i64) -> BallSpec<PAdicNumber> {
    BallSpec::closed(&int(p, c, 16), j).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn relations() {
    use BallRelation::*;
    assert_eq!(ball_relation(&ball(5, 0, 0), &ball(5, 1, 1)).unwrap(), SecondInsideFirst);
    assert_eq!(ball_relation(&ball(5, 1, 1), &ball(5, 0, 0)).unwrap(), FirstInsideSecond);
    assert_eq!(ball_relation(&ball(5, 0, 1), &ball(5, 1, 1)).unwrap(), Disjoint);
    assert_eq!(ball_relation(&ball(5, 0, 0), &ball(5, 1, 0)).unwrap(), Equal);
    assert_eq!(ball(5, 0, 0), ball(5, 1, 0));
    assert!(ball_relation(&ball(5, 0, 0), &ball(3, 0, 0)).is_err());
}

#[test]
fn center_precision() {
    let c = int(5, 3, 2);
    assert_eq!(
        BallSpec::closed(&c, 3),
        Err(Error::InsufficientCenterPrecision { needed: 3, available: 2 })
    );
    assert_eq!(BallSpec::open(&c, 1).unwrap(), BallSpec::closed(&c, 2).unwrap());
}

#[test]
fn disjointify_examples() {
    let fam = vec![ball(3, 0, 1), ball(3, 0, 0), ball(3, 1, 1)];
    assert_eq!(maximal_disjointify(&fam), vec![ball(3, 0, 0)]);
    let fam = vec![ball(3, 1, 1), ball(3, 0, 1)];
    assert_eq!(maximal_disjointify(&fam), vec![ball(3, 0, 1), ball(3, 1, 1)]);
    assert!(maximal_disjointify::<PAdicNumber>(&[]).is_empty());
}

#[test]
fn measure_examples() {
    assert_eq!(haar_union_measure(&[ball(5, 0, 1), ball(5, 1, 1)]), rat(2, 5));
    let residues: Vec<_> = (0..7).map(|a| ball(7, a, 1)).collect();
    assert_eq!(haar_union_measure(&residues), rat(1, 1));
    assert_eq!(haar_union_measure(&[ball(7, 0, 2)]), rat(1, 49));
}

#[test]
fn scaling_examples() {
    let (fam, ratio) = scale_family(&int(7, 7, 16), &[ball(7, 0, 0)]).unwrap();
    assert_eq!(fam, vec![ball(7, 0, 1)]);
    assert_eq!(ratio, rat(1, 7));
    let fifth = PAdicNumber::from_rational(qp(5), &BigInt::from(1), &BigInt::from(5), 16).unwrap();
    let (fam, ratio) = scale_family(&fifth, &[ball(5, 0, 2)]).unwrap();
    assert_eq!(fam, vec![ball(5, 0, 1)]);
    assert_eq!(ratio, rat(5, 1));
    assert_eq!(scale_family(&int(5, 0, 16), &[ball(5, 0, 2)]), Err(Error::ZeroScalar));
}

#[test]
fn alpha_examples() {
    assert_eq!(hausdorff_alpha(qp(5), &rat(1, 1)).unwrap().as_rational(), Some(rat(1, 1)));
    assert_eq!(hausdorff_alpha(qp(5), &rat(2, 1)).unwrap().as_rational(), Some(rat(1, 2)));
    let coarse = qp(3).with_rho1_exponent(2).unwrap();
    assert_eq!(hausdorff_alpha(coarse, &rat(1, 1)).unwrap().as_rational(), Some(rat(1, 2)));
    assert_eq!(hausdorff_alpha(qp(2), &rat(2, 3)).unwrap().as_rational(), Some(rat(3, 2)));
    assert!(hausdorff_alpha(qp(2), &rat(0, 1)).is_err());
}

#[test]
fn dimension_canonical_form() {
    let a = DimensionValue::from_u64(4, 9).unwrap();
    let b = DimensionValue::from_u64(2, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.as_rational(), None);
    assert!((a.approx() - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    assert_eq!(DimensionValue::from_u64(8, 4).unwrap().as_rational(), Some(rat(3, 2)));
    assert_eq!(DimensionValue::from_u64(1, 7).unwrap().as_rational(), Some(rat(0, 1)));
}

#[test]
fn digit_set_examples() {
    let cantor = DimensionValue::from_u64(2, 3).unwrap();
    let r = digit_set_analysis(3, &[0, 2], 5, &Exponent::LogRatio(cantor.clone())).unwrap();
    assert_eq!(r.ball_count, BigUint::from(32u32));
    assert!(r.content_estimate.is_one());
    assert!((r.dimension.approx() - 0.630930).abs() < 1e-6);
    assert_eq!(digit_set_cover(3, &[0, 2], 5, ExecutionMode::Parallel).unwrap().len(), 32);

    let full = digit_set_analysis(5, &[0, 1, 2, 3, 4], 4, &Exponent::Rational(rat(1, 1))).unwrap();
    assert!(full.content_estimate.is_one());
    assert_eq!(full.dimension.as_rational(), Some(rat(1, 1)));

    let point = digit_set_analysis(5, &[0], 3, &Exponent::Rational(rat(1, 2))).unwrap();
    assert_eq!(point.dimension.as_rational(), Some(rat(0, 1)));
    assert_eq!(digit_set_analysis(5, &[], 3, &Exponent::Rational(rat(1, 1))), Err(Error::EmptyDigitSet));
    assert!(digit_set_analysis(5, &[5], 3, &Exponent::Rational(rat(1, 1))).is_err());
}

#[test]
fn content_monotone_in_depth() {
    let at = |n: u32, beta: BigRational| {
        digit_set_analysis(3, &[0, 2], n, &Exponent::Rational(beta)).unwrap().content_estimate
    };
    for n in 1..8 {
        assert!(at(n + 1, rat(2, 3)) < at(n, rat(2, 3)));
        assert!(at(n + 1, rat(3, 5)) > at(n, rat(3, 5)));
    }
}

#[test]
fn cover_modes_agree() {
    let a = digit_set_cover(5, &[1, 3, 4], 7, ExecutionMode::Parallel).unwrap();
    let b = digit_set_cover(5, &[1, 3, 4], 7, ExecutionMode::Sequential).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 3usize.pow(7));
}

fn poly(p: u64, c: &[i64]) -> TruncatedSeries<PAdicNumber> {
    TruncatedSeries::from_integers(qp(p), c, 16)
}

#[test]
fn admissible_examples() {
    let sq = poly(5, &[0, 0, 1]);
    let adm = admissible_ball(&sq, &ball(5, 1, 1)).unwrap();
    assert_eq!(adm.image, ball(5, 1, 1));
    assert_eq!(adm.scale_exponent, 0);
    // squares of 1, 6, 11, 16, 21 mod 25 are exactly the classes 1 mod 5
    let mut sq25: Vec<i64> = (0..5).map(|k| (1 + 5 * k) * (1 + 5 * k) % 25).collect();
    sq25.sort();
    assert_eq!(sq25, vec![1, 6, 11, 16, 21]);

    let affine = poly(7, &[3, 2]);
    let adm = admissible_ball(&affine, &ball(7, 5, 2)).unwrap();
    assert_eq!(adm.image, ball(7, 13, 2));

    let sq2 = poly(2, &[0, 0, 1]);
    assert!(matches!(admissible_ball(&sq2, &ball(2, 0, 0)), Err(Error::NotCertified(_))));
    assert!(matches!(admissible_ball(&sq2, &ball(2, 1, 0)), Err(Error::NotCertified(_))));
}

#[test]
fn image_measure_examples() {
    let id = poly(5, &[0, 1]);
    assert_eq!(image_measure(&id, &ball(5, 0, 0), &[ball(5, 2, 1)]).unwrap(), rat(1, 5));
    let f = poly(5, &[1, 5]);
    assert_eq!(image_measure(&f, &ball(5, 0, 0), &[ball(5, 0, 0)]).unwrap(), rat(1, 5));
    let sq = poly(5, &[0, 0, 1]);
    let sub = [ball(5, 1, 2)];
    assert_eq!(image_measure(&sq, &ball(5, 1, 1), &sub).unwrap(), rat(1, 25));
    let mapped = map_family(&sq, &ball(5, 1, 1), &sub).unwrap();
    assert_eq!(haar_union_measure(&mapped), rat(1, 25));
    assert_eq!(image_measure(&sq, &ball(5, 1, 1), &[ball(5, 2, 2)]), Err(Error::NotContained));
}

#[test]
fn laurent_balls() {
    let f3 = FieldDescriptor::laurent(3).unwrap();
    let b = |digits: &[u64], j| BallSpec::closed(&LaurentNumber::from_digits(f3, 0, digits, 8), j).unwrap();
    let fam = vec![b(&[1], 1), b(&[1, 2], 2), b(&[2, 2], 2)];
    assert_eq!(haar_union_measure(&fam), rat(4, 9));
}

/// Residues mod `p^s` covered by balls with integer centers.
fn covered(p: u64, family: &[(i64, i64)], s: u32) -> usize {
    let ps = p.pow(s) as i64;
    (0..ps)
        .filter(|&x| family.iter().any(|&(c, j)| (x - c).rem_euclid(p.pow(j as u32) as i64) == 0))
        .count()
}

fn families() -> impl Strategy<Value = (u64, Vec<(i64, i64)>)> {
    prop_oneof![Just(3u64), Just(5)].prop_flat_map(|p| {
        (Just(p), proptest::collection::vec((0i64..(p as i64).pow(3), 0i64..=3), 0..8))
    })
}

proptest! {
    #[test]
    fn measure_matches_residue_count((p, fam) in families()) {
        let balls: Vec<_> = fam.iter().map(|&(c, j)| ball(p, c, j)).collect();
        let h = haar_union_measure(&balls);
        let count = covered(p, &fam, 4);
        prop_assert_eq!(h * BigRational::from_integer(BigInt::from(p.pow(4))), BigRational::from_integer(BigInt::from(count)));

        let maximal = maximal_disjointify(&balls);
        for (i, a) in maximal.iter().enumerate() {
            for b in &maximal[i + 1..] {
                prop_assert_eq!(ball_relation(a, b).unwrap(), BallRelation::Disjoint);
            }
        }
        let back: Vec<(i64, i64)> = maximal
            .iter()
            .map(|b| (u64::try_from(b.center().reduce_mod(b.radius_exponent() as u32).unwrap()).unwrap() as i64, b.radius_exponent()))
            .collect();
        prop_assert_eq!(covered(p, &back, 4), count);
    }

    #[test]
    fn trichotomy_against_membership(p in prop_oneof![Just(2u64), Just(3)], c1 in 0i64..27, j1 in 0i64..4, c2 in 0i64..27, j2 in 0i64..4) {
        let r = ball_relation(&ball(p, c1, j1), &ball(p, c2, j2)).unwrap();
        let s = j1.max(j2) as u32;
        let in1: Vec<bool> = (0..p.pow(s) as i64).map(|x| (x - c1).rem_euclid(p.pow(j1 as u32) as i64) == 0).collect();
        let in2: Vec<bool> = (0..p.pow(s) as i64).map(|x| (x - c2).rem_euclid(p.pow(j2 as u32) as i64) == 0).collect();
        let both = in1.iter().zip(&in2).filter(|(a, b)| **a && **b).count();
        let sub12 = in1.iter().zip(&in2).all(|(a, b)| !a || *b);
        let sub21 = in1.iter().zip(&in2).all(|(a, b)| !b || *a);
        let expected = match (both, sub12, sub21) {
            (0, _, _) => BallRelation::Disjoint,
            (_, true, true) => BallRelation::Equal,
            (_, true, false) => BallRelation::FirstInsideSecond,
            (_, false, true) => BallRelation::SecondInsideFirst,
            _ => unreachable!("overlap without nesting"),
        };
        prop_assert_eq!(r, expected);
    }

    #[test]
    fn scaling_is_exact((p, fam) in families(), k in -2i64..3, u in 1i64..50) {
        prop_assume!(u % p as i64 != 0);
        let balls: Vec<_> = fam.iter().map(|&(c, j)| ball(p, c, j)).collect();
        let c = int(p, u, 20).scale_by_uniformizer(k);
        let (scaled, ratio) = scale_family(&c, &balls).unwrap();
        prop_assert_eq!(haar_union_measure(&scaled), ratio * haar_union_measure(&balls));
    }

    #[test]
    fn admissible_scaling(p in prop_oneof![Just(3u64), Just(5), Just(7)], c in proptest::collection::vec(-20i64..20, 2..5), center in 0i64..49, j in 1i64..3, x in 0i64..10_000, y in 0i64..10_000) {
        let f = poly(p, &c);
        let b = ball(p, center, j);
        if let Ok(adm) = admissible_ball(&f, &b) {
            let pj = (p as i64).pow(j as u32);
            let xe = int(p, center + pj * x, 16);
            let ye = int(p, center + pj * y, 16);
            let fx = f.eval(&xe, 16).unwrap();
            let fy = f.eval(&ye, 16).unwrap();
            let lhs = fx.sub(&fy).valuation();
            let rhs = xe.sub(&ye).valuation().shift(adm.scale_exponent);
            prop_assert_eq!(lhs.or_cap(12).min(12), rhs.or_cap(12).min(12));
            prop_assert!(adm.image.contains(&fx).unwrap());
        }
    }
}
