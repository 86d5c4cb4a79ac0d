use super::*;
use crate::local_fields::{FieldDescriptor, LaurentNumber, PAdicNumber};
use crate::series::TailProfile;
use num_bigint::BigInt;
use proptest::prelude::*;

fn qp(p: u64) -> FieldDescriptor {
    FieldDescriptor::padic(p).unwrap()
}

fn int(p: u64, n: i64, prec: i64) -> PAdicNumber {
    PAdicNumber::from_integer(qp(p), &BigInt::from(n), prec)
}

fn poly(p: u64, c: &[i64], prec: i64) -> TruncatedSeries<PAdicNumber> {
    TruncatedSeries::from_integers(qp(p), c, prec)
}

fn problem(p: u64, c: &[i64], x0: i64, target: i64, prec: i64) -> HenselProblem<PAdicNumber> {
    HenselProblem { f: poly(p, c, prec), x0: int(p, x0, prec), z: int(p, 0, prec), m: 0, target_prec: target }
}

fn residue(x: &PAdicNumber, k: u32) -> u64 {
    u64::try_from(x.reduce_mod(k).unwrap()).unwrap()
}

fn eval_mod(c: &[i64], x: u64, modulus: u64) -> u64 {
    let m = modulus as i128;
    c.iter().rev().fold(0i128, |acc, &a| (acc * x as i128 + a as i128).rem_euclid(m)) as u64
}

#[test]
fn square_root_of_two_in_q7() {
    let cert = hensel_solve(&problem(7, &[-2, 0, 1], 3, 3, 10)).unwrap();
    assert_eq!(cert.root.to_string(), "3 + 1*7 + 2*7^2 + O(7^3)");
    assert_eq!(residue(&cert.root, 3), 108);
    assert!(cert.residual_prec >= 3);
    assert!(cert.trace_is_quadratic());
    assert_eq!(cert.uniqueness_exponent, 1);

    let fixed = fixed_point_solve(&problem(7, &[-2, 0, 1], 3, 3, 10)).unwrap();
    assert_eq!(fixed.root, cert.root);
}

#[test]
fn hypothesis_report() {
    let r = check_hypotheses(&problem(7, &[-2, 0, 1], 3, 3, 10)).unwrap();
    assert!(r.h_close && r.h_quadratic && r.h_single);
    assert_eq!(r.residual, ExtendedValuation::Finite(1));
    assert_eq!(r.derivative, 0);

    let far = problem(7, &[-2, 0, 1], 1, 3, 10);
    let r = check_hypotheses(&far).unwrap();
    assert!(r.h_close && !r.h_quadratic && !r.h_single);
    assert!(matches!(hensel_solve(&far), Err(Error::HypothesesFail(_))));
    assert!(matches!(fixed_point_solve(&far), Err(Error::ContractionFails(_))));
}

#[test]
fn degenerate_derivative() {
    let p = problem(5, &[0, 0, 1], 0, 3, 8);
    assert_eq!(hensel_solve(&p), Err(Error::DerivativeIndistinguishableFromZero));
}

#[test]
fn exhausted_precision() {
    // 1 + O(7^2) cannot carry a root to seven digits
    let p = problem(7, &[-2, 0, 1], 3, 7, 2);
    assert!(matches!(hensel_solve(&p), Err(Error::PrecisionExhausted(_))));
}

#[test]
fn start_outside_ball() {
    let mut p = problem(7, &[-2, 0, 1], 3, 3, 10);
    p.m = 1;
    assert!(matches!(hensel_solve(&p), Err(Error::DomainError(_))));
}

#[test]
fn derivative_at_root_is_preserved() {
    // X^2 - 17 over Q2 needs the single-hypothesis route: root near 1 mod 8
    let f = poly(2, &[-17, 0, 1], 30);
    let x0 = int(2, 1, 30);
    let prob = HenselProblem { f: f.clone(), x0: x0.clone(), z: int(2, 0, 30), m: 0, target_prec: 20 };
    let cert = hensel_solve(&prob).unwrap();
    let d0 = f.derivative().eval(&x0, 30).unwrap().valuation();
    let d1 = f.derivative().eval(&cert.root.lift_to(30), 30).unwrap().valuation();
    assert_eq!(d0, d1);
    assert!(cert.root.mul(&cert.root).agrees_to(&int(2, 17, 30), 20));
}

#[test]
fn strassmann_examples() {
    let r = strassmann_bound(&poly(3, &[0, -1, 0, 1], 10), 0).unwrap();
    assert_eq!(r.bound_n, 3);
    assert_eq!(r.max_term, 0);
    assert_eq!(r.level_bound, Some(3));

    // 3 + 9X + X^2 on |x| <= 1/3: terms 1, 3, 2 -> maximal term at j = 0
    let r = strassmann_bound(&poly(3, &[3, 9, 1], 10), 1).unwrap();
    assert_eq!(r.bound_n, 0);
    assert_eq!(r.level_bound, Some(2));

    assert_eq!(
        strassmann_bound(&poly(5, &[0, 0], 4), 0),
        Err(Error::AllCoefficientsIndistinguishableFromZero)
    );
    let tailed = TruncatedSeries::with_tail(qp(5), vec![int(5, 1, 4)], TailProfile::flat(-5));
    assert!(matches!(strassmann_bound(&tailed, 1), Err(Error::TailInconclusive(_))));
    let exp_tail = TruncatedSeries::with_tail(qp(2), vec![int(2, 1, 4)], TailProfile::exponential(2));
    assert_eq!(strassmann_bound(&exp_tail, 1), Err(Error::InadmissibleRadius(1)));
}

#[test]
fn unknown_top_coefficient_is_inconclusive() {
    // nothing is known about the coefficient of X^2
    let f = TruncatedSeries::polynomial(qp(3), vec![int(3, 1, 5), int(3, 1, 5), int(3, 0, 0)]);
    assert!(matches!(strassmann_bound(&f, 0), Err(Error::TailInconclusive(_))));
}

#[test]
fn roots_of_cubic() {
    let f = poly(3, &[0, -1, 0, 1], 12);
    let roots = enumerate_roots(&f, 0, 4, 6, ExecutionMode::Parallel).unwrap();
    let residues: Vec<u64> = roots.iter().map(|c| residue(&c.root, 6)).collect();
    assert_eq!(residues, vec![0, 1, 728]);
}

#[test]
fn double_root_is_undecided() {
    let f = poly(5, &[0, 0, 1], 10);
    assert!(matches!(
        enumerate_roots(&f, 0, 3, 4, ExecutionMode::Sequential),
        Err(Error::UndecidedMultipleRoot(_))
    ));
}

#[test]
fn no_roots() {
    // X^2 - 3 has no root in Q_7
    let f = poly(7, &[-3, 0, 1], 10);
    assert!(enumerate_roots(&f, 0, 3, 4, ExecutionMode::Parallel).unwrap().is_empty());
}

#[test]
fn laurent_root() {
    // X^2 - (1 + T) over F_3((T))
    let field = FieldDescriptor::laurent(3).unwrap();
    let c = LaurentNumber::from_digits(field, 0, &[1, 1], 12);
    let f = TruncatedSeries::polynomial(
        field,
        vec![c.neg(), LaurentNumber::zero(field, 12), LaurentNumber::one(field, 12)],
    );
    let roots = enumerate_roots(&f, 0, 3, 8, ExecutionMode::Sequential).unwrap();
    assert_eq!(roots.len(), 2);
    for r in &roots {
        assert!(r.root.mul(&r.root).agrees_to(&c, 8));
    }
}

fn square_root_cases() -> impl Strategy<Value = (u64, i64)> {
    prop_oneof![Just(3u64), Just(5), Just(7), Just(11)].prop_flat_map(|p| {
        let m = (p as i64).pow(8);
        (Just(p), 1..m)
    })
}

proptest! {
    #[test]
    fn square_roots_match_exhaustive_search((p, a) in square_root_cases()) {
        prop_assume!(a % p as i64 != 0);
        let p8 = (p as i64).pow(8);
        let c = (a * a) % p8;
        let x0 = a % p as i64;
        let prob = problem(p, &[-c, 0, 1], x0, 8, 12);
        let cert = hensel_solve(&prob).unwrap();
        let fixed = fixed_point_solve(&prob).unwrap();
        prop_assert_eq!(&cert.root, &fixed.root);
        prop_assert!(cert.trace_is_quadratic());
        prop_assert!(cert.residual_prec >= 8);
        prop_assert!(cert.root.mul(&cert.root).agrees_to(&int(p, c, 12), 8));
        let p4 = p.pow(4);
        let expected: Vec<u64> = (0..p4)
            .filter(|&x| x % p == x0 as u64 && (x * x) % p4 == (c as u64) % p4)
            .collect();
        prop_assert_eq!(expected, vec![residue(&cert.root, 4)]);
    }

    #[test]
    fn quadratic_law_along_newton(p in prop_oneof![Just(3u64), Just(5)], c in proptest::collection::vec(-40i64..40, 2..5), x0 in 0i64..25) {
        let prob = problem(p, &c, x0, 10, 24);
        if let Ok(cert) = hensel_solve(&prob) {
            prop_assert!(cert.trace_is_quadratic());
            prop_assert!(cert.residual_prec >= 10);
            let fixed = fixed_point_solve(&prob);
            if let Ok(fixed) = fixed {
                prop_assert_eq!(fixed.root, cert.root);
            }
        }
    }

    #[test]
    fn enumerated_roots_are_consistent(p in prop_oneof![Just(3u64), Just(5)], c in proptest::collection::vec(0i64..625, 2..6)) {
        let f = poly(p, &c, 24);
        let Ok(bound) = strassmann_bound(&f, 0) else { return Ok(()) };
        let p4 = p.pow(4);
        let Ok(roots) = enumerate_roots(&f, 0, 6, 4, ExecutionMode::Parallel) else { return Ok(()) };
        let seq = enumerate_roots(&f, 0, 6, 4, ExecutionMode::Sequential).unwrap();
        prop_assert_eq!(&roots, &seq);
        prop_assert!(roots.len() <= bound.bound_n);
        for r in &roots {
            prop_assert_eq!(eval_mod(&c, residue(&r.root, 4), p4), 0);
        }
        // simple roots mod p always lift
        let deriv: Vec<i64> = c.iter().enumerate().skip(1).map(|(j, &a)| j as i64 * a).collect();
        let simple = (0..p).filter(|&x| eval_mod(&c, x, p) == 0 && eval_mod(&deriv, x, p) != 0).count();
        prop_assert!(roots.len() >= simple);
    }
}
