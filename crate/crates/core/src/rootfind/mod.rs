//! Solving `f(x) = z` near a starting point, and counting zeros in a ball.
//!
//! All hypotheses are decided with integer exponents: with `e = v(z - f(x0))`,
//! `dv = v(f'(x0))`, `mu_k` the exponent of `M_k(q^-m)`, the three flags are
//!
//! * close: `e >= dv + m`
//! * quadratic: `mu_2 + e > 2 dv`
//! * single: `mu_1 - m + e > 2 dv`

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::local_fields::LocalElement;
use crate::parallel::{map_collect, ExecutionMode};
use crate::series::{RadiusExponent, TruncatedSeries};
use crate::valuation::{ExtendedValuation, Magnitude};

#[derive(Debug, Clone)]
pub struct HenselProblem<F: LocalElement> {
    pub f: TruncatedSeries<F>,
    pub x0: F,
    pub z: F,
    /// The iteration stays inside `|x| <= q^-m`.
    pub m: RadiusExponent,
    pub target_prec: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypothesisReport {
    pub h_close: bool,
    pub h_quadratic: bool,
    pub h_single: bool,
    /// `v(z - f(x0))`.
    pub residual: ExtendedValuation,
    /// `v(f'(x0))`.
    pub derivative: i64,
    pub mu1: ExtendedValuation,
    pub mu2: ExtendedValuation,
}

impl HypothesisReport {
    pub fn sufficient(&self) -> bool {
        (self.h_close && self.h_quadratic) || self.h_single
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootCertificate<F: LocalElement> {
    pub root: F,
    /// `f(root) = z + O(q^residual_prec)`.
    pub residual_prec: i64,
    /// No other solution with `v(x - x0) >= uniqueness_exponent`.
    pub uniqueness_exponent: i64,
    /// `b_l = M_2 |z - f(x_l)| / |f'(x0)|^2` for each iterate.
    pub b_trace: Vec<Magnitude>,
}

impl<F: LocalElement> RootCertificate<F> {
    /// Whether `b_(l+1) <= b_l^2` along the whole trace.
    pub fn trace_is_quadratic(&self) -> bool {
        self.b_trace.windows(2).all(|w| {
            let sq = w[0].pow(2).expect("nonnegative power");
            w[1].compare(&sq).map(|o| o != Ordering::Greater).unwrap_or(false)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrassmannReport {
    /// At most this many zeros in the closed ball of radius `q^-m`.
    pub bound_n: usize,
    /// Largest `j` maximizing `|a_j| q^(-jm)`; equal to `bound_n`.
    pub attaining_index: usize,
    /// `min_j v(a_j) + j m`.
    pub max_term: i64,
    /// The same index computed over `j >= 1`: a bound on the number of
    /// solutions of `f(x) = z` for every `z`. `None` if undecidable.
    pub level_bound: Option<usize>,
}

/// Quantities shared by the two solvers.
struct Setup<F: LocalElement> {
    report: HypothesisReport,
    working: i64,
    x0: F,
    alpha: F,
}

fn setup<F: LocalElement>(problem: &HenselProblem<F>) -> Result<Setup<F>> {
    let f = &problem.f;
    let m = problem.m;
    let working = f.working_precision().unwrap_or(problem.z.abs_precision()).min(problem.z.abs_precision());
    let x0 = problem.x0.lift_to(working);
    if x0.valuation_bound() < m {
        return Err(Error::DomainError(format!(
            "starting point has valuation {}, outside the ball of radius exponent {m}",
            x0.valuation()
        )));
    }
    let mu1 = f.sup_term_exponent(m, 1)?;
    let mu2 = f.sup_term_exponent(m, 2)?;
    let alpha = f.derivative().eval(&x0, working)?;
    let dv = match alpha.valuation() {
        ExtendedValuation::Finite(v) => v,
        ExtendedValuation::Infinity => return Err(Error::DerivativeIndistinguishableFromZero),
    };
    let residual = problem.z.sub(&f.eval(&x0, working)?).valuation();
    let report = HypothesisReport {
        h_close: residual >= ExtendedValuation::Finite(dv + m),
        h_quadratic: mu2 + residual > ExtendedValuation::Finite(2 * dv),
        h_single: mu1.shift(-m) + residual > ExtendedValuation::Finite(2 * dv),
        residual,
        derivative: dv,
        mu1,
        mu2,
    };
    debug_assert!(!report.h_single || (report.h_close && report.h_quadratic));
    Ok(Setup { report, working, x0, alpha })
}

pub fn check_hypotheses<F: LocalElement>(problem: &HenselProblem<F>) -> Result<HypothesisReport> {
    Ok(setup(problem)?.report)
}

enum Step {
    Newton,
    Fixed,
}

fn iterate<F: LocalElement>(problem: &HenselProblem<F>, s: &Setup<F>, step: Step) -> Result<RootCertificate<F>> {
    let f = &problem.f;
    let fp = f.derivative();
    let dv = s.report.derivative;
    let target = problem.target_prec;
    let goal = target + dv;
    let w = s.working;
    if w < goal {
        return Err(Error::PrecisionExhausted(format!(
            "precision {target} needs working precision {goal}, inputs carry {w}"
        )));
    }
    let field = f.field();
    let b_of = |e: ExtendedValuation| field.magnitude(s.report.mu2 + e.shift(-2 * dv));
    let mut x = s.x0.clone();
    let mut b_trace = Vec::new();
    let limit = 4 * goal.max(1) + 64;
    for _ in 0..limit {
        let r = problem.z.sub(&f.eval(&x, w)?);
        if r.abs_precision() < goal {
            return Err(Error::PrecisionExhausted(format!(
                "residual known only to precision {}",
                r.abs_precision()
            )));
        }
        b_trace.push(b_of(r.valuation()));
        if r.valuation_bound() >= goal {
            let root = x.truncate_to(target);
            let check = problem.z.sub(&f.eval(&root.lift_to(w), w)?);
            let uniqueness_exponent = s.report.residual.or_cap(w) - dv;
            return Ok(RootCertificate { root, residual_prec: check.valuation_bound(), uniqueness_exponent, b_trace });
        }
        let d = match step {
            Step::Fixed => s.alpha.clone(),
            Step::Newton => {
                let d = fp.eval(&x, w)?;
                if d.is_zero() {
                    return Err(Error::DerivativeIndistinguishableFromZero);
                }
                d
            }
        };
        x = x.add(&r.div(&d)?).lift_to(w);
    }
    Err(Error::PrecisionExhausted(format!("no convergence after {limit} steps")))
}

/// Newton iteration `x <- x + f'(x)^-1 (z - f(x))` under the Hensel hypotheses.
pub fn hensel_solve<F: LocalElement>(problem: &HenselProblem<F>) -> Result<RootCertificate<F>> {
    let s = setup(problem)?;
    if !s.report.sufficient() {
        return Err(Error::HypothesesFail(format!(
            "close={}, quadratic={}, single={}",
            s.report.h_close, s.report.h_quadratic, s.report.h_single
        )));
    }
    iterate(problem, &s, Step::Newton)
}

/// Fixed point of `h(x) = x + f'(x0)^-1 (z - f(x))`, a contraction when
/// `t M_2 < |f'(x0)|` with `t = |z - f(x0)| / |f'(x0)|`.
pub fn fixed_point_solve<F: LocalElement>(problem: &HenselProblem<F>) -> Result<RootCertificate<F>> {
    let s = setup(problem)?;
    let dv = s.report.derivative;
    let t = s.report.residual.shift(-dv);
    if t < ExtendedValuation::Finite(problem.m) {
        return Err(Error::ContractionFails(format!("radius exponent {t} leaves the domain")));
    }
    if s.report.mu2 + t <= ExtendedValuation::Finite(dv) {
        return Err(Error::ContractionFails(format!(
            "Lipschitz exponent {} does not beat {dv}",
            s.report.mu2 + t
        )));
    }
    iterate(problem, &s, Step::Fixed)
}

/// Largest index attaining `min_{j >= start} v(a_j) + j m`, checking that
/// unknown coefficients cannot tie or win beyond it.
fn strassmann_index<F: LocalElement>(f: &TruncatedSeries<F>, m: RadiusExponent, start: usize) -> Result<(usize, i64)> {
    let coeffs = f.coeffs();
    let mut best: Option<(usize, i64)> = None;
    for (j, a) in coeffs.iter().enumerate().skip(start) {
        if let ExtendedValuation::Finite(v) = a.valuation() {
            let g = v + j as i64 * m;
            if best.is_none_or(|(_, b)| g <= b) {
                best = Some((j, g));
            }
        }
    }
    let (n, value) = best.ok_or(Error::AllCoefficientsIndistinguishableFromZero)?;
    for (j, a) in coeffs.iter().enumerate().skip(n + 1) {
        if a.is_zero() && a.abs_precision() + j as i64 * m <= value {
            return Err(Error::TailInconclusive(format!(
                "coefficient {j} is unknown beyond precision {}",
                a.abs_precision()
            )));
        }
    }
    if let Some(t) = f.tail() {
        let rest = t.min_term(coeffs.len() as u64, m);
        if rest <= value {
            return Err(Error::TailInconclusive(format!(
                "tail bound {rest} does not exceed the maximal term {value}"
            )));
        }
    }
    Ok((n, value))
}

pub fn strassmann_bound<F: LocalElement>(f: &TruncatedSeries<F>, m: RadiusExponent) -> Result<StrassmannReport> {
    if let Some(t) = f.tail() {
        if !t.admits(m) {
            return Err(Error::InadmissibleRadius(m));
        }
    }
    let (n, max_term) = strassmann_index(f, m, 0)?;
    let level_bound = strassmann_index(f, m, 1).ok().map(|(n, _)| n);
    Ok(StrassmannReport { bound_n: n, attaining_index: n, max_term, level_bound })
}

enum Outcome<F: LocalElement> {
    Excluded,
    Root(Box<RootCertificate<F>>),
    Refine(Vec<F>),
    Undecided(String),
}

/// All zeros of `f` in `|x| <= q^-m`, to `target_prec` digits.
///
/// The ball is split into residue classes `c + q^rho Z`. A class is dropped
/// when the second-order estimate shows `f` cannot vanish on it, solved by
/// Newton iteration when `f` is injective on it (`mu_2 + rho > v(f'(c))`),
/// and otherwise split further, at most `scan_depth` digits below `m`.
pub fn enumerate_roots<F: LocalElement>(
    f: &TruncatedSeries<F>,
    m: RadiusExponent,
    scan_depth: u32,
    target_prec: i64,
    mode: ExecutionMode,
) -> Result<Vec<RootCertificate<F>>> {
    let field = f.field();
    let q = field.q;
    let w = f.working_precision().ok_or(Error::AllCoefficientsIndistinguishableFromZero)?;
    let mu2 = f.sup_term_exponent(m, 2)?;
    let fp = f.derivative();
    let zero = F::zero(field, w);
    let mut level: Vec<F> = (0..q).map(|a| F::from_digits(field, m, &[a], w)).collect();
    let mut rho = m + 1;
    let mut roots = Vec::new();
    while !level.is_empty() {
        let classify = |c: F| -> Result<Outcome<F>> {
            let e = f.eval(&c, w)?.valuation();
            let d = fp.eval(&c, w)?;
            let dv = d.valuation_bound();
            let reach = ExtendedValuation::Finite(dv + rho).min(mu2.shift(2 * rho));
            if e < reach {
                return Ok(Outcome::Excluded);
            }
            if !d.is_zero() && mu2.shift(rho) > ExtendedValuation::Finite(dv) {
                let problem = HenselProblem { f: f.clone(), x0: c, z: zero.clone(), m, target_prec };
                return Ok(Outcome::Root(Box::new(hensel_solve(&problem)?)));
            }
            if rho - m >= scan_depth as i64 {
                return Ok(Outcome::Undecided(format!("{}@{rho}", c.truncate_to(rho))));
            }
            Ok(Outcome::Refine(
                (0..q).map(|a| c.add(&F::from_digits(field, rho, &[a], w))).collect(),
            ))
        };
        let outcomes = map_collect(mode, level, classify);
        let mut next = Vec::new();
        for outcome in outcomes {
            match outcome? {
                Outcome::Excluded => {}
                Outcome::Root(cert) => roots.push(*cert),
                Outcome::Refine(children) => next.extend(children),
                Outcome::Undecided(class) => return Err(Error::UndecidedMultipleRoot(class)),
            }
        }
        level = next;
        rho += 1;
    }
    let key = |c: &RootCertificate<F>| -> Vec<u64> {
        (m.min(0)..target_prec).rev().map(|i| c.root.digit(i).unwrap_or(0)).collect()
    };
    roots.sort_by_key(key);
    roots.dedup_by(|a, b| key(a) == key(b));
    Ok(roots)
}

#[cfg(test)]
mod tests;
