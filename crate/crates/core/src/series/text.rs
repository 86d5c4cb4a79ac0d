//! Series literals: `a0 + a1*X + a2*X^2 - ... [+ tail:<kind>]`.
//!
//! Coefficients are integers, rationals `a/b`, or parenthesized element
//! literals. Tail kinds are `exp` (the `1/j!` profile, p-adic only), `geom`
//! (all coefficients integral) and `flat:<v>` (all valuations at least `v`).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;

use super::{Growth, TailProfile, TruncatedSeries};
use crate::error::{Error, Result};
use crate::local_fields::text::{element_at, parse_err, Cursor};
use crate::local_fields::{FieldDescriptor, FieldKind, LocalElement};

impl fmt::Display for TailProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.growth {
            Growth::Flat if self.offset == 0 => f.write_str("geom"),
            Growth::Flat => write!(f, "flat:{}", self.offset),
            Growth::Legendre { shift: 0, .. } if self.offset == 0 => f.write_str("exp"),
            Growth::Legendre { p, shift } => write!(f, "legendre({p},{},{shift})", self.offset),
            Growth::Sharpened { p, shift } => write!(f, "sharpened({p},{},{shift})", self.offset),
        }
    }
}

pub fn render_series<F: LocalElement>(f: &TruncatedSeries<F>) -> String {
    let mut parts = Vec::new();
    for (j, a) in f.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        parts.push(match j {
            0 => format!("({a})"),
            1 => format!("({a})*X"),
            _ => format!("({a})*X^{j}"),
        });
    }
    if parts.is_empty() {
        if let Some(a) = f.coeffs().first() {
            parts.push(format!("({a})"));
        } else {
            parts.push("0".to_string());
        }
    }
    if let Some(t) = f.tail() {
        parts.push(format!("tail:{t}"));
    }
    parts.join(" + ")
}

fn parse_tail(c: &mut Cursor<'_>, field: FieldDescriptor) -> Result<TailProfile> {
    let at = c.at();
    let rest = c.rest().trim_end();
    let word_len = rest.find(|ch: char| !ch.is_ascii_alphabetic()).unwrap_or(rest.len());
    let word = &rest[..word_len];
    c.pos += word_len;
    match word {
        "exp" if field.kind == FieldKind::PAdic => Ok(TailProfile::exponential(field.q)),
        "exp" => Err(Error::DomainError("exponential tail needs a p-adic field".into())),
        "geom" => Ok(TailProfile::flat(0)),
        "flat" => {
            c.expect(b':')?;
            let neg = c.eat(b'-');
            let at = c.at();
            let v = c.number()?.to_i64().ok_or(Error::Parse { position: at, message: "offset too large".into() })?;
            Ok(TailProfile::flat(if neg { -v } else { v }))
        }
        _ => parse_err(at, "unknown tail kind, expected exp, geom or flat:<v>"),
    }
}

fn coefficient<F: LocalElement>(c: &mut Cursor<'_>, field: FieldDescriptor, prec: i64) -> Result<F> {
    if c.eat(b'(') {
        let x = element_at(c, field, prec)?;
        c.expect(b')')?;
        return Ok(x);
    }
    let num = c.number()?;
    let den = if c.eat(b'/') {
        let at = c.at();
        let d = c.number()?;
        if d == 0.into() {
            return parse_err(at, "zero denominator");
        }
        d
    } else {
        1.into()
    };
    F::from_rational(field, &num, &den, prec)
}

/// Parses a series literal; bare coefficients get absolute precision `prec`.
pub fn parse_series<F: LocalElement>(
    s: &str,
    field: FieldDescriptor,
    prec: i64,
) -> Result<TruncatedSeries<F>> {
    let mut c = Cursor::new(s, 0);
    let mut terms: BTreeMap<usize, F> = BTreeMap::new();
    let mut tail = None;
    let mut negate = c.eat(b'-');
    loop {
        if c.rest().trim_start().starts_with("tail:") {
            if negate {
                return parse_err(c.at(), "a tail cannot be negated");
            }
            c.skip_ws();
            c.pos += "tail:".len();
            tail = Some(parse_tail(&mut c, field)?);
            break;
        }
        let (coef, degree) = if c.peek() == Some(b'X') {
            (F::one(field, prec), monomial(&mut c)?)
        } else {
            let a: F = coefficient(&mut c, field, prec)?;
            let d = if c.eat(b'*') {
                if c.peek() != Some(b'X') {
                    return parse_err(c.at(), "expected X");
                }
                monomial(&mut c)?
            } else {
                0
            };
            (a, d)
        };
        let coef = if negate { coef.neg() } else { coef };
        let entry = terms.remove(&degree);
        terms.insert(degree, match entry {
            Some(prev) => prev.add(&coef),
            None => coef,
        });
        if c.eat(b'+') {
            negate = false;
        } else if c.eat(b'-') {
            negate = true;
        } else {
            break;
        }
    }
    if !c.done() {
        return parse_err(c.at(), "unexpected trailing input");
    }
    let len = terms.keys().next_back().map_or(0, |&d| d + 1);
    let coeffs = (0..len)
        .map(|j| terms.remove(&j).unwrap_or_else(|| F::zero(field, prec)))
        .collect();
    Ok(TruncatedSeries { field, coeffs, tail })
}

/// Parses `X` or `X^k` and returns `k`.
fn monomial(c: &mut Cursor<'_>) -> Result<usize> {
    c.expect(b'X')?;
    if !c.eat(b'^') {
        return Ok(1);
    }
    let at = c.at();
    c.number()?
        .to_usize()
        .filter(|&k| k < 100_000)
        .ok_or(Error::Parse { position: at, message: "degree too large".into() })
}
