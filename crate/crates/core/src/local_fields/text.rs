//! Text format for field elements.
//!
//! ```text
//! [S^v *] d0 + d1*S + d2*S^2 + ... + O(S^N)
//! ```
//!
//! `S` is the prime numeral (or `p`) for `Q_p` and `T` for `F_q((T))`. The
//! optional leading factor scales the whole digit sum; `N` is the absolute
//! precision. Rational shorthand `a/b` and plain integers are also accepted.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{FieldDescriptor, FieldKind, LocalElement};
use crate::error::{Error, Result};
use crate::valuation::ExtendedValuation;

pub(crate) fn parse_err<T>(position: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { position, message: message.into() })
}

/// Renders an element in the canonical text format.
pub fn render_element<F: LocalElement>(x: &F) -> String {
    let field = x.field();
    let sym = field.uniformizer_symbol();
    let prec = x.abs_precision();
    let tail = format!("O({sym}^{prec})");
    let v = match x.valuation() {
        ExtendedValuation::Infinity => return tail,
        ExtendedValuation::Finite(v) => v,
    };
    let mut parts = Vec::new();
    for (i, d) in x.unit_digits().into_iter().enumerate() {
        if d == 0 {
            continue;
        }
        parts.push(match i {
            0 => d.to_string(),
            1 => format!("{d}*{sym}"),
            _ => format!("{d}*{sym}^{i}"),
        });
    }
    parts.push(tail);
    let body = parts.join(" + ");
    if v == 0 {
        body
    } else {
        format!("{sym}^{v} * {body}")
    }
}

/// Renders an exact rational as `a` or `a/b`.
pub fn render_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Small byte cursor shared by the literal parsers.
pub(crate) struct Cursor<'a> {
    src: &'a [u8],
    pub pos: usize,
    offset: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str, offset: usize) -> Self {
        Cursor { src: src.as_bytes(), pos: 0, offset }
    }

    pub fn at(&self) -> usize {
        self.offset + self.pos
    }

    pub fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            parse_err(self.at(), format!("expected '{}'", c as char))
        }
    }

    pub fn done(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn rest(&self) -> &'a str {
        std::str::from_utf8(&self.src[self.pos..]).unwrap_or("")
    }

    /// Unsigned decimal integer.
    pub fn number(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return parse_err(self.offset + start, "expected a number");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("validated digits"))
    }

    /// Signed exponent, optionally parenthesized: `3`, `-2`, `(-2)`.
    pub fn exponent(&mut self) -> Result<i64> {
        let paren = self.eat(b'(');
        let neg = self.eat(b'-');
        let at = self.at();
        let n = self.number()?;
        if paren {
            self.expect(b')')?;
        }
        let n = n.to_i64().ok_or(Error::Parse { position: at, message: "exponent too large".into() })?;
        Ok(if neg { -n } else { n })
    }
}

/// Parses `a`, `-a` or `a/b` as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let mut c = Cursor::new(s, 0);
    let r = rational_at(&mut c)?;
    if !c.done() {
        return parse_err(c.at(), "unexpected trailing input");
    }
    Ok(r)
}

pub(crate) fn rational_at(c: &mut Cursor<'_>) -> Result<BigRational> {
    let neg = c.eat(b'-');
    let num = c.number()?;
    let mut den = BigInt::from(1);
    if c.eat(b'/') {
        let at = c.at();
        den = c.number()?;
        if den.is_zero() {
            return parse_err(at, "zero denominator");
        }
    }
    let num = if neg { -num } else { num };
    Ok(BigRational::new(num, den))
}

fn is_rational_literal(s: &str) -> bool {
    let s = s.trim();
    let s = s.strip_prefix('-').unwrap_or(s);
    let mut parts = s.splitn(2, '/');
    let ok = |p: Option<&str>| p.is_some_and(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()));
    let first = parts.next();
    match parts.next() {
        None => ok(first),
        second => ok(first) && ok(second),
    }
}

/// Element from an exact rational at absolute precision `prec`.
pub fn element_from_rational<F: LocalElement>(field: FieldDescriptor, r: &BigRational, prec: i64) -> Result<F> {
    F::from_rational(field, r.numer(), r.denom(), prec)
}

/// Parses an element literal; `default_prec` applies when no `O(...)` term is given.
pub fn parse_element<F: LocalElement>(s: &str, field: FieldDescriptor, default_prec: i64) -> Result<F> {
    let mut c = Cursor::new(s, 0);
    let x = element_at(&mut c, field, default_prec)?;
    if !c.done() {
        return parse_err(c.at(), "unexpected trailing input");
    }
    Ok(x)
}

/// Parses an element at the cursor, stopping before anything it cannot consume.
pub(crate) fn element_at<F: LocalElement>(c: &mut Cursor<'_>, field: FieldDescriptor, default_prec: i64) -> Result<F> {
    let rest = c.rest();
    let end = rest.find(')').unwrap_or(rest.len());
    if is_rational_literal(&rest[..end]) {
        let r = rational_at(c)?;
        return element_from_rational(field, &r, default_prec);
    }
    DigitParser { field, default_prec }.parse(c)
}

struct DigitParser {
    field: FieldDescriptor,
    default_prec: i64,
}

enum Term {
    Coefficient(BigInt, i64),
    Big(i64),
    Precision(i64),
}

impl DigitParser {
    fn eat_symbol(&self, c: &mut Cursor<'_>) -> bool {
        match self.field.kind {
            FieldKind::PAdic => c.eat(b'p'),
            FieldKind::Laurent => c.eat(b'T'),
        }
    }

    /// Parses `S` or `S^e` after the caller has matched the symbol.
    fn power_tail(&self, c: &mut Cursor<'_>) -> Result<i64> {
        if c.eat(b'^') {
            c.exponent()
        } else {
            Ok(1)
        }
    }

    fn symbol_power(&self, c: &mut Cursor<'_>) -> Result<i64> {
        if self.eat_symbol(c) {
            return self.power_tail(c);
        }
        let at = c.at();
        if self.field.kind == FieldKind::PAdic {
            if let Ok(n) = c.number() {
                if n == BigInt::from(self.field.q) {
                    return self.power_tail(c);
                }
            }
        }
        parse_err(at, format!("expected uniformizer {}", self.field.uniformizer_symbol()))
    }

    fn term(&self, c: &mut Cursor<'_>) -> Result<Term> {
        if c.peek() == Some(b'O') {
            c.pos += 1;
            c.expect(b'(')?;
            let e = self.symbol_power(c)?;
            c.expect(b')')?;
            return Ok(Term::Precision(e));
        }
        if self.eat_symbol(c) {
            return Ok(Term::Big(self.power_tail(c)?));
        }
        let n = c.number()?;
        if c.eat(b'*') {
            // `d * S^e` unless this is the leading `S^v *` factor, handled by caller
            let e = self.symbol_power(c)?;
            return Ok(Term::Coefficient(n, e));
        }
        if c.peek() == Some(b'^') {
            if self.field.kind == FieldKind::PAdic && n == BigInt::from(self.field.q) {
                c.pos += 1;
                return Ok(Term::Big(c.exponent()?));
            }
            return parse_err(c.at(), "only the uniformizer may carry an exponent");
        }
        Ok(Term::Coefficient(n, 0))
    }

    fn parse<F: LocalElement>(&self, c: &mut Cursor<'_>) -> Result<F> {
        let mut shift = 0i64;
        let mut coeffs: BTreeMap<i64, BigInt> = BTreeMap::new();
        let mut prec: Option<i64> = None;
        let mut first = true;
        loop {
            let at = c.at();
            let term = self.term(c)?;
            match term {
                Term::Big(e) if first && c.peek() == Some(b'*') => {
                    c.pos += 1;
                    shift = e;
                    first = false;
                    continue;
                }
                Term::Big(e) => *coeffs.entry(e).or_default() += 1,
                Term::Coefficient(n, e) => *coeffs.entry(e).or_default() += n,
                Term::Precision(n) => {
                    if prec.is_some() {
                        return parse_err(at, "duplicate precision term");
                    }
                    prec = Some(n);
                }
            }
            first = false;
            if !c.eat(b'+') {
                break;
            }
        }
        let prec = prec.unwrap_or(self.default_prec);
        let lo = match coeffs.keys().next() {
            None => return Ok(F::zero(self.field, prec)),
            Some(&lo) => lo,
        };
        let hi = *coeffs.keys().next_back().expect("nonempty");
        let mut value = BigInt::zero();
        let q = BigInt::from(self.field.q);
        match self.field.kind {
            FieldKind::PAdic => {
                for e in (lo..=hi).rev() {
                    value = value * &q + coeffs.get(&e).cloned().unwrap_or_default();
                }
                let base = shift + lo;
                Ok(F::from_integer(self.field, &value, prec - base).scale_by_uniformizer(base))
            }
            FieldKind::Laurent => {
                let digits: Vec<u64> = (lo..=hi)
                    .map(|e| {
                        let c = coeffs.get(&e).cloned().unwrap_or_default();
                        (c % &q).to_u64().expect("reduced")
                    })
                    .collect();
                Ok(F::from_digits(self.field, shift + lo, &digits, prec))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_fields::{LaurentNumber, PAdicNumber};

    fn q5() -> FieldDescriptor {
        FieldDescriptor::padic(5).unwrap()
    }

    #[test]
    fn renders_spec_format() {
        let f = FieldDescriptor::padic(7).unwrap();
        let x = PAdicNumber::from_integer(f, &BigInt::from(108), 3);
        assert_eq!(x.to_string(), "3 + 1*7 + 2*7^2 + O(7^3)");
        let y = PAdicNumber::from_integer(q5(), &BigInt::from(5), 3);
        assert_eq!(y.to_string(), "5^1 * 1 + O(5^3)");
        assert_eq!(PAdicNumber::zero(q5(), 4).to_string(), "O(5^4)");
    }

    #[test]
    fn parses_digit_forms() {
        let x: PAdicNumber = parse_element("3 + 1*7 + 2*7^2 + O(7^3)", FieldDescriptor::padic(7).unwrap(), 10).unwrap();
        assert_eq!(x, PAdicNumber::from_integer(FieldDescriptor::padic(7).unwrap(), &BigInt::from(108), 3));
        let y: PAdicNumber = parse_element("5^-2 * 1 + 3*5 + O(5^1)", q5(), 10).unwrap();
        assert_eq!(y.valuation(), ExtendedValuation::Finite(-2));
        assert_eq!(y.unit_digits(), vec![1, 3, 0]);
        let z: PAdicNumber = parse_element("p^2 * 4 + O(p^6)", q5(), 10).unwrap();
        assert_eq!(z.valuation(), ExtendedValuation::Finite(2));
        assert_eq!(z.abs_precision(), 6);
        let h: PAdicNumber = parse_element("1/2", q5(), 3).unwrap();
        assert_eq!(h.unit_digits(), vec![3, 2, 2]);
    }

    #[test]
    fn parses_laurent() {
        let f = FieldDescriptor::laurent(3).unwrap();
        let x: LaurentNumber = parse_element("T^-1 * 2 + 1*T + O(T^4)", f, 10).unwrap();
        assert_eq!(x.valuation(), ExtendedValuation::Finite(-1));
        assert_eq!(x.to_string(), "T^-1 * 2 + 1*T + O(T^4)");
    }

    #[test]
    fn reports_positions() {
        let err = parse_element::<PAdicNumber>("1 + 2*x", q5(), 3).unwrap_err();
        assert_eq!(err, Error::Parse { position: 6, message: "expected uniformizer 5".into() });
        let err = parse_element::<PAdicNumber>("1/0", q5(), 3).unwrap_err();
        assert!(matches!(err, Error::Parse { position: 2, .. }));
    }
}
