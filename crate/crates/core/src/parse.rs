//! Parser for ring expressions such as `-k/r`, `1/2*r^2`, `x^2 - 3*y*r^-1`.
//!
//! Coordinates are `x, y, z` (as far as the dimension allows) or `q1..qn`;
//! `r` is the radius. Numbers are integers or decimals, read exactly.
//! Division is allowed only by a nonzero rational times a power of `r`, and
//! only such factors may carry a negative exponent.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::{Monomial, Rational, RingElem};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Num(parse_decimal(&text).ok_or_else(|| err(pos, format!("bad number '{text}'")))?)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Ident(text)));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else {
            return Err(err(pos, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (int_part, frac) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if frac.contains('.') || (int_part.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits = format!("{int_part}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(n, d))
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    dim: usize,
    end: usize,
    names: &'a [String],
}

/// Intermediate value: pure radial factors `c * r^k` stay symbolic so that
/// they can be inverted.
#[derive(Clone, Debug)]
enum Val {
    Radial(Rational, i64),
    Elem(RingElem),
}

impl Val {
    fn into_elem(self, dim: usize) -> RingElem {
        match self {
            Val::Radial(c, k) => RingElem::radial_pow(dim, k as i32).scale(&c),
            Val::Elem(e) => e,
        }
    }

    fn inverse(&self) -> Option<Val> {
        match self {
            Val::Radial(c, k) if !c.is_zero() => Some(Val::Radial(Rational::one() / c, -k)),
            Val::Radial(..) => None,
            Val::Elem(e) => radial_inverse(e).map(Val::Elem),
        }
    }
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |(p, _)| *p)
    }

    fn add(&self, a: Val, b: Val, sign: i64) -> Val {
        match (a, b) {
            (Val::Radial(c1, k1), Val::Radial(c2, k2)) if k1 == k2 => {
                Val::Radial(c1 + c2 * Rational::from_integer(sign.into()), k1)
            }
            (a, b) => {
                let (a, b) = (a.into_elem(self.dim), b.into_elem(self.dim));
                Val::Elem(if sign > 0 { &a + &b } else { &a - &b })
            }
        }
    }

    fn mul(&self, a: Val, b: Val) -> Val {
        match (a, b) {
            (Val::Radial(c1, k1), Val::Radial(c2, k2)) => Val::Radial(c1 * c2, k1 + k2),
            (a, b) => Val::Elem(&a.into_elem(self.dim) * &b.into_elem(self.dim)),
        }
    }

    fn expr(&mut self) -> Result<Val> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let c = *c;
            self.i += 1;
            let rhs = self.term()?;
            acc = self.add(acc, rhs, if c == '+' { 1 } else { -1 });
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Val> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let c = *c;
            self.i += 1;
            let pos = self.pos();
            let rhs = self.unary()?;
            acc = if c == '*' {
                self.mul(acc, rhs)
            } else {
                let inv = rhs
                    .inverse()
                    .ok_or_else(|| err(pos, "division by a non-monomial or by zero"))?;
                self.mul(acc, inv)
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Val> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.i += 1;
                Ok(match self.unary()? {
                    Val::Radial(c, k) => Val::Radial(-c, k),
                    Val::Elem(e) => Val::Elem(-e),
                })
            }
            Some(Tok::Op('+')) => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Val> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.i += 1;
            let pos = self.pos();
            let e = self.exponent()?;
            let (base, n) = if e >= 0 {
                (base, e as u32)
            } else {
                let inv = base.inverse().ok_or_else(|| {
                    err(pos, "negative exponent on a factor other than a power of r")
                })?;
                (inv, (-e) as u32)
            };
            Ok(match base {
                Val::Radial(c, k) => Val::Radial(num_traits::pow(c, n as usize), k * n as i64),
                Val::Elem(el) => Val::Elem(el.pow(n)),
            })
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        let pos = self.pos();
        let mut paren = false;
        if let Some(Tok::Op('(')) = self.peek() {
            paren = true;
            self.i += 1;
        }
        let mut neg = false;
        if let Some(Tok::Op('-')) = self.peek() {
            neg = true;
            self.i += 1;
        }
        let v = match self.toks.get(self.i) {
            Some((_, Tok::Num(n))) if n.is_integer() => {
                let v: i64 = n
                    .to_integer()
                    .try_into()
                    .map_err(|_| err(pos, "exponent too large"))?;
                self.i += 1;
                v
            }
            Some((p, Tok::Num(_))) => return Err(err(*p, "non-integer exponent")),
            _ => return Err(err(pos, "expected an integer exponent")),
        };
        if paren {
            match self.peek() {
                Some(Tok::Op(')')) => self.i += 1,
                _ => return Err(err(self.pos(), "expected ')'")),
            }
        }
        if v > 64 {
            return Err(err(pos, "exponent too large"));
        }
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<Val> {
        let pos = self.pos();
        match self.toks.get(self.i).cloned() {
            Some((_, Tok::Num(n))) => {
                self.i += 1;
                Ok(Val::Radial(n, 0))
            }
            Some((_, Tok::Ident(name))) => {
                self.i += 1;
                self.ident(&name, pos)
            }
            Some((_, Tok::Op('('))) => {
                self.i += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.i += 1;
                        Ok(e)
                    }
                    _ => Err(err(self.pos(), "expected ')'")),
                }
            }
            Some((p, Tok::Op(c))) => Err(err(p, format!("unexpected '{c}'"))),
            None => Err(err(pos, "unexpected end of input")),
        }
    }

    fn ident(&self, name: &str, pos: usize) -> Result<Val> {
        if name == "r" {
            return Ok(Val::Radial(Rational::one(), 1));
        }
        if let Some(a) = self.names.iter().position(|n| n == name) {
            return Ok(Val::Elem(RingElem::coord(self.dim, a)));
        }
        if let Some(idx) = name.strip_prefix('q').and_then(|s| s.parse::<usize>().ok()) {
            if idx >= 1 && idx <= self.dim {
                return Ok(Val::Elem(RingElem::coord(self.dim, idx - 1)));
            }
        }
        Err(err(pos, format!("unknown coordinate '{name}' in dimension {}", self.dim)))
    }
}

/// Inverse of `c * r^k` (`c` a nonzero rational), `None` for anything else.
fn radial_inverse(e: &RingElem) -> Option<RingElem> {
    if e.len() != 1 {
        return None;
    }
    let (m, c) = e.terms().next()?;
    if m.coord_degree() != 0 || c.is_zero() {
        return None;
    }
    let dim = e.dim();
    Some(RingElem::from_monomial(
        Monomial::new(&vec![0; dim], -m.r_exponent()),
        Rational::one() / c,
    ))
}

/// Parses an expression over `dim` coordinates.
pub fn parse_ring_elem(dim: usize, s: &str) -> Result<RingElem> {
    if dim == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    let names = crate::ring::coordinate_names(dim);
    let toks = tokenize(s)?;
    let mut p = Parser {
        toks,
        i: 0,
        dim,
        end: s.len(),
        names: &names,
    };
    if p.toks.is_empty() {
        return Err(err(0, "empty expression"));
    }
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return Err(err(p.pos(), "unexpected trailing input"));
    }
    Ok(e.into_elem(dim))
}

/// Parses with the check that the result is not identically singular in a
/// way the ring cannot express (always succeeds for valid input); kept as
/// the entry point for potentials.
pub fn parse_potential_expr(dim: usize, s: &str) -> Result<RingElem> {
    let e = parse_ring_elem(dim, s)?;
    if e.terms().any(|(_, c)| c.is_zero()) {
        return Err(Error::PotentialForm(s.to_string()));
    }
    Ok(e)
}
