//! Exact arithmetic in `Q[q1..qn][r, 1/r] / (r^2 - (q1^2 + ... + qn^2))`.
//!
//! Every element is stored in a normal form:
//!
//! * the exponent of `r` is at most 1 (`r^2` is rewritten as `rho = |q|^2`);
//! * a term with a negative `r` exponent has degree at most 1 in the first
//!   coordinate, i.e. the polynomial attached to each negative power of `r` is
//!   reduced modulo `rho` (division with remainder, `rho` taken as monic in
//!   `q1`). Whatever is divisible by `rho` moves up two powers of `r`.
//!
//! The normal form is unique, so equality of elements is equality of term maps
//! and the zero test is decidable.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rational = BigRational;

pub(crate) type Exps = SmallVec<[u16; 4]>;

/// Shorthand for the rational `num / den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer-valued rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Coordinate names used when printing: `x, y, z` up to dimension 3,
/// `q1..qn` beyond that.
pub fn coordinate_names(dim: usize) -> Vec<String> {
    if dim <= 3 {
        ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=dim).map(|i| format!("q{i}")).collect()
    }
}

/// A power product `q1^e1 ... qn^en * r^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Exps,
    r: i32,
}

impl Monomial {
    pub fn new(exps: &[u16], r: i32) -> Self {
        Monomial {
            exps: exps.iter().copied().collect(),
            r,
        }
    }

    pub fn one(dim: usize) -> Self {
        Monomial {
            exps: SmallVec::from_elem(0, dim),
            r: 0,
        }
    }

    pub fn coord_exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn r_exponent(&self) -> i32 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn coord_degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.r == 0 && self.exps.iter().all(|&e| e == 0)
    }

    /// True when the monomial satisfies the normal-form rules on its own.
    pub fn is_canonical(&self) -> bool {
        self.r <= 1 && (self.r >= 0 || self.exps.first().is_none_or(|&e| e <= 1))
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a + b)
                .collect(),
            r: self.r + other.r,
        }
    }

    /// Writes the monomial using the given coordinate names; `None` when the
    /// monomial is 1.
    pub fn format_with(&self, names: &[String]) -> Option<String> {
        let mut parts = Vec::new();
        for (name, &e) in names.iter().zip(self.exps.iter()) {
            match e {
                0 => {}
                1 => parts.push(name.clone()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        match self.r {
            0 => {}
            1 => parts.push("r".to_string()),
            k => parts.push(format!("r^{k}")),
        }
        if parts.is_empty() {
            None
        } else {
            Some(parts.join("*"))
        }
    }
}

/// Graded lexicographic order on the coordinate part, ties broken by the
/// exponent of `r`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coord_degree()
            .cmp(&other.coord_degree())
            .then_with(|| self.exps.cmp(&other.exps))
            .then_with(|| self.r.cmp(&other.r))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type Poly = BTreeMap<Exps, Rational>;

fn poly_add_term(p: &mut Poly, e: Exps, c: Rational) {
    if c.is_zero() {
        return;
    }
    match p.entry(e) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// `p * rho`.
fn poly_mul_rho(p: Poly) -> Poly {
    let mut out = Poly::new();
    for (e, c) in p {
        for axis in 0..e.len() {
            let mut e2 = e.clone();
            e2[axis] += 2;
            poly_add_term(&mut out, e2, c.clone());
        }
    }
    out
}

/// Division with remainder by `rho`, treating `rho` as monic in the first
/// coordinate. The remainder has degree at most 1 in that coordinate.
fn poly_divrem_rho(p: Poly) -> (Poly, Poly) {
    let max_e0 = p.keys().map(|e| e[0]).max().unwrap_or(0);
    if max_e0 < 2 {
        return (Poly::new(), p);
    }
    let mut buckets: Vec<Poly> = vec![Poly::new(); max_e0 as usize + 1];
    for (e, c) in p {
        let e0 = e[0] as usize;
        buckets[e0].insert(e, c);
    }
    let mut quotient = Poly::new();
    for e0 in (2..=max_e0 as usize).rev() {
        let bucket = std::mem::take(&mut buckets[e0]);
        for (e, c) in bucket {
            let mut q = e.clone();
            q[0] -= 2;
            // x^e0 m = x^(e0-2) m * rho - x^(e0-2) m * (y^2 + z^2 + ...)
            for axis in 1..e.len() {
                let mut t = q.clone();
                t[axis] += 2;
                poly_add_term(&mut buckets[e0 - 2], t, -c.clone());
            }
            poly_add_term(&mut quotient, q, c);
        }
    }
    let mut rem = std::mem::take(&mut buckets[0]);
    for (e, c) in std::mem::take(&mut buckets[1]) {
        poly_add_term(&mut rem, e, c);
    }
    (quotient, rem)
}

fn canonicalize<I>(terms: I) -> BTreeMap<Monomial, Rational>
where
    I: IntoIterator<Item = (Monomial, Rational)>,
{
    let mut by_r: BTreeMap<i32, Poly> = BTreeMap::new();
    for (m, c) in terms {
        poly_add_term(by_r.entry(m.r).or_default(), m.exps, c);
    }
    // r^k with k >= 2 -> rho * r^(k-2)
    while let Some((&k, _)) = by_r.last_key_value() {
        if k < 2 {
            break;
        }
        let p = by_r.remove(&k).unwrap();
        let lowered = poly_mul_rho(p);
        let target = by_r.entry(k - 2).or_default();
        for (e, c) in lowered {
            poly_add_term(target, e, c);
        }
    }
    // negative powers: push rho-multiples upward
    let mut cursor = by_r.first_key_value().map(|(&k, _)| k);
    while let Some(k) = cursor {
        if k >= 0 {
            break;
        }
        let p = by_r.remove(&k).unwrap();
        let (q, rem) = poly_divrem_rho(p);
        if !rem.is_empty() {
            by_r.insert(k, rem);
        }
        if !q.is_empty() {
            let target = by_r.entry(k + 2).or_default();
            for (e, c) in q {
                poly_add_term(target, e, c);
            }
        }
        cursor = by_r
            .range((std::ops::Bound::Excluded(k), std::ops::Bound::Unbounded))
            .next()
            .map(|(&k, _)| k);
    }
    let mut out = BTreeMap::new();
    for (r, p) in by_r {
        for (exps, c) in p {
            if !c.is_zero() {
                out.insert(Monomial { exps, r }, c);
            }
        }
    }
    out
}

/// An element of the radical ring over `dim` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl RingElem {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "ring dimension must be positive");
        RingElem {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::from_terms(dim, [(Monomial::one(dim), c)])
    }

    /// The coordinate `q_axis`.
    pub fn coord(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        let mut e: Exps = SmallVec::from_elem(0, dim);
        e[axis] = 1;
        Self::from_terms(dim, [(Monomial { exps: e, r: 0 }, Rational::one())])
    }

    /// `r^k`.
    pub fn radial_pow(dim: usize, k: i32) -> Self {
        Self::from_terms(
            dim,
            [(
                Monomial {
                    exps: SmallVec::from_elem(0, dim),
                    r: k,
                },
                Rational::one(),
            )],
        )
    }

    /// `rho = q1^2 + ... + qn^2`.
    pub fn rho(dim: usize) -> Self {
        Self::radial_pow(dim, 2)
    }

    pub fn from_monomial(m: Monomial, c: Rational) -> Self {
        let dim = m.dim();
        Self::from_terms(dim, [(m, c)])
    }

    /// Builds an element from arbitrary (possibly non-canonical, repeated)
    /// terms.
    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        assert!(dim >= 1, "ring dimension must be positive");
        let terms = canonicalize(terms.into_iter().inspect(|(m, _)| {
            assert_eq!(m.dim(), dim, "monomial dimension mismatch");
        }));
        RingElem { dim, terms }
    }

    /// Polynomial from `(coefficient, exponents)` pairs with `r^0`.
    pub fn poly(dim: usize, terms: &[(Rational, &[u16])]) -> Self {
        Self::from_terms(
            dim,
            terms
                .iter()
                .map(|(c, e)| (Monomial::new(e, 0), c.clone())),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.dim))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.terms.keys()
    }

    /// Largest coordinate degree over all terms (0 for the zero element).
    pub fn max_coord_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.coord_degree()).max().unwrap_or(0)
    }

    /// `(min, max)` exponent of `r` over all terms, `None` for zero.
    pub fn r_exponent_range(&self) -> Option<(i32, i32)> {
        let min = self.terms.keys().map(|m| m.r).min()?;
        let max = self.terms.keys().map(|m| m.r).max()?;
        Some((min, max))
    }

    pub fn has_negative_r(&self) -> bool {
        self.terms.keys().any(|m| m.r < 0)
    }

    fn check_dim(&self, other: &RingElem) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &RingElem) -> Result<RingElem> {
        self.check_dim(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            match terms.entry(m.clone()) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    *o.get_mut() += c;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        Ok(RingElem {
            dim: self.dim,
            terms,
        })
    }

    pub fn try_sub(&self, other: &RingElem) -> Result<RingElem> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &RingElem) -> Result<RingElem> {
        self.check_dim(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(RingElem::zero(self.dim));
        }
        let mut raw: Vec<(Monomial, Rational)> =
            Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                raw.push((ma.mul(mb), ca * cb));
            }
        }
        Ok(RingElem {
            dim: self.dim,
            terms: canonicalize(raw),
        })
    }

    fn neg_ref(&self) -> RingElem {
        RingElem {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> RingElem {
        if c.is_zero() {
            return RingElem::zero(self.dim);
        }
        RingElem {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> RingElem {
        let mut acc = RingElem::one(self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact partial derivative along `axis`, using `dr/dq_a = q_a / r`.
    pub fn partial(&self, axis: usize) -> RingElem {
        assert!(axis < self.dim, "axis {axis} out of range");
        let mut raw = Vec::with_capacity(self.terms.len() * 2);
        for (m, c) in &self.terms {
            let e = m.exps[axis];
            if e > 0 {
                let mut d = m.clone();
                d.exps[axis] -= 1;
                raw.push((d, c * Rational::from_integer(BigInt::from(e))));
            }
            if m.r != 0 {
                let mut d = m.clone();
                d.exps[axis] += 1;
                d.r -= 2;
                raw.push((d, c * Rational::from_integer(BigInt::from(m.r))));
            }
        }
        RingElem {
            dim: self.dim,
            terms: canonicalize(raw),
        }
    }

    pub fn gradient(&self) -> Vec<RingElem> {
        (0..self.dim).map(|a| self.partial(a)).collect()
    }

    /// Numeric value at `q`. Fails at `r = 0` when a negative power of `r`
    /// is present.
    pub fn evaluate(&self, q: &[f64]) -> Result<f64> {
        if q.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: q.len(),
            });
        }
        let r = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 && self.has_negative_r() {
            return Err(Error::Singular);
        }
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut v = c.to_f64().unwrap_or(f64::NAN);
            for (x, &e) in q.iter().zip(m.exps.iter()) {
                v *= x.powi(e as i32);
            }
            if m.r != 0 {
                v *= r.powi(m.r);
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Substitutes `q_axis -> -q_axis`.
    pub fn reflect(&self, axis: usize) -> RingElem {
        RingElem {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    if m.exps[axis] % 2 == 1 {
                        (m.clone(), -c)
                    } else {
                        (m.clone(), c.clone())
                    }
                })
                .collect(),
        }
    }

    /// Formats with the given coordinate names.
    pub fn format_with(&self, names: &[String]) -> String {
        let pieces: Vec<(bool, String)> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| term_string(c, m.format_with(names)))
            .collect();
        join_signed(pieces)
    }
}

/// Renders `c * body` as `(is_negative, magnitude string)`.
pub(crate) fn term_string(c: &Rational, body: Option<String>) -> (bool, String) {
    let neg = c.is_negative();
    let mag = c.abs();
    let s = match body {
        None => format_rational(&mag),
        Some(b) if mag.is_one() => b,
        Some(b) => format!("{}*{}", format_rational(&mag), b),
    };
    (neg, s)
}

/// Joins signed pieces as `a + b - c`; "0" when empty.
pub(crate) fn join_signed(pieces: Vec<(bool, String)>) -> String {
    if pieces.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (neg, s)) in pieces.into_iter().enumerate() {
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&s);
    }
    out
}

/// `a` or `a/b`.
pub fn format_rational(c: &Rational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Parses `a` or `a/b` with integer `a`, `b`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&coordinate_names(self.dim)))
    }
}

impl Add for &RingElem {
    type Output = RingElem;
    fn add(self, rhs: &RingElem) -> RingElem {
        self.try_add(rhs).expect("ring dimension mismatch")
    }
}

impl Sub for &RingElem {
    type Output = RingElem;
    fn sub(self, rhs: &RingElem) -> RingElem {
        self.try_sub(rhs).expect("ring dimension mismatch")
    }
}

impl Mul for &RingElem {
    type Output = RingElem;
    fn mul(self, rhs: &RingElem) -> RingElem {
        self.try_mul(rhs).expect("ring dimension mismatch")
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        self.neg_ref()
    }
}

impl Add for RingElem {
    type Output = RingElem;
    fn add(self, rhs: RingElem) -> RingElem {
        &self + &rhs
    }
}

impl Sub for RingElem {
    type Output = RingElem;
    fn sub(self, rhs: RingElem) -> RingElem {
        &self - &rhs
    }
}

impl Mul for RingElem {
    type Output = RingElem;
    fn mul(self, rhs: RingElem) -> RingElem {
        &self * &rhs
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        self.neg_ref()
    }
}

/// Growth allowed for the scalar ansatz beyond the data of the right-hand
/// side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnsatzBounds {
    pub extra_degree: u32,
    pub extra_r: i32,
}

impl Default for AnsatzBounds {
    fn default() -> Self {
        AnsatzBounds {
            extra_degree: 1,
            extra_r: 2,
        }
    }
}

/// Canonical monomials spanning the candidate space for a scalar `G` whose
/// gradient should match `rhs`.
///
/// Raw monomials have coordinate degree up to `max degree of rhs + 1` and an
/// `r` exponent in `[min r exponent, max r exponent + 2]`; each is brought to
/// normal form and every canonical monomial that shows up is returned, in
/// ascending monomial order.
pub fn antiderivative_ansatz_basis(rhs: &[RingElem], dim: usize) -> Vec<Monomial> {
    antiderivative_ansatz_basis_with(rhs, dim, AnsatzBounds::default())
}

pub fn antiderivative_ansatz_basis_with(
    rhs: &[RingElem],
    dim: usize,
    bounds: AnsatzBounds,
) -> Vec<Monomial> {
    let nonzero: Vec<&RingElem> = rhs.iter().filter(|e| !e.is_zero()).collect();
    if nonzero.is_empty() {
        return vec![Monomial::one(dim)];
    }
    let max_deg = nonzero.iter().map(|e| e.max_coord_degree()).max().unwrap() + bounds.extra_degree;
    let rmin = nonzero
        .iter()
        .filter_map(|e| e.r_exponent_range())
        .map(|(lo, _)| lo)
        .min()
        .unwrap();
    let rmax = nonzero
        .iter()
        .filter_map(|e| e.r_exponent_range())
        .map(|(_, hi)| hi)
        .max()
        .unwrap()
        + bounds.extra_r;
    let mut out = BTreeSet::new();
    for exps in exponent_vectors(dim, max_deg) {
        for k in rmin..=rmax {
            let m = Monomial {
                exps: exps.clone(),
                r: k,
            };
            if m.is_canonical() {
                out.insert(m);
            } else {
                let e = RingElem::from_monomial(m, Rational::one());
                out.extend(e.terms.into_keys());
            }
        }
    }
    out.into_iter().collect()
}

/// All exponent vectors of `dim` variables with total degree `<= max_deg`.
pub(crate) fn exponent_vectors(dim: usize, max_deg: u32) -> Vec<Exps> {
    let mut out = Vec::new();
    let mut cur: Exps = SmallVec::from_elem(0, dim);
    fn rec(i: usize, left: u32, cur: &mut Exps, out: &mut Vec<Exps>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e as u16;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, max_deg, &mut cur, &mut out);
    out
}
