//! Exact sparse linear algebra over the rationals and linear expressions with
//! ring-valued coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ring::{Monomial, Rational, RingElem};

/// Sparse row: `(column, value)` pairs, columns strictly increasing.
pub type SparseRow = Vec<(usize, Rational)>;

type IntRow = Vec<(usize, BigInt)>;

fn primitive(mut row: IntRow) -> IntRow {
    let mut g = BigInt::zero();
    for (_, v) in &row {
        g = g.gcd(v);
        if g.is_one() {
            return row;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
    row
}

/// Integer row with internal column indices (sorted ascending).
fn to_int_row(row: &[(usize, Rational)], ncols: usize) -> IntRow {
    let mut l = BigInt::one();
    for (_, v) in row {
        if !v.is_zero() {
            l = l.lcm(v.denom());
        }
    }
    let mut out: IntRow = row
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| {
            assert!(*c < ncols, "column {c} out of range");
            (ncols - 1 - c, v.numer() * (&l / v.denom()))
        })
        .collect();
    out.sort_by_key(|(c, _)| *c);
    let mut merged: IntRow = Vec::with_capacity(out.len());
    for (c, v) in out {
        match merged.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => merged.push((c, v)),
        }
    }
    merged.retain(|(_, v)| !v.is_zero());
    primitive(merged)
}

/// `a*r - b*p` for sorted sparse rows.
fn combine(a: &BigInt, r: &IntRow, b: &BigInt, p: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let take = match (r.get(i), p.get(j)) {
            (Some((ci, _)), Some((cj, _))) => ci.cmp(cj),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => unreachable!(),
        };
        match take {
            std::cmp::Ordering::Less => {
                out.push((r[i].0, a * &r[i].1));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((p[j].0, -(b * &p[j].1)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let v = a * &r[i].1 - b * &p[j].1;
                if !v.is_zero() {
                    out.push((r[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    primitive(out)
}

/// Incremental row echelon form with fraction-free integer rows.
///
/// Pivots are taken at the highest-indexed column of each row, so that free
/// variables of the kernel are the lowest-indexed unknowns.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, IntRow>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn from_rows(ncols: usize, rows: &[SparseRow]) -> Self {
        let mut e = Echelon::new(ncols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, mut row: IntRow) -> IntRow {
        while let Some((lead, _)) = row.first() {
            match self.pivots.get(lead) {
                None => break,
                Some(p) => {
                    let a = &row[0].1;
                    let b = &p[0].1;
                    let g = a.gcd(b);
                    row = combine(&(b / &g), &row, &(a / &g), p);
                }
            }
        }
        row
    }

    /// Adds a row; returns `true` when it was independent of the rows so far.
    pub fn insert(&mut self, row: &[(usize, Rational)]) -> bool {
        let r = self.reduce(to_int_row(row, self.ncols));
        match r.first() {
            None => false,
            Some((lead, _)) => {
                let lead = *lead;
                self.pivots.insert(lead, r);
                true
            }
        }
    }

    /// True when `row` lies in the row space.
    pub fn contains(&self, row: &[(usize, Rational)]) -> bool {
        self.reduce(to_int_row(row, self.ncols)).is_empty()
    }

    /// The independent rows kept so far, in external column numbering.
    pub fn rows(&self) -> Vec<SparseRow> {
        self.pivots
            .values()
            .map(|r| {
                let mut row: SparseRow = r
                    .iter()
                    .map(|(c, v)| (self.ncols - 1 - c, Rational::from_integer(v.clone())))
                    .collect();
                row.sort_by_key(|(c, _)| *c);
                row
            })
            .collect()
    }

    /// Pivot columns in external numbering, ascending.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pivots.keys().map(|c| self.ncols - 1 - c).collect();
        v.sort_unstable();
        v
    }

    /// Exact kernel basis: one vector per free column (ascending), each
    /// integer-primitive with first nonzero entry positive.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let n = self.ncols;
        let free: Vec<usize> = (0..n)
            .filter(|c| !self.pivots.contains_key(&(n - 1 - c)))
            .collect();
        let mut out = Vec::with_capacity(free.len());
        for f in free {
            // internal indexing while solving
            let mut v: Vec<Rational> = vec![Rational::zero(); n];
            v[n - 1 - f] = Rational::one();
            for (&lead, row) in self.pivots.iter().rev() {
                let mut s = Rational::zero();
                for (c, a) in &row[1..] {
                    if !v[*c].is_zero() {
                        s += &v[*c] * Rational::from_integer(a.clone());
                    }
                }
                if !s.is_zero() {
                    v[lead] = -s / Rational::from_integer(row[0].1.clone());
                }
            }
            v.reverse();
            out.push(normalize_primitive(v));
        }
        out
    }
}

/// Scales a rational vector to coprime integers with the first nonzero entry
/// positive.
pub fn normalize_primitive(v: Vec<Rational>) -> Vec<Rational> {
    let mut l = BigInt::one();
    for x in &v {
        if !x.is_zero() {
            l = l.lcm(x.denom());
        }
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v;
    }
    if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        g = -g;
    }
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &g))
        .collect()
}

/// Kernel of the matrix given by sparse rows.
pub fn nullspace(ncols: usize, rows: &[SparseRow]) -> Vec<Vec<Rational>> {
    Echelon::from_rows(ncols, rows).kernel()
}

pub fn rank(ncols: usize, rows: &[SparseRow]) -> usize {
    Echelon::from_rows(ncols, rows).rank()
}

/// Dense vector to sparse row.
pub fn sparse(v: &[Rational]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

/// `M v` for sparse rows.
pub fn apply(rows: &[SparseRow], v: &[Rational]) -> Vec<Rational> {
    rows.iter()
        .map(|r| {
            r.iter()
                .fold(Rational::zero(), |acc, (c, a)| acc + a * &v[*c])
        })
        .collect()
}

/// True when `span(a) == span(b)` (vectors of equal length).
pub fn same_span(ncols: usize, a: &[Vec<Rational>], b: &[Vec<Rational>]) -> bool {
    let ea = Echelon::from_rows(ncols, &a.iter().map(|v| sparse(v)).collect::<Vec<_>>());
    let eb = Echelon::from_rows(ncols, &b.iter().map(|v| sparse(v)).collect::<Vec<_>>());
    ea.rank() == eb.rank() && b.iter().all(|v| ea.contains(&sparse(v)))
}

/// A linear form in scalar unknowns with ring-valued coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearExpr {
    dim: usize,
    terms: BTreeMap<usize, RingElem>,
}

impl LinearExpr {
    pub fn zero(dim: usize) -> Self {
        LinearExpr {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// `coeff * u_index`.
    pub fn unknown(index: usize, coeff: RingElem) -> Self {
        let dim = coeff.dim();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(index, coeff);
        }
        LinearExpr { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, index: usize) -> RingElem {
        self.terms
            .get(&index)
            .cloned()
            .unwrap_or_else(|| RingElem::zero(self.dim))
    }

    pub fn add(&self, other: &LinearExpr) -> LinearExpr {
        let mut terms = self.terms.clone();
        for (i, c) in &other.terms {
            let s = match terms.get(i) {
                Some(a) => a + c,
                None => c.clone(),
            };
            if s.is_zero() {
                terms.remove(i);
            } else {
                terms.insert(*i, s);
            }
        }
        LinearExpr {
            dim: self.dim,
            terms,
        }
    }

    pub fn sub(&self, other: &LinearExpr) -> LinearExpr {
        self.add(&other.mul_ring(&RingElem::constant(self.dim, -Rational::one())))
    }

    /// Multiplication by a known ring element.
    pub fn mul_ring(&self, f: &RingElem) -> LinearExpr {
        let mut terms = BTreeMap::new();
        for (i, c) in &self.terms {
            let p = c * f;
            if !p.is_zero() {
                terms.insert(*i, p);
            }
        }
        LinearExpr {
            dim: self.dim,
            terms,
        }
    }

    /// Product of two linear forms; only defined when one of them vanishes.
    pub fn mul(&self, other: &LinearExpr) -> Result<LinearExpr> {
        if self.is_zero() || other.is_zero() {
            return Ok(LinearExpr::zero(self.dim));
        }
        Err(Error::Nonlinear)
    }

    pub fn partial(&self, axis: usize) -> LinearExpr {
        let mut terms = BTreeMap::new();
        for (i, c) in &self.terms {
            let d = c.partial(axis);
            if !d.is_zero() {
                terms.insert(*i, d);
            }
        }
        LinearExpr {
            dim: self.dim,
            terms,
        }
    }

    /// Substitutes values for the unknowns.
    pub fn evaluate(&self, values: &[Rational]) -> RingElem {
        let mut acc = RingElem::zero(self.dim);
        for (i, c) in &self.terms {
            if !values[*i].is_zero() {
                acc = &acc + &c.scale(&values[*i]);
            }
        }
        acc
    }

    /// Coefficient rows keyed by monomial.
    pub fn rows_by_monomial(&self) -> BTreeMap<Monomial, SparseRow> {
        let mut by_mono: BTreeMap<Monomial, SparseRow> = BTreeMap::new();
        for (i, c) in &self.terms {
            for (m, v) in c.terms() {
                by_mono.entry(m.clone()).or_default().push((*i, v.clone()));
            }
        }
        by_mono
    }

    /// One row per monomial (ascending order) holding the rational
    /// coefficient of each unknown.
    pub fn rows(&self) -> Vec<SparseRow> {
        let mut by_mono: BTreeMap<Monomial, SparseRow> = BTreeMap::new();
        for (i, c) in &self.terms {
            for (m, v) in c.terms() {
                by_mono.entry(m.clone()).or_default().push((*i, v.clone()));
            }
        }
        by_mono.into_values().collect()
    }
}

/// Linear system in named scalar unknowns.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub unknown_labels: Vec<String>,
    pub rows: Vec<SparseRow>,
}

impl ConstraintSystem {
    /// One row per (equation, monomial) in equation order.
    pub fn assemble(unknown_labels: Vec<String>, equations: &[LinearExpr]) -> Self {
        let mut rows = Vec::new();
        for e in equations {
            rows.extend(e.rows());
        }
        ConstraintSystem {
            unknown_labels,
            rows,
        }
    }

    pub fn ncols(&self) -> usize {
        self.unknown_labels.len()
    }

    pub fn echelon(&self) -> Echelon {
        Echelon::from_rows(self.ncols(), &self.rows)
    }

    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        self.echelon().kernel()
    }
}
