//! Functions on extended phase space `(t, q, p)` and their Poisson calculus.
//!
//! A phase function is a finite sum of
//! `t^k * exp(c*sqrt(d)*t) * (a(q) + b(q)*sqrt(d)) * p^alpha`
//! with ring-valued `a, b`, one quadratic radicand `d` per function (`d = 1`
//! when no surd is present).

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::qfi::{Coeff, Qfi, TimeBasis};
use crate::ring::{coordinate_names, format_rational, int, Rational, RingElem};

/// `a + b*sqrt(d)` with ring-valued parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub a: RingElem,
    pub b: RingElem,
}

impl Surd {
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn add(&self, o: &Surd) -> Surd {
        Surd {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }

    fn mul(&self, o: &Surd, d: &Rational) -> Surd {
        let mut a = &self.a * &o.a;
        if !self.b.is_zero() && !o.b.is_zero() {
            a = &a + &(&self.b * &o.b).scale(d);
        }
        let b = &(&self.a * &o.b) + &(&self.b * &o.a);
        Surd { a, b }
    }

    fn scale(&self, c: &Rational) -> Surd {
        Surd {
            a: self.a.scale(c),
            b: self.b.scale(c),
        }
    }

    /// Multiplication by `c*sqrt(d)`.
    fn mul_root(&self, c: &Rational, d: &Rational) -> Surd {
        Surd {
            a: self.b.scale(&(c * d)),
            b: self.a.scale(c),
        }
    }

    fn partial(&self, axis: usize) -> Surd {
        Surd {
            a: self.a.partial(axis),
            b: self.b.partial(axis),
        }
    }
}

/// Time and momentum part of a phase-space monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhaseKey {
    /// Multiple of `sqrt(d)` in the exponential rate.
    pub rate: Rational,
    pub t_pow: u32,
    pub p: SmallVec<[u16; 4]>,
}

/// A function of `(t, q, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseFunction {
    dim: usize,
    radicand: BigInt,
    terms: BTreeMap<PhaseKey, Surd>,
}

fn join_radicands(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    if a.is_one() || a == b {
        Ok(b.clone())
    } else if b.is_one() {
        Ok(a.clone())
    } else {
        Err(Error::MixedRadicands)
    }
}

impl PhaseFunction {
    pub fn zero(dim: usize) -> Self {
        PhaseFunction {
            dim,
            radicand: BigInt::one(),
            terms: BTreeMap::new(),
        }
    }

    fn key0(dim: usize) -> PhaseKey {
        PhaseKey {
            rate: Rational::zero(),
            t_pow: 0,
            p: SmallVec::from_elem(0, dim),
        }
    }

    fn insert(&mut self, key: PhaseKey, s: Surd) {
        if s.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&key) {
            Some(old) => old.add(&s),
            None => s,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    /// A function of position only.
    pub fn from_ring(e: &RingElem) -> Self {
        let mut f = PhaseFunction::zero(e.dim());
        f.insert(
            Self::key0(e.dim()),
            Surd {
                a: e.clone(),
                b: RingElem::zero(e.dim()),
            },
        );
        f
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::from_ring(&RingElem::constant(dim, c))
    }

    /// The coordinate `q_axis`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        Self::from_ring(&RingElem::coord(dim, axis))
    }

    /// The momentum `p_axis`.
    pub fn momentum(dim: usize, axis: usize) -> Self {
        let mut key = Self::key0(dim);
        key.p[axis] = 1;
        let mut f = PhaseFunction::zero(dim);
        f.insert(
            key,
            Surd {
                a: RingElem::one(dim),
                b: RingElem::zero(dim),
            },
        );
        f
    }

    /// The time `t`.
    pub fn time(dim: usize) -> Self {
        let mut key = Self::key0(dim);
        key.t_pow = 1;
        let mut f = PhaseFunction::zero(dim);
        f.insert(
            key,
            Surd {
                a: RingElem::one(dim),
                b: RingElem::zero(dim),
            },
        );
        f
    }

    /// `H = |p|^2 / 2 + V(q)`.
    pub fn hamiltonian(potential: &RingElem) -> Self {
        let n = potential.dim();
        let mut h = PhaseFunction::from_ring(potential);
        let half = Rational::new(1.into(), 2.into());
        for a in 0..n {
            let pa = PhaseFunction::momentum(n, a);
            h = h.add(&pa.mul(&pa).unwrap().scale(&half)).unwrap();
        }
        h
    }

    /// Identifies velocities with momenta (unit kinetic metric).
    pub fn from_qfi(qfi: &Qfi) -> Result<Self> {
        let n = qfi.dim();
        let mut out = PhaseFunction::zero(n);
        for term in qfi.terms() {
            let (radicand, c, d) = match &term.time {
                TimeBasis::Poly(_) => (BigInt::one(), Rational::zero(), Rational::one()),
                TimeBasis::Exp(rate) => {
                    let (c, d) = rate.surd();
                    let dr = Rational::from_integer(d.clone());
                    (d, c, dr)
                }
            };
            out.radicand = join_radicands(&out.radicand, &radicand)?;
            let t_pow = match term.time {
                TimeBasis::Poly(k) => k,
                TimeBasis::Exp(_) => 0,
            };
            let rate = c.clone();
            let to_surd = |coeff: &Coeff| -> Surd {
                if coeff.odd.is_zero() {
                    Surd {
                        a: coeff.even.clone(),
                        b: RingElem::zero(n),
                    }
                } else if d.is_one() {
                    Surd {
                        a: &coeff.even + &coeff.odd.scale(&c),
                        b: RingElem::zero(n),
                    }
                } else {
                    Surd {
                        a: coeff.even.clone(),
                        b: coeff.odd.scale(&c),
                    }
                }
            };
            let mk = |p: SmallVec<[u16; 4]>| PhaseKey {
                rate: rate.clone(),
                t_pow,
                p,
            };
            for a in 0..n {
                for b in 0..n {
                    let s = to_surd(&term.k2[a][b]);
                    let mut p: SmallVec<[u16; 4]> = SmallVec::from_elem(0, n);
                    p[a] += 1;
                    p[b] += 1;
                    out.insert(mk(p), s);
                }
                let mut p: SmallVec<[u16; 4]> = SmallVec::from_elem(0, n);
                p[a] = 1;
                out.insert(mk(p), to_surd(&term.k1[a]));
            }
            out.insert(mk(SmallVec::from_elem(0, n)), to_surd(&term.k0));
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PhaseKey, &Surd)> + '_ {
        self.terms.iter()
    }

    fn d(&self) -> Rational {
        Rational::from_integer(self.radicand.clone())
    }

    pub fn add(&self, other: &PhaseFunction) -> Result<PhaseFunction> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut out = self.clone();
        out.radicand = join_radicands(&self.radicand, &other.radicand)?;
        for (k, s) in &other.terms {
            out.insert(k.clone(), s.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PhaseFunction) -> Result<PhaseFunction> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> PhaseFunction {
        let mut out = PhaseFunction {
            dim: self.dim,
            radicand: self.radicand.clone(),
            terms: BTreeMap::new(),
        };
        for (k, s) in &self.terms {
            out.insert(k.clone(), s.scale(c));
        }
        out
    }

    /// Multiplication by `c*sqrt(d)` where `d` is this function's radicand.
    pub fn scale_root(&self, c: &Rational) -> PhaseFunction {
        let d = self.d();
        let mut out = PhaseFunction {
            dim: self.dim,
            radicand: self.radicand.clone(),
            terms: BTreeMap::new(),
        };
        for (k, s) in &self.terms {
            out.insert(k.clone(), s.mul_root(c, &d));
        }
        out
    }

    pub fn mul(&self, other: &PhaseFunction) -> Result<PhaseFunction> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let radicand = join_radicands(&self.radicand, &other.radicand)?;
        let d = Rational::from_integer(radicand.clone());
        let mut out = PhaseFunction {
            dim: self.dim,
            radicand,
            terms: BTreeMap::new(),
        };
        for (k1, s1) in &self.terms {
            for (k2, s2) in &other.terms {
                let key = PhaseKey {
                    rate: &k1.rate + &k2.rate,
                    t_pow: k1.t_pow + k2.t_pow,
                    p: k1.p.iter().zip(&k2.p).map(|(a, b)| a + b).collect(),
                };
                out.insert(key, s1.mul(s2, &d));
            }
        }
        Ok(out)
    }

    pub fn partial_q(&self, axis: usize) -> PhaseFunction {
        let mut out = PhaseFunction {
            dim: self.dim,
            radicand: self.radicand.clone(),
            terms: BTreeMap::new(),
        };
        for (k, s) in &self.terms {
            out.insert(k.clone(), s.partial(axis));
        }
        out
    }

    pub fn partial_p(&self, axis: usize) -> PhaseFunction {
        let mut out = PhaseFunction {
            dim: self.dim,
            radicand: self.radicand.clone(),
            terms: BTreeMap::new(),
        };
        for (k, s) in &self.terms {
            let e = k.p[axis];
            if e == 0 {
                continue;
            }
            let mut k2 = k.clone();
            k2.p[axis] -= 1;
            out.insert(k2, s.scale(&int(e as i64)));
        }
        out
    }

    pub fn partial_t(&self) -> PhaseFunction {
        let d = self.d();
        let mut out = PhaseFunction {
            dim: self.dim,
            radicand: self.radicand.clone(),
            terms: BTreeMap::new(),
        };
        for (k, s) in &self.terms {
            if k.t_pow > 0 {
                let mut k2 = k.clone();
                k2.t_pow -= 1;
                out.insert(k2, s.scale(&int(k.t_pow as i64)));
            }
            if !k.rate.is_zero() {
                let root = if self.radicand.is_one() {
                    s.scale(&k.rate)
                } else {
                    s.mul_root(&k.rate, &d)
                };
                out.insert(k.clone(), root);
            }
        }
        out
    }

    /// Numeric value; `sqrt(d)` is imaginary for negative `d`.
    pub fn evaluate(&self, t: f64, q: &[f64], p: &[f64]) -> Result<Complex64> {
        let dv = self.radicand.to_f64().unwrap_or(f64::NAN);
        let root = if dv >= 0.0 {
            Complex64::new(dv.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-dv).sqrt())
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, s) in &self.terms {
            let mut c = Complex64::new(s.a.evaluate(q)?, 0.0);
            if !s.b.is_zero() {
                c += root * s.b.evaluate(q)?;
            }
            let mut m = t.powi(k.t_pow as i32);
            for (x, &e) in p.iter().zip(&k.p) {
                m *= x.powi(e as i32);
            }
            let mut v = c * m;
            if !k.rate.is_zero() {
                let r = k.rate.to_f64().unwrap_or(f64::NAN);
                v *= (root * r * t).exp();
            }
            acc += v;
        }
        Ok(acc)
    }
}

impl fmt::Display for PhaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let names = coordinate_names(self.dim);
        let pnames: Vec<String> = names.iter().map(|n| format!("p{n}")).collect();
        let mut parts = Vec::new();
        for (k, s) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            match k.t_pow {
                0 => {}
                1 => factors.push("t".to_string()),
                e => factors.push(format!("t^{e}")),
            }
            if !k.rate.is_zero() {
                let root = if self.radicand.is_one() {
                    String::new()
                } else {
                    format!("*sqrt({})", self.radicand)
                };
                factors.push(format!("exp({}{}*t)", format_rational(&k.rate), root));
            }
            let coeff = if s.b.is_zero() {
                s.a.format_with(&names)
            } else {
                format!(
                    "{} + sqrt({})*({})",
                    s.a.format_with(&names),
                    self.radicand,
                    s.b.format_with(&names)
                )
            };
            factors.push(format!("({coeff})"));
            for (n, &e) in pnames.iter().zip(&k.p) {
                match e {
                    0 => {}
                    1 => factors.push(n.clone()),
                    _ => factors.push(format!("{n}^{e}")),
                }
            }
            parts.push(factors.join("*"));
        }
        f.write_str(&parts.join(" + "))
    }
}

/// `{F, G} = sum_a dF/dq_a dG/dp_a - dF/dp_a dG/dq_a`.
pub fn poisson_bracket(f: &PhaseFunction, g: &PhaseFunction) -> Result<PhaseFunction> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch {
            left: f.dim,
            right: g.dim,
        });
    }
    let mut acc = PhaseFunction::zero(f.dim);
    for a in 0..f.dim {
        let x = f.partial_q(a).mul(&g.partial_p(a))?;
        let y = f.partial_p(a).mul(&g.partial_q(a))?;
        acc = acc.add(&x)?.sub(&y)?;
    }
    Ok(acc)
}

/// `dF/dt = partial_t F + {F, H}`.
pub fn total_derivative(f: &PhaseFunction, h: &PhaseFunction) -> Result<PhaseFunction> {
    f.partial_t().add(&poisson_bracket(f, h)?)
}

/// True when the QFI is conserved along the flow of `H = p^2/2 + V`,
/// decided exactly.
pub fn is_first_integral(qfi: &Qfi, potential: &RingElem) -> Result<bool> {
    let f = PhaseFunction::from_qfi(qfi)?;
    let h = PhaseFunction::hamiltonian(potential);
    Ok(total_derivative(&f, &h)?.is_zero())
}

/// True when all pairwise brackets vanish.
pub fn in_involution(fs: &[PhaseFunction]) -> Result<bool> {
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            if !poisson_bracket(&fs[i], &fs[j])?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Generic rank of the gradients (in `q` and `p`) of the given functions.
///
/// Each sample point gives a numeric rank through the singular values of the
/// `k x 2n` Jacobian (values below `1e-8` of the largest count as zero); the
/// result is the maximum over `samples` seeded random points with `t` in
/// `[0, 1]`, `|q|` in `[0.5, 1.5]` and momenta in `[-1, 1]`.
pub fn functional_rank(fs: &[PhaseFunction], samples: usize, seed: u64) -> Result<usize> {
    if fs.is_empty() {
        return Ok(0);
    }
    let n = fs[0].dim;
    let grads: Vec<Vec<PhaseFunction>> = fs
        .iter()
        .map(|f| {
            (0..n)
                .map(|a| f.partial_q(a))
                .chain((0..n).map(|a| f.partial_p(a)))
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..samples {
        let t: f64 = rng.gen_range(0.0..1.0);
        let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
        let radius: f64 = rng.gen_range(0.5..1.5);
        q.iter_mut().for_each(|x| *x *= radius / norm);
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut m = DMatrix::<Complex64>::zeros(fs.len(), 2 * n);
        for (i, row) in grads.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                m[(i, j)] = g.evaluate(t, &q, &p)?;
            }
        }
        let sv = m.svd(false, false).singular_values;
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let rank = if smax == 0.0 {
            0
        } else {
            sv.iter().filter(|&&s| s > 1e-8 * smax).count()
        };
        best = best.max(rank);
    }
    Ok(best)
}

/// Rational multiple `c` with `f = c * g`, if one exists.
pub fn proportionality(f: &PhaseFunction, g: &PhaseFunction) -> Option<Rational> {
    let (kg, sg) = g.terms.iter().next()?;
    let sf = f.terms.get(kg)?;
    let (num, den) = sg
        .a
        .terms()
        .next()
        .map(|(m, c)| (sf.a.coeff(m), c.clone()))
        .or_else(|| sg.b.terms().next().map(|(m, c)| (sf.b.coeff(m), c.clone())))?;
    let c = num / den;
    if f.sub(&g.scale(&c)).ok()?.is_zero() {
        Some(c)
    } else {
        None
    }
}

/// Exact coordinates of phase functions in a shared monomial basis.
fn coordinate_rows(fs: &[&PhaseFunction]) -> (usize, Vec<crate::linalg::SparseRow>) {
    use crate::ring::Monomial;
    let mut index: BTreeMap<(PhaseKey, Monomial, bool), usize> = BTreeMap::new();
    let mut rows = Vec::new();
    for f in fs {
        let mut row: Vec<(usize, Rational)> = Vec::new();
        for (k, s) in &f.terms {
            for (part, elem) in [(false, &s.a), (true, &s.b)] {
                for (m, c) in elem.terms() {
                    let next = index.len();
                    let i = *index.entry((k.clone(), m.clone(), part)).or_insert(next);
                    row.push((i, c.clone()));
                }
            }
        }
        row.sort_by_key(|(i, _)| *i);
        rows.push(row);
    }
    (index.len(), rows)
}

/// Dimension of the rational span of the given functions.
pub fn span_rank(fs: &[PhaseFunction]) -> Result<usize> {
    if let Some(f) = fs.first() {
        for g in fs {
            join_radicands(&f.radicand, &g.radicand)?;
        }
    }
    let refs: Vec<&PhaseFunction> = fs.iter().collect();
    let (n, rows) = coordinate_rows(&refs);
    Ok(crate::linalg::rank(n.max(1), &rows))
}

/// True when `target` is a rational linear combination of `basis`.
pub fn in_span(basis: &[PhaseFunction], target: &PhaseFunction) -> Result<bool> {
    let mut all: Vec<PhaseFunction> = basis.to_vec();
    let before = span_rank(&all)?;
    all.push(target.clone());
    Ok(span_rank(&all)? == before)
}

/// True when the radicand is negative, i.e. the function involves `i`.
pub fn is_imaginary(f: &PhaseFunction) -> bool {
    f.radicand.is_negative()
}
