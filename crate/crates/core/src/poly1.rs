//! Univariate polynomials over the rationals with exact real-root isolation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ring::Rational;

/// Dense polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    c: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn constant(x: Rational) -> Self {
        UPoly::new(vec![x])
    }

    /// `a + b*mu`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        UPoly::new(vec![a, b])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn leading(&self) -> Rational {
        self.c.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::new(
            (0..n)
                .map(|i| {
                    self.c.get(i).cloned().unwrap_or_else(Rational::zero)
                        + o.c.get(i).cloned().unwrap_or_else(Rational::zero)
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> UPoly {
        UPoly::new(self.c.iter().map(|x| -x).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Rational) -> UPoly {
        UPoly::new(self.c.iter().map(|x| x * k).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc = d.leading();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] / &lc;
            if !coef.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] -= &coef * dj;
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (UPoly::new(q), UPoly::new(r))
    }

    /// Quotient of an exact division.
    pub fn exact_div(&self, d: &UPoly) -> UPoly {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.leading()))
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, x)| x * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.c.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// `self / gcd(self, self')`.
    pub fn squarefree(&self) -> UPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        self.exact_div(&self.gcd(&self.derivative())).monic()
    }

    /// Coprime integer coefficients with positive leading coefficient.
    pub fn integer_primitive(&self) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for x in &self.c {
            l = l.lcm(x.denom());
        }
        let ints: Vec<BigInt> = self.c.iter().map(|x| x.numer() * (&l / x.denom())).collect();
        let mut g = BigInt::zero();
        for x in &ints {
            g = g.gcd(x);
        }
        if g.is_zero() {
            return ints;
        }
        if ints.last().is_some_and(|x| x.is_negative()) {
            g = -g;
        }
        ints.into_iter().map(|x| x / &g).collect()
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pieces = self
            .c
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let body = match i {
                    0 => None,
                    1 => Some("mu".to_string()),
                    _ => Some(format!("mu^{i}")),
                };
                crate::ring::term_string(c, body)
            })
            .collect();
        f.write_str(&crate::ring::join_signed(pieces))
    }
}

/// Sturm chain of a squarefree polynomial.
struct Sturm {
    chain: Vec<UPoly>,
}

impl Sturm {
    fn new(p: &UPoly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].divrem(&chain[n - 1]).1;
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        Sturm { chain }
    }

    fn variations(&self, x: &Rational) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for p in &self.chain {
            let v = p.eval(x);
            let s = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Distinct roots in `(lo, hi]`.
    fn count(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations(lo) - self.variations(hi)
    }
}

/// Real roots of a polynomial, split into exact rational roots and isolating
/// intervals `(lo, hi]` for irrational ones.
#[derive(Clone, Debug, Default)]
pub struct RealRoots {
    pub rational: Vec<Rational>,
    pub irrational: Vec<(Rational, Rational)>,
}

/// Finds every real root. A rational root of the integer-primitive squarefree
/// part has the form `m / lc` for an integer `m`; each isolating interval is
/// refined below width `1/lc` and the single candidate tested exactly.
pub fn real_roots(p: &UPoly) -> RealRoots {
    let mut out = RealRoots::default();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let sf = p.squarefree();
    let ints = sf.integer_primitive();
    let lc = Rational::from_integer(ints.last().unwrap().abs());
    let sturm = Sturm::new(&sf);
    // Cauchy bound
    let bound = Rational::one()
        + sf.c[..sf.c.len() - 1]
            .iter()
            .map(|x| x.abs())
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    let mut stack = vec![(-bound.clone(), bound)];
    let mut isolated = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm.count(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            isolated.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    let width_target = Rational::one() / &lc;
    for (mut lo, mut hi) in isolated {
        let mut exact = None;
        if sf.eval(&hi).is_zero() {
            exact = Some(hi.clone());
        }
        while exact.is_none() && &hi - &lo >= width_target {
            let mid = (&lo + &hi) / Rational::from_integer(2.into());
            if sf.eval(&mid).is_zero() {
                exact = Some(mid);
                break;
            }
            if sturm.count(&lo, &mid) == 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if exact.is_none() {
            // integers m with lo < m/lc <= hi
            let m = (&hi * &lc).floor();
            let cand = m / &lc;
            if cand > lo && sf.eval(&cand).is_zero() {
                exact = Some(cand);
            }
        }
        match exact {
            Some(r) => out.rational.push(r),
            None => out.irrational.push((lo, hi)),
        }
    }
    out.rational.sort();
    out.irrational.sort();
    out
}

/// Narrows an isolating interval of a simple root to width below `eps`.
pub fn refine_root(p: &UPoly, lo: &Rational, hi: &Rational, eps: f64) -> (Rational, Rational) {
    let sf = p.squarefree();
    let sturm = Sturm::new(&sf);
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    while (&hi - &lo).to_f64().unwrap_or(0.0) > eps {
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        if sturm.count(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}
