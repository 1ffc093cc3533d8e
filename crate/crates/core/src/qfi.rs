//! Quadratic first integrals `I = sum_terms g(t) (K_ab v^a v^b + K_a v^a + K)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{coordinate_names, format_rational, join_signed, term_string, Rational, RingElem};

/// Writes `n = s^2 d` with `d` free of square factors found by trial
/// division. `d` carries the sign of `n`.
pub fn square_split(n: &BigInt) -> (BigInt, BigInt) {
    if n.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut s = BigInt::one();
    let mut d = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(100_000u32);
    while &p * &p <= m && p <= limit {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &p;
        }
        if e % 2 == 1 {
            d *= &p;
        }
        p += 1;
    }
    // whatever is left is prime (small case) or a large cofactor
    let r = m.sqrt();
    if &r * &r == m {
        s *= r;
    } else {
        d *= m;
    }
    (s, d * sign)
}

/// The rate `lambda` of an exponential time factor, stored through
/// `mu = lambda^2` and the sign of the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentialRate {
    mu: Rational,
    sign: i8,
}

impl ExponentialRate {
    pub fn new(mu: Rational, sign: i8) -> Result<Self> {
        if mu.is_zero() {
            return Err(Error::Verification("exponential rate must be nonzero".into()));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Verification("rate sign must be +1 or -1".into()));
        }
        Ok(ExponentialRate { mu, sign })
    }

    pub fn lambda_squared(&self) -> &Rational {
        &self.mu
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// The same `mu` with the opposite root.
    pub fn conjugate(&self) -> Self {
        ExponentialRate {
            mu: self.mu.clone(),
            sign: -self.sign,
        }
    }

    pub fn is_real(&self) -> bool {
        self.mu.is_positive()
    }

    /// `lambda = c * sqrt(d)` with rational `c` (sign included) and integer
    /// radicand `d`; `d = 1` when `lambda` is rational, `d < 0` when it is
    /// imaginary.
    pub fn surd(&self) -> (Rational, BigInt) {
        let p = self.mu.numer();
        let q = self.mu.denom();
        let (s, d) = square_split(&(p * q));
        let c = Rational::new(s, q.clone());
        let c = if self.sign < 0 { -c } else { c };
        (c, d)
    }

    /// Exact value when `lambda` is rational.
    pub fn rational_lambda(&self) -> Option<Rational> {
        let (c, d) = self.surd();
        if d.is_one() {
            Some(c)
        } else {
            None
        }
    }

    pub fn lambda_complex(&self) -> Complex64 {
        let m = self.mu.to_f64().unwrap_or(f64::NAN);
        let root = if m >= 0.0 {
            Complex64::new(m.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-m).sqrt())
        };
        root * self.sign as f64
    }
}

impl fmt::Display for ExponentialRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, d) = self.surd();
        let neg = c.is_negative();
        let c = c.abs();
        let mut parts = Vec::new();
        if !c.is_one() {
            parts.push(format_rational(&c));
        }
        let dabs = d.abs();
        if d.is_negative() {
            parts.push("i".to_string());
        }
        if !dabs.is_one() {
            parts.push(format!("sqrt({dabs})"));
        }
        if parts.is_empty() {
            parts.push("1".to_string());
        }
        write!(f, "{}{}", if neg { "-" } else { "" }, parts.join("*"))
    }
}

/// Time factor of a QFI term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TimeBasis {
    Poly(u32),
    Exp(ExponentialRate),
}

impl TimeBasis {
    pub fn evaluate(&self, t: f64) -> Complex64 {
        match self {
            TimeBasis::Poly(k) => Complex64::new(t.powi(*k as i32), 0.0),
            TimeBasis::Exp(rate) => (rate.lambda_complex() * t).exp(),
        }
    }

    pub fn rate(&self) -> Option<&ExponentialRate> {
        match self {
            TimeBasis::Exp(r) => Some(r),
            TimeBasis::Poly(_) => None,
        }
    }
}

/// Display order: exponentials first, then descending powers of `t`.
impl Ord for TimeBasis {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TimeBasis::Exp(a), TimeBasis::Exp(b)) => a.cmp(b),
            (TimeBasis::Exp(_), TimeBasis::Poly(_)) => Ordering::Less,
            (TimeBasis::Poly(_), TimeBasis::Exp(_)) => Ordering::Greater,
            (TimeBasis::Poly(a), TimeBasis::Poly(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for TimeBasis {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Coefficient `even + lambda * odd`. Only exponential terms carry an odd
/// part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coeff {
    pub even: RingElem,
    pub odd: RingElem,
}

impl Coeff {
    pub fn zero(dim: usize) -> Self {
        Coeff {
            even: RingElem::zero(dim),
            odd: RingElem::zero(dim),
        }
    }

    pub fn real(even: RingElem) -> Self {
        let dim = even.dim();
        Coeff {
            even,
            odd: RingElem::zero(dim),
        }
    }

    pub fn new(even: RingElem, odd: RingElem) -> Self {
        Coeff { even, odd }
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_zero() && self.odd.is_zero()
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        Coeff {
            even: &self.even + &other.even,
            odd: &self.odd + &other.odd,
        }
    }

    pub fn scale(&self, c: &Rational) -> Coeff {
        Coeff {
            even: self.even.scale(c),
            odd: self.odd.scale(c),
        }
    }

    pub fn neg(&self) -> Coeff {
        self.scale(&-Rational::one())
    }

    pub fn evaluate(&self, q: &[f64], lambda: Complex64) -> Result<Complex64> {
        let e = self.even.evaluate(q)?;
        if self.odd.is_zero() {
            return Ok(Complex64::new(e, 0.0));
        }
        Ok(Complex64::new(e, 0.0) + lambda * self.odd.evaluate(q)?)
    }
}

/// One time factor with its spatial tensors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QfiTerm {
    pub time: TimeBasis,
    pub k2: Vec<Vec<Coeff>>,
    pub k1: Vec<Coeff>,
    pub k0: Coeff,
}

impl QfiTerm {
    pub fn zero(dim: usize, time: TimeBasis) -> Self {
        QfiTerm {
            time,
            k2: vec![vec![Coeff::zero(dim); dim]; dim],
            k1: vec![Coeff::zero(dim); dim],
            k0: Coeff::zero(dim),
        }
    }

    /// Term with λ-even coefficients only.
    pub fn real(time: TimeBasis, k2: Vec<Vec<RingElem>>, k1: Vec<RingElem>, k0: RingElem) -> Self {
        QfiTerm {
            time,
            k2: k2
                .into_iter()
                .map(|r| r.into_iter().map(Coeff::real).collect())
                .collect(),
            k1: k1.into_iter().map(Coeff::real).collect(),
            k0: Coeff::real(k0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.k0.is_zero()
            && self.k1.iter().all(|c| c.is_zero())
            && self.k2.iter().flatten().all(|c| c.is_zero())
    }

    fn add(&self, other: &QfiTerm) -> QfiTerm {
        QfiTerm {
            time: self.time.clone(),
            k2: self
                .k2
                .iter()
                .zip(&other.k2)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
                .collect(),
            k1: self.k1.iter().zip(&other.k1).map(|(a, b)| a.add(b)).collect(),
            k0: self.k0.add(&other.k0),
        }
    }

    fn scale(&self, c: &Rational) -> QfiTerm {
        QfiTerm {
            time: self.time.clone(),
            k2: self
                .k2
                .iter()
                .map(|r| r.iter().map(|x| x.scale(c)).collect())
                .collect(),
            k1: self.k1.iter().map(|x| x.scale(c)).collect(),
            k0: self.k0.scale(c),
        }
    }
}

/// A quadratic first integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qfi {
    dim: usize,
    terms: Vec<QfiTerm>,
}

impl Qfi {
    pub fn zero(dim: usize) -> Self {
        Qfi {
            dim,
            terms: Vec::new(),
        }
    }

    /// Builds a QFI; terms sharing a time factor are merged, zero terms
    /// dropped, and `K_ab` is checked for symmetry.
    pub fn new(dim: usize, terms: Vec<QfiTerm>) -> Result<Self> {
        for t in &terms {
            if t.k2.len() != dim || t.k1.len() != dim || t.k2.iter().any(|r| r.len() != dim) {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: t.k1.len(),
                });
            }
            for a in 0..dim {
                for b in 0..a {
                    if t.k2[a][b] != t.k2[b][a] {
                        return Err(Error::Verification(format!(
                            "K_ab is not symmetric in ({a},{b})"
                        )));
                    }
                }
            }
            if let TimeBasis::Poly(_) = t.time {
                let all_even = t.k0.odd.is_zero()
                    && t.k1.iter().all(|c| c.odd.is_zero())
                    && t.k2.iter().flatten().all(|c| c.odd.is_zero());
                if !all_even {
                    return Err(Error::Verification(
                        "lambda-odd coefficient on a polynomial time factor".into(),
                    ));
                }
            }
        }
        let mut merged: Vec<QfiTerm> = Vec::new();
        for t in terms {
            match merged.iter_mut().find(|m| m.time == t.time) {
                Some(m) => *m = m.add(&t),
                None => merged.push(t),
            }
        }
        merged.retain(|t| !t.is_zero());
        merged.sort_by(|a, b| a.time.cmp(&b.time));
        Ok(Qfi { dim, terms: merged })
    }

    /// `1/2 |v|^2 + V`.
    pub fn energy(potential: &RingElem) -> Self {
        let n = potential.dim();
        let mut k2 = vec![vec![RingElem::zero(n); n]; n];
        for (a, row) in k2.iter_mut().enumerate() {
            row[a] = RingElem::constant(n, Rational::new(1.into(), 2.into()));
        }
        Qfi::new(
            n,
            vec![QfiTerm::real(
                TimeBasis::Poly(0),
                k2,
                vec![RingElem::zero(n); n],
                potential.clone(),
            )],
        )
        .expect("well-formed")
    }

    /// `q_a v_b - q_b v_a`.
    pub fn angular_momentum(dim: usize, a: usize, b: usize) -> Self {
        let mut k1 = vec![RingElem::zero(dim); dim];
        k1[b] = RingElem::coord(dim, a);
        k1[a] = -RingElem::coord(dim, b);
        Qfi::new(
            dim,
            vec![QfiTerm::real(
                TimeBasis::Poly(0),
                vec![vec![RingElem::zero(dim); dim]; dim],
                k1,
                RingElem::zero(dim),
            )],
        )
        .expect("well-formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[QfiTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The exponential rate shared by the exponential terms, if any.
    pub fn rates(&self) -> Vec<&ExponentialRate> {
        self.terms.iter().filter_map(|t| t.time.rate()).collect()
    }

    pub fn add(&self, other: &Qfi) -> Result<Qfi> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Qfi::new(self.dim, terms)
    }

    pub fn scale(&self, c: &Rational) -> Qfi {
        Qfi::new(self.dim, self.terms.iter().map(|t| t.scale(c)).collect()).expect("well-formed")
    }

    /// Numeric value at a phase point; complex when an imaginary rate occurs.
    pub fn evaluate(&self, t: f64, q: &[f64], v: &[f64]) -> Result<Complex64> {
        if q.len() != self.dim || v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: q.len().max(v.len()),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let lambda = term
                .time
                .rate()
                .map_or(Complex64::new(0.0, 0.0), |r| r.lambda_complex());
            let mut s = term.k0.evaluate(q, lambda)?;
            for a in 0..self.dim {
                s += term.k1[a].evaluate(q, lambda)? * v[a];
                for b in 0..self.dim {
                    let c = &term.k2[a][b];
                    if !c.is_zero() {
                        s += c.evaluate(q, lambda)? * (v[a] * v[b]);
                    }
                }
            }
            acc += term.time.evaluate(t) * s;
        }
        Ok(acc)
    }

    /// Noether generator read off from the coefficients.
    pub fn noether_generator(&self) -> NoetherGenerator {
        NoetherGenerator {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| NoetherTerm {
                    time: t.time.clone(),
                    eta_velocity: t
                        .k2
                        .iter()
                        .map(|r| r.iter().map(|c| c.neg()).collect())
                        .collect(),
                    eta_position: t.k1.iter().map(|c| c.neg()).collect(),
                    gauge: t.k0.clone(),
                })
                .collect(),
        }
    }

    /// Deterministic text form. Velocities print as `vx, vy, vz` (or `v1..`).
    pub fn canonical_display(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let names = coordinate_names(self.dim);
        let vnames = velocity_names(self.dim);
        let multi = self.terms.len() > 1;
        let mut pieces = Vec::new();
        let mut notes = Vec::new();
        for term in &self.terms {
            let (prefix, lam) = match &term.time {
                TimeBasis::Poly(0) => (None, None),
                TimeBasis::Poly(1) => (Some("t".to_string()), None),
                TimeBasis::Poly(k) => (Some(format!("t^{k}")), None),
                TimeBasis::Exp(rate) => match rate.rational_lambda() {
                    Some(c) => (Some(format!("exp({}*t)", format_rational(&c))), Some(c)),
                    None => {
                        notes.push(format!(
                            "lambda = {rate}, lambda^2 = {}",
                            format_rational(rate.lambda_squared())
                        ));
                        (Some("exp(lambda*t)".to_string()), None)
                    }
                },
            };
            let body = body_string(term, &names, &vnames, lam.as_ref());
            pieces.push(match prefix {
                None if multi => format!("({body})"),
                None => body,
                Some(p) => format!("{p}*({body})"),
            });
        }
        let mut s = pieces.join(" + ");
        if !notes.is_empty() {
            notes.dedup();
            s.push_str(&format!(" [{}]", notes.join("; ")));
        }
        s
    }

    /// JSON document in the interchange schema.
    pub fn to_json_value(&self) -> QfiJson {
        let names = coordinate_names(self.dim);
        let fmt = |e: &RingElem| e.format_with(&names);
        QfiJson {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let has_odd = !t.k0.odd.is_zero()
                        || t.k1.iter().any(|c| !c.odd.is_zero())
                        || t.k2.iter().flatten().any(|c| !c.odd.is_zero());
                    TermJson {
                        time: match &t.time {
                            TimeBasis::Poly(k) => TimeJson::Poly { poly: *k },
                            TimeBasis::Exp(r) => TimeJson::Exp {
                                exp_lambda2: format_rational(r.lambda_squared()),
                                sign: r.sign(),
                            },
                        },
                        k2: t
                            .k2
                            .iter()
                            .map(|r| r.iter().map(|c| fmt(&c.even)).collect())
                            .collect(),
                        k1: t.k1.iter().map(|c| fmt(&c.even)).collect(),
                        k0: fmt(&t.k0.even),
                        k2_lambda: has_odd.then(|| {
                            t.k2.iter()
                                .map(|r| r.iter().map(|c| fmt(&c.odd)).collect())
                                .collect()
                        }),
                        k1_lambda: has_odd.then(|| t.k1.iter().map(|c| fmt(&c.odd)).collect()),
                        k0_lambda: has_odd.then(|| fmt(&t.k0.odd)),
                    }
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializable")
    }

    /// Rebuilds a QFI from its JSON form.
    pub fn from_json_value(doc: &QfiJson) -> Result<Qfi> {
        let n = doc.dim;
        let parse = |s: &str| crate::parse::parse_ring_elem(n, s);
        let mut terms = Vec::new();
        for t in &doc.terms {
            let time = match &t.time {
                TimeJson::Poly { poly } => TimeBasis::Poly(*poly),
                TimeJson::Exp { exp_lambda2, sign } => {
                    let mu = crate::ring::parse_rational(exp_lambda2)
                        .ok_or_else(|| Error::Json(format!("bad rational {exp_lambda2:?}")))?;
                    TimeBasis::Exp(ExponentialRate::new(mu, *sign)?)
                }
            };
            if t.k2.len() != n || t.k1.len() != n || t.k2.iter().any(|r| r.len() != n) {
                return Err(Error::Json(format!("tensor shapes do not match dim {n}")));
            }
            let k2 = (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| {
                            let odd = match &t.k2_lambda {
                                Some(m) => parse(field(m, a, b)?)?,
                                None => RingElem::zero(n),
                            };
                            Ok(Coeff::new(parse(&t.k2[a][b])?, odd))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let k1 = (0..n)
                .map(|a| {
                    let odd = match &t.k1_lambda {
                        Some(v) => parse(v.get(a).ok_or_else(|| Error::Json("k1_lambda".into()))?)?,
                        None => RingElem::zero(n),
                    };
                    Ok(Coeff::new(parse(&t.k1[a])?, odd))
                })
                .collect::<Result<Vec<_>>>()?;
            let k0 = Coeff::new(
                parse(&t.k0)?,
                match &t.k0_lambda {
                    Some(s) => parse(s)?,
                    None => RingElem::zero(n),
                },
            );
            terms.push(QfiTerm { time, k2, k1, k0 });
        }
        Qfi::new(n, terms)
    }

    pub fn from_json(s: &str) -> Result<Qfi> {
        let doc: QfiJson = serde_json::from_str(s)?;
        Qfi::from_json_value(&doc)
    }
}

fn field(m: &[Vec<String>], a: usize, b: usize) -> Result<&str> {
    m.get(a)
        .and_then(|r| r.get(b))
        .map(|s| s.as_str())
        .ok_or_else(|| Error::Json("k2_lambda shape".into()))
}

impl fmt::Display for Qfi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_display())
    }
}

pub fn velocity_names(dim: usize) -> Vec<String> {
    coordinate_names(dim).iter().map(|n| format!("v{n}")).collect()
}

/// Sort key for a body term: velocity degree, total degree, exponents of
/// `(q, v)`, exponent of `r`, `lambda` flag.
type BodyKey = (u32, u32, Vec<u16>, i32, bool);

fn body_string(
    term: &QfiTerm,
    names: &[String],
    vnames: &[String],
    rational_lambda: Option<&Rational>,
) -> String {
    let n = names.len();
    let mut items: Vec<(BodyKey, Rational, String)> = Vec::new();
    let mut push = |coeff: &Coeff, vel: Vec<u16>, mult: Rational| {
        let parts: [(&RingElem, bool); 2] = [(&coeff.even, false), (&coeff.odd, true)];
        for (elem, is_odd) in parts {
            for (m, c) in elem.terms() {
                let mut c = c * &mult;
                let mut lam_flag = is_odd;
                if is_odd {
                    if let Some(l) = rational_lambda {
                        c *= l;
                        lam_flag = false;
                    }
                }
                let vdeg: u32 = vel.iter().map(|&e| e as u32).sum();
                let mut exps: Vec<u16> = m.coord_exponents().to_vec();
                exps.extend(vel.iter().copied());
                let total = m.coord_degree() + vdeg;
                let mut body = Vec::new();
                if lam_flag {
                    body.push("lambda".to_string());
                }
                if let Some(s) = m.format_with(names) {
                    body.push(s);
                }
                for (name, &e) in vnames.iter().zip(&vel) {
                    match e {
                        0 => {}
                        1 => body.push(name.clone()),
                        _ => body.push(format!("{name}^{e}")),
                    }
                }
                let body = if body.is_empty() {
                    None
                } else {
                    Some(body.join("*"))
                };
                items.push((
                    (vdeg, total, exps, m.r_exponent(), lam_flag),
                    c,
                    body.unwrap_or_default(),
                ));
            }
        }
    };
    for a in 0..n {
        for b in a..n {
            let mut vel = vec![0u16; n];
            vel[a] += 1;
            vel[b] += 1;
            let mult = if a == b {
                Rational::one()
            } else {
                Rational::from_integer(2.into())
            };
            push(&term.k2[a][b], vel, mult);
        }
    }
    for a in 0..n {
        let mut vel = vec![0u16; n];
        vel[a] = 1;
        push(&term.k1[a], vel, Rational::one());
    }
    push(&term.k0, vec![0u16; n], Rational::one());
    // merge equal keys (possible when a rational lambda folds odd into even)
    items.sort_by(|x, y| y.0.cmp(&x.0));
    let mut merged: Vec<(BodyKey, Rational, String)> = Vec::new();
    for it in items {
        match merged.last_mut() {
            Some(last) if last.0 == it.0 => last.1 += it.1,
            _ => merged.push(it),
        }
    }
    let pieces = merged
        .into_iter()
        .filter(|(_, c, _)| !c.is_zero())
        .map(|(_, c, body)| term_string(&c, if body.is_empty() { None } else { Some(body) }))
        .collect();
    join_signed(pieces)
}

/// `eta_a = eta_velocity_ab v^b + eta_position_a`, gauge `f`, per time factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoetherTerm {
    pub time: TimeBasis,
    pub eta_velocity: Vec<Vec<Coeff>>,
    pub eta_position: Vec<Coeff>,
    pub gauge: Coeff,
}

/// Noether point-symmetry generator and gauge function of a QFI.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoetherGenerator {
    pub dim: usize,
    pub terms: Vec<NoetherTerm>,
}

impl NoetherGenerator {
    /// Reconstructs the QFI the generator was read from.
    pub fn to_qfi(&self) -> Qfi {
        Qfi {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| QfiTerm {
                    time: t.time.clone(),
                    k2: t
                        .eta_velocity
                        .iter()
                        .map(|r| r.iter().map(|c| c.neg()).collect())
                        .collect(),
                    k1: t.eta_position.iter().map(|c| c.neg()).collect(),
                    k0: t.gauge.clone(),
                })
                .collect(),
        }
    }

    /// One line per component, `eta_x = ...`, then `f = ...`.
    pub fn display_lines(&self) -> Vec<String> {
        let names = coordinate_names(self.dim);
        let mut lines = Vec::new();
        for a in 0..self.dim {
            let mut comp = Vec::new();
            for b in 0..self.dim {
                let mut k1 = vec![Coeff::zero(self.dim); self.dim];
                let mut sum = Vec::new();
                for t in &self.terms {
                    k1[b] = t.eta_velocity[a][b].clone();
                    sum.push(QfiTerm {
                        time: t.time.clone(),
                        k2: vec![vec![Coeff::zero(self.dim); self.dim]; self.dim],
                        k1: k1.clone(),
                        k0: Coeff::zero(self.dim),
                    });
                }
                comp.extend(sum);
            }
            for t in &self.terms {
                comp.push(QfiTerm {
                    time: t.time.clone(),
                    k2: vec![vec![Coeff::zero(self.dim); self.dim]; self.dim],
                    k1: vec![Coeff::zero(self.dim); self.dim],
                    k0: t.eta_position[a].clone(),
                });
            }
            let q = Qfi::new(self.dim, comp).expect("well-formed");
            lines.push(format!("eta_{} = {}", names[a], q.canonical_display()));
        }
        let gauge = Qfi::new(
            self.dim,
            self.terms
                .iter()
                .map(|t| QfiTerm {
                    time: t.time.clone(),
                    k2: vec![vec![Coeff::zero(self.dim); self.dim]; self.dim],
                    k1: vec![Coeff::zero(self.dim); self.dim],
                    k0: t.gauge.clone(),
                })
                .collect(),
        )
        .expect("well-formed");
        lines.push(format!("f = {}", gauge.canonical_display()));
        lines
    }
}

/// JSON form of a QFI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfiJson {
    pub dim: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub time: TimeJson,
    pub k2: Vec<Vec<String>>,
    pub k1: Vec<String>,
    pub k0: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2_lambda: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1_lambda: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0_lambda: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeJson {
    Poly { poly: u32 },
    Exp { exp_lambda2: String, sign: i8 },
}
