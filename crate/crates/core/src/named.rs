//! Hand-written first integrals of central power-law potentials
//! `V = -k r^(-l)`, used as references and by the bracket report.

use num_traits::{One, Zero};

use crate::constraints::Potential;
use crate::error::{Error, Result};
use crate::phase::{poisson_bracket, PhaseFunction};
use crate::qfi::{Qfi, QfiTerm, TimeBasis};
use crate::ring::{int, Rational, RingElem};

/// `V = -k r^(-l)` with `k != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerLaw {
    pub k: Rational,
    pub l: i32,
}

/// Recognizes `V = -k r^(-l)` for `|l| <= 8`.
pub fn classify(v: &Potential) -> Option<PowerLaw> {
    let n = v.dim();
    for l in -8..=8 {
        if l == 0 {
            continue;
        }
        let unit = Potential::power_law(n, Rational::one(), l);
        let k = match coefficient_ratio(v.expr(), unit.expr()) {
            Some(c) => -c,
            None => continue,
        };
        if !k.is_zero() {
            return Some(PowerLaw { k, l });
        }
    }
    None
}

fn coefficient_ratio(a: &RingElem, b: &RingElem) -> Option<Rational> {
    let (m, c) = b.terms().next()?;
    let ratio = a.coeff(m) / c;
    (b.scale(&ratio) == *a).then_some(ratio)
}

fn quadratic(dim: usize, k2: Vec<Vec<RingElem>>, k1: Vec<RingElem>, k0: RingElem) -> Qfi {
    Qfi::new(dim, vec![QfiTerm::real(TimeBasis::Poly(0), k2, k1, k0)]).expect("symmetric")
}

fn zeros(dim: usize) -> Vec<Vec<RingElem>> {
    vec![vec![RingElem::zero(dim); dim]; dim]
}

/// `(L1, L2, L3) = q x v` in three dimensions, `L = x vy - y vx` in two.
pub fn angular_momenta(dim: usize) -> Vec<Qfi> {
    if dim == 2 {
        vec![Qfi::angular_momentum(2, 0, 1)]
    } else {
        vec![
            Qfi::angular_momentum(3, 1, 2),
            Qfi::angular_momentum(3, 2, 0),
            Qfi::angular_momentum(3, 0, 1),
        ]
    }
}

/// `R_a = v^2 q_a - (q.v) v_a - k q_a / r` for `V = -k/r`.
pub fn runge_lenz(dim: usize, k: &Rational) -> Vec<Qfi> {
    let half = Rational::new(1.into(), 2.into());
    (0..dim)
        .map(|a| {
            let mut k2 = zeros(dim);
            for b in 0..dim {
                k2[b][b] = &k2[b][b] + &RingElem::coord(dim, a);
                let h = RingElem::coord(dim, b).scale(&-half.clone());
                k2[a][b] = &k2[a][b] + &h;
                k2[b][a] = &k2[b][a] + &h;
            }
            let k0 = (RingElem::coord(dim, a) * RingElem::radial_pow(dim, -1)).scale(&-k.clone());
            quadratic(dim, k2, vec![RingElem::zero(dim); dim], k0)
        })
        .collect()
}

/// `B_ab = v_a v_b - 2k q_a q_b` for `V = -k r^2`.
pub fn oscillator_tensor(dim: usize, k: &Rational, a: usize, b: usize) -> Qfi {
    let mut k2 = zeros(dim);
    let half = Rational::new(1.into(), 2.into());
    k2[a][b] = &k2[a][b] + &RingElem::constant(dim, half.clone());
    k2[b][a] = &k2[b][a] + &RingElem::constant(dim, half);
    let k0 = (RingElem::coord(dim, a) * RingElem::coord(dim, b)).scale(&(k * int(-2)));
    quadratic(dim, k2, vec![RingElem::zero(dim); dim], k0)
}

/// The time-dependent pair of `V = -k r^-2`:
/// `-H t^2 + t (q.v) - r^2/2` and `-H t + (q.v)/2`.
pub fn inverse_square_pair(dim: usize, k: &Rational) -> (Qfi, Qfi) {
    let v = Potential::power_law(dim, -k.clone(), 2);
    let h = Qfi::energy(v.expr());
    let qv = quadratic(
        dim,
        zeros(dim),
        (0..dim).map(|a| RingElem::coord(dim, a)).collect(),
        RingElem::zero(dim),
    );
    let r2 = quadratic(dim, zeros(dim), vec![RingElem::zero(dim); dim], RingElem::rho(dim));
    let half = Rational::new(1.into(), 2.into());
    let shift = |q: &Qfi, p: u32| {
        Qfi::new(
            dim,
            q.terms()
                .iter()
                .map(|t| {
                    let mut t = t.clone();
                    t.time = TimeBasis::Poly(p);
                    t
                })
                .collect(),
        )
        .expect("well-formed")
    };
    let i1 = shift(&h.scale(&int(-1)), 2)
        .add(&shift(&qv, 1))
        .and_then(|s| s.add(&r2.scale(&-half.clone())))
        .expect("same dim");
    let i2 = shift(&h.scale(&int(-1)), 1)
        .add(&qv.scale(&half))
        .expect("same dim");
    (i1, i2)
}

/// A named integral.
#[derive(Clone, Debug)]
pub struct Named {
    pub name: String,
    pub qfi: Qfi,
}

fn named(name: impl Into<String>, qfi: Qfi) -> Named {
    Named {
        name: name.into(),
        qfi,
    }
}

/// The reference set for a potential: `H` and the angular momenta, plus
/// `R_a` when `l = 1` and `B_11` when `l = -2`.
pub fn reference_set(v: &Potential) -> Vec<Named> {
    let n = v.dim();
    let mut out = vec![named("H", Qfi::energy(v.expr()))];
    let ls = angular_momenta(n);
    let central = ls
        .iter()
        .all(|l| crate::phase::is_first_integral(l, v.expr()).unwrap_or(false));
    if !central {
        return out;
    }
    if n == 2 {
        out.push(named("L", ls[0].clone()));
    } else {
        for (i, l) in ls.into_iter().enumerate() {
            out.push(named(format!("L{}", i + 1), l));
        }
    }
    match classify(v) {
        Some(PowerLaw { k, l: 1 }) => {
            for (i, r) in runge_lenz(n, &k).into_iter().enumerate() {
                out.push(named(format!("R{}", i + 1), r));
            }
        }
        Some(PowerLaw { k, l: -2 }) => out.push(named("B11", oscillator_tensor(n, &k, 0, 0))),
        _ => {}
    }
    out
}

/// Outcome of one named bracket identity.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

fn check(name: String, lhs: Result<PhaseFunction>, rhs: Result<PhaseFunction>) -> IdentityCheck {
    let holds = matches!((lhs, rhs), (Ok(a), Ok(b)) if a.sub(&b).is_ok_and(|d| d.is_zero()));
    IdentityCheck { name, holds }
}

/// Levi-Civita symbol on `{0, 1, 2}`.
pub fn epsilon(a: usize, b: usize, c: usize) -> i64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

fn phase(q: &Qfi) -> Result<PhaseFunction> {
    PhaseFunction::from_qfi(q)
}

/// The bracket identities of the angular momenta, and for `V = -k/r` in
/// three dimensions those of the Runge-Lenz vector together with
/// `R.L = 0` and `R^2 = k^2 + 2 H L^2`.
pub fn bracket_identities(v: &Potential) -> Result<Vec<IdentityCheck>> {
    let n = v.dim();
    let mut out = Vec::new();
    let h = PhaseFunction::hamiltonian(v.expr());
    let set = reference_set(v);
    for item in set.iter().skip(1) {
        let f = phase(&item.qfi)?;
        out.push(check(
            format!("{{H, {}}} = 0", item.name),
            poisson_bracket(&h, &f),
            Ok(PhaseFunction::zero(n)),
        ));
    }
    if n != 3 || set.len() < 4 {
        return Ok(out);
    }
    let ls: Vec<PhaseFunction> = angular_momenta(3).iter().map(phase).collect::<Result<_>>()?;
    let combo = |fs: &[PhaseFunction], a: usize, b: usize| -> Result<PhaseFunction> {
        let mut acc = PhaseFunction::zero(3);
        for c in 0..3 {
            let e = epsilon(a, b, c);
            if e != 0 {
                acc = acc.add(&fs[c].scale(&int(e)))?;
            }
        }
        Ok(acc)
    };
    for a in 0..3 {
        for b in a + 1..3 {
            out.push(check(
                format!("{{L{}, L{}}} = eps L", a + 1, b + 1),
                poisson_bracket(&ls[a], &ls[b]),
                combo(&ls, a, b),
            ));
        }
    }
    if let Some(PowerLaw { k, l: 1 }) = classify(v) {
        let rs: Vec<PhaseFunction> = runge_lenz(3, &k).iter().map(phase).collect::<Result<_>>()?;
        for a in 0..3 {
            for b in 0..3 {
                out.push(check(
                    format!("{{R{}, L{}}} = eps R", a + 1, b + 1),
                    poisson_bracket(&rs[a], &ls[b]),
                    combo(&rs, a, b),
                ));
            }
        }
        for a in 0..3 {
            for b in a + 1..3 {
                out.push(check(
                    format!("{{R{}, R{}}} = -2 eps L H", a + 1, b + 1),
                    poisson_bracket(&rs[a], &rs[b]),
                    combo(&ls, a, b).and_then(|l| l.mul(&h)).map(|x| x.scale(&int(-2))),
                ));
            }
        }
        let dot = |xs: &[PhaseFunction], ys: &[PhaseFunction]| -> Result<PhaseFunction> {
            let mut acc = PhaseFunction::zero(3);
            for (x, y) in xs.iter().zip(ys) {
                acc = acc.add(&x.mul(y)?)?;
            }
            Ok(acc)
        };
        out.push(check(
            "R.L = 0".into(),
            dot(&rs, &ls),
            Ok(PhaseFunction::zero(3)),
        ));
        let rhs = dot(&ls, &ls).and_then(|l2| {
            PhaseFunction::constant(3, &k * &k).add(&h.mul(&l2)?.scale(&int(2)))
        });
        out.push(check("R^2 = k^2 + 2 H L^2".into(), dot(&rs, &rs), rhs));
    }
    Ok(out)
}

/// Pairwise involution of a set: `matrix[i][j]` is `{f_i, f_j} == 0`.
pub fn involution_matrix(fs: &[PhaseFunction]) -> Result<Vec<Vec<bool>>> {
    fs.iter()
        .map(|f| {
            fs.iter()
                .map(|g| Ok(poisson_bracket(f, g)?.is_zero()))
                .collect()
        })
        .collect()
}

/// Rejects potentials the reference set cannot describe.
pub fn require_power_law(v: &Potential) -> Result<PowerLaw> {
    classify(v).ok_or_else(|| Error::PotentialForm(format!("{} is not of the form -k r^-l", v.expr())))
}
