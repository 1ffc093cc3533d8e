//! Numeric trajectories of `q'' = -grad V` and drift of first integrals.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constraints::Potential;
use crate::error::{Error, Result};
use crate::exponential::assemble_integral3;
use crate::qfi::{ExponentialRate, Qfi, TimeBasis};
use crate::ring::{Rational, RingElem};

/// Distance from the origin below which integration stops.
pub const SINGULAR_RADIUS: f64 = 1e-6;

/// A ring element flattened to floating-point terms.
#[derive(Clone, Debug)]
pub struct CompiledElem {
    dim: usize,
    terms: Vec<(f64, Vec<i32>, i32)>,
}

impl CompiledElem {
    pub fn new(e: &RingElem) -> Self {
        CompiledElem {
            dim: e.dim(),
            terms: e
                .terms()
                .map(|(m, c)| {
                    (
                        c.to_f64().unwrap_or(f64::NAN),
                        m.coord_exponents().iter().map(|&x| x as i32).collect(),
                        m.r_exponent(),
                    )
                })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at `q` with `r = |q|` supplied by the caller.
    pub fn eval(&self, q: &[f64], r: f64) -> f64 {
        debug_assert_eq!(q.len(), self.dim);
        let mut acc = 0.0;
        for (c, exps, re) in &self.terms {
            let mut v = *c;
            for (x, &e) in q.iter().zip(exps) {
                if e != 0 {
                    v *= x.powi(e);
                }
            }
            if *re != 0 {
                v *= r.powi(*re);
            }
            acc += v;
        }
        acc
    }
}

#[derive(Clone, Debug)]
struct CompiledCoeff {
    even: CompiledElem,
    odd: CompiledElem,
}

impl CompiledCoeff {
    fn eval(&self, q: &[f64], r: f64, lambda: Complex64) -> Complex64 {
        let mut z = Complex64::new(self.even.eval(q, r), 0.0);
        if !self.odd.is_zero() {
            z += lambda * self.odd.eval(q, r);
        }
        z
    }

    fn is_zero(&self) -> bool {
        self.even.is_zero() && self.odd.is_zero()
    }
}

#[derive(Clone, Debug)]
struct CompiledTerm {
    time: TimeBasis,
    lambda: Complex64,
    k2: Vec<(usize, usize, CompiledCoeff)>,
    k1: Vec<(usize, CompiledCoeff)>,
    k0: CompiledCoeff,
}

/// A QFI prepared for repeated numeric evaluation.
#[derive(Clone, Debug)]
pub struct CompiledQfi {
    dim: usize,
    terms: Vec<CompiledTerm>,
}

impl CompiledQfi {
    pub fn new(qfi: &Qfi) -> Self {
        let n = qfi.dim();
        let cc = |c: &crate::qfi::Coeff| CompiledCoeff {
            even: CompiledElem::new(&c.even),
            odd: CompiledElem::new(&c.odd),
        };
        let terms = qfi
            .terms()
            .iter()
            .map(|t| {
                let mut k2 = Vec::new();
                for a in 0..n {
                    for b in 0..n {
                        let c = cc(&t.k2[a][b]);
                        if !c.is_zero() {
                            k2.push((a, b, c));
                        }
                    }
                }
                let k1 = (0..n)
                    .map(|a| (a, cc(&t.k1[a])))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                CompiledTerm {
                    lambda: t
                        .time
                        .rate()
                        .map_or(Complex64::new(0.0, 0.0), |r| r.lambda_complex()),
                    time: t.time.clone(),
                    k2,
                    k1,
                    k0: cc(&t.k0),
                }
            })
            .collect();
        CompiledQfi { dim: n, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, t: f64, q: &[f64], v: &[f64]) -> Complex64 {
        let r = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let mut s = term.k0.eval(q, r, term.lambda);
            for (a, c) in &term.k1 {
                s += c.eval(q, r, term.lambda) * v[*a];
            }
            for (a, b, c) in &term.k2 {
                s += c.eval(q, r, term.lambda) * (v[*a] * v[*b]);
            }
            acc += term.time.evaluate(t) * s;
        }
        acc
    }
}

/// The force field `-grad V` in floating point.
#[derive(Clone, Debug)]
pub struct Force {
    comps: Vec<CompiledElem>,
    singular: bool,
}

impl Force {
    pub fn new(v: &Potential) -> Self {
        Force {
            comps: v.gradient().iter().map(|g| CompiledElem::new(&-g)).collect(),
            singular: v.expr().has_negative_r(),
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    fn eval(&self, q: &[f64], out: &mut [f64]) {
        let r = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (o, c) in out.iter_mut().zip(&self.comps) {
            *o = c.eval(q, r);
        }
    }
}

/// A fixed-step RK4 solution; `states[i]` is `(q, v)` at `times[i]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<(Vec<f64>, Vec<f64>)>,
    pub step: f64,
    /// Set when the orbit came within [`SINGULAR_RADIUS`] of the origin.
    pub aborted: bool,
}

impl Trajectory {
    pub fn last(&self) -> &(Vec<f64>, Vec<f64>) {
        self.states.last().expect("nonempty trajectory")
    }
}

/// Classic RK4 on `q' = v, v' = -grad V` from `t = 0` to `t_end`.
pub fn integrate(v: &Potential, q0: &[f64], v0: &[f64], t_end: f64, h: f64) -> Result<Trajectory> {
    integrate_with(&Force::new(v), q0, v0, t_end, h)
}

pub fn integrate_with(
    force: &Force,
    q0: &[f64],
    v0: &[f64],
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    let n = force.dim();
    if q0.len() != n || v0.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: q0.len().max(v0.len()),
        });
    }
    if !(h > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Verification(format!(
            "bad step {h} or end time {t_end}"
        )));
    }
    let near = |q: &[f64]| force.singular && q.iter().map(|x| x * x).sum::<f64>().sqrt() < SINGULAR_RADIUS;
    if near(q0) {
        return Err(Error::Singular);
    }
    let steps = (t_end / h).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut q = q0.to_vec();
    let mut p = v0.to_vec();
    times.push(0.0);
    states.push((q.clone(), p.clone()));

    let mut a1 = vec![0.0; n];
    let mut a2 = vec![0.0; n];
    let mut a3 = vec![0.0; n];
    let mut a4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut aborted = false;
    for i in 1..=steps {
        force.eval(&q, &mut a1);
        for k in 0..n {
            tmp[k] = q[k] + 0.5 * h * p[k];
        }
        force.eval(&tmp, &mut a2);
        for k in 0..n {
            tmp[k] = q[k] + 0.5 * h * p[k] + 0.25 * h * h * a1[k];
        }
        force.eval(&tmp, &mut a3);
        for k in 0..n {
            tmp[k] = q[k] + h * p[k] + 0.5 * h * h * a2[k];
        }
        force.eval(&tmp, &mut a4);
        for k in 0..n {
            q[k] += h * p[k] + h * h / 6.0 * (a1[k] + a2[k] + a3[k]);
            p[k] += h / 6.0 * (a1[k] + 2.0 * a2[k] + 2.0 * a3[k] + a4[k]);
        }
        times.push(i as f64 * h);
        states.push((q.clone(), p.clone()));
        if near(&q) || q.iter().chain(&p).any(|x| !x.is_finite()) {
            aborted = true;
            break;
        }
    }
    Ok(Trajectory {
        times,
        states,
        step: h,
        aborted,
    })
}

/// Relative drift of a first integral along a trajectory.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Drift {
    /// `max |I - I0| / max(1, |I0|)`.
    pub total: f64,
    pub real: f64,
    pub imag: f64,
    pub modulus: f64,
    pub initial: Complex64,
}

impl Drift {
    pub fn worst(&self) -> f64 {
        self.total.max(self.real).max(self.imag).max(self.modulus)
    }
}

pub fn drift(qfi: &CompiledQfi, traj: &Trajectory) -> Drift {
    let (q0, v0) = &traj.states[0];
    let i0 = qfi.eval(traj.times[0], q0, v0);
    let scale = i0.norm().max(1.0);
    let mut d = Drift {
        initial: i0,
        ..Drift::default()
    };
    for (t, (q, v)) in traj.times.iter().zip(&traj.states) {
        let i = qfi.eval(*t, q, v);
        let diff = i - i0;
        d.total = d.total.max(diff.norm() / scale);
        d.real = d.real.max(diff.re.abs() / scale);
        d.imag = d.imag.max(diff.im.abs() / scale);
        d.modulus = d.modulus.max((i.norm() - i0.norm()).abs() / scale);
    }
    d
}

/// Seeded regular initial conditions: `|q0|` in `[0.8, 1.2]`, a tangential
/// speed at or slightly above the circular value and a small outward radial
/// component, so attractive singular potentials do not plunge into `r = 0`.
pub fn initial_conditions(v: &Potential, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = v.dim();
    let grad: Vec<CompiledElem> = v.gradient().iter().map(CompiledElem::new).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(0.2..=1.0).contains(&norm) {
            continue;
        }
        let radius = rng.gen_range(0.8..1.2);
        let q: Vec<f64> = dir.iter().map(|x| x / norm * radius).collect();
        let rhat: Vec<f64> = q.iter().map(|x| x / radius).collect();
        // a random unit vector orthogonal to q
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let wr: f64 = w.iter().zip(&rhat).map(|(a, b)| a * b).sum();
        let tang: Vec<f64> = w.iter().zip(&rhat).map(|(a, b)| a - wr * b).collect();
        let tn = tang.iter().map(|x| x * x).sum::<f64>().sqrt();
        if tn < 0.1 {
            continue;
        }
        let qdotgrad: f64 = grad
            .iter()
            .zip(&q)
            .map(|(g, x)| g.eval(&q, radius) * x)
            .sum();
        let vc = qdotgrad.abs().sqrt();
        let speed = if vc < 0.1 {
            rng.gen_range(0.5..1.5)
        } else {
            rng.gen_range(1.0..1.2) * vc
        };
        let radial = rng.gen_range(0.0..0.1) * vc.max(0.1);
        let vel: Vec<f64> = tang
            .iter()
            .zip(&rhat)
            .map(|(t, r)| t / tn * speed + r * radial)
            .collect();
        out.push((q, vel));
    }
    out
}

/// Drift of each QFI on each seeded initial condition.
#[derive(Clone, Debug)]
pub struct DriftTable {
    /// `rows[i][j]`: QFI `i` on initial condition `j`.
    pub rows: Vec<Vec<Drift>>,
    pub initial_conditions: Vec<(Vec<f64>, Vec<f64>)>,
    pub aborted: Vec<bool>,
}

impl DriftTable {
    pub fn max_drift(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(Drift::worst)
            .fold(0.0, f64::max)
    }

    pub fn max_for(&self, i: usize) -> f64 {
        self.rows[i].iter().map(Drift::worst).fold(0.0, f64::max)
    }
}

/// Settings of the numeric drift check.
#[derive(Clone, Copy, Debug)]
pub struct DriftConfig {
    pub t_end: f64,
    pub step: f64,
    pub seeds: usize,
    pub seed: u64,
}

impl Default for DriftConfig {
    fn default() -> Self {
        DriftConfig {
            t_end: 10.0,
            step: 1e-3,
            seeds: 10,
            seed: 0,
        }
    }
}

/// Integrates every initial condition in parallel and measures each QFI.
pub fn drift_table(v: &Potential, qfis: &[Qfi], cfg: &DriftConfig) -> Result<DriftTable> {
    for q in qfis {
        if q.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                left: v.dim(),
                right: q.dim(),
            });
        }
    }
    let force = Force::new(v);
    let compiled: Vec<CompiledQfi> = qfis.iter().map(CompiledQfi::new).collect();
    let ics = initial_conditions(v, cfg.seeds, cfg.seed);
    let per_ic: Vec<Result<(Vec<Drift>, bool)>> = ics
        .par_iter()
        .map(|(q0, v0)| {
            let traj = integrate_with(&force, q0, v0, cfg.t_end, cfg.step)?;
            Ok((
                compiled.iter().map(|c| drift(c, &traj)).collect(),
                traj.aborted,
            ))
        })
        .collect();
    let mut rows = vec![Vec::with_capacity(ics.len()); qfis.len()];
    let mut aborted = Vec::with_capacity(ics.len());
    for r in per_ic {
        let (ds, ab) = r?;
        for (row, d) in rows.iter_mut().zip(ds) {
            row.push(d);
        }
        aborted.push(ab);
    }
    Ok(DriftTable {
        rows,
        initial_conditions: ics,
        aborted,
    })
}

/// Energy drift on the unit circular Kepler orbit for steps `h` and `h/2`;
/// returns `(drift(h), drift(h/2), ratio)`.
pub fn rk4_order_check(h: f64, t_end: f64) -> Result<(f64, f64, f64)> {
    let v = Potential::parse(3, "-1/r")?;
    let energy = CompiledQfi::new(&Qfi::energy(v.expr()));
    let q0 = [1.0, 0.0, 0.0];
    let v0 = [0.0, 1.0, 0.0];
    let d1 = drift(&energy, &integrate(&v, &q0, &v0, t_end, h)?).total;
    let d2 = drift(&energy, &integrate(&v, &q0, &v0, t_end, h / 2.0)?).total;
    Ok((d1, d2, d1 / d2))
}

/// Closed-form motion in `V = -k r^2` built from the exponential integrals
/// `I_a(+-) = exp(+-lambda t)(v_a -+ lambda q_a)`, `lambda^2 = 2k`.
#[derive(Clone, Debug)]
pub struct QuadratureSolution {
    pub k: Rational,
    pub lambda: Complex64,
    /// Values of `I_a(+)` at `t = 0`, one per axis.
    pub plus: Vec<Complex64>,
    /// Values of `I_a(-)` at `t = 0`.
    pub minus: Vec<Complex64>,
    pub integrals_plus: Vec<Qfi>,
    pub integrals_minus: Vec<Qfi>,
}

impl QuadratureSolution {
    /// `q_a(t) = (I_a(-) e^{lambda t} - I_a(+) e^{-lambda t}) / (2 lambda)`.
    pub fn position(&self, t: f64) -> Vec<f64> {
        let ep = (self.lambda * t).exp();
        let em = (-self.lambda * t).exp();
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(ip, im)| ((im * ep - ip * em) / (2.0 * self.lambda)).re)
            .collect()
    }

    /// `v_a(t) = (I_a(+) e^{-lambda t} + I_a(-) e^{lambda t}) / 2`.
    pub fn velocity(&self, t: f64) -> Vec<f64> {
        let ep = (self.lambda * t).exp();
        let em = (-self.lambda * t).exp();
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(ip, im)| ((ip * em + im * ep) / 2.0).re)
            .collect()
    }

    /// Largest deviation of positions and velocities from a trajectory.
    pub fn sup_error(&self, traj: &Trajectory) -> f64 {
        let mut err: f64 = 0.0;
        for (t, (q, v)) in traj.times.iter().zip(&traj.states) {
            let qc = self.position(*t);
            let vc = self.velocity(*t);
            for a in 0..q.len() {
                err = err.max((q[a] - qc[a]).abs()).max((v[a] - vc[a]).abs());
            }
        }
        err
    }
}

/// Reconstructs the motion in `V = -k r^2` from its exponential integrals.
pub fn quadrature_solution(dim: usize, k: &Rational, q0: &[f64], v0: &[f64]) -> Result<QuadratureSolution> {
    if num_traits::Zero::is_zero(k) {
        return Err(Error::PotentialForm("k must be nonzero".into()));
    }
    if q0.len() != dim || v0.len() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: q0.len().max(v0.len()),
        });
    }
    let v = Potential::power_law(dim, -k.clone(), -2);
    let mu = k * Rational::from_integer(2.into());
    let plus_rate = ExponentialRate::new(mu.clone(), 1)?;
    let minus_rate = ExponentialRate::new(mu, -1)?;
    let mut integrals_plus = Vec::new();
    let mut integrals_minus = Vec::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for a in 0..dim {
        let l = crate::geometry::VectorField::new(
            (0..dim)
                .map(|b| {
                    if a == b {
                        RingElem::one(dim)
                    } else {
                        RingElem::zero(dim)
                    }
                })
                .collect(),
        )?;
        let ip = assemble_integral3(&v, &plus_rate, &l)?;
        let im = assemble_integral3(&v, &minus_rate, &l)?;
        plus.push(ip.evaluate(0.0, q0, v0)?);
        minus.push(im.evaluate(0.0, q0, v0)?);
        integrals_plus.push(ip);
        integrals_minus.push(im);
    }
    Ok(QuadratureSolution {
        k: k.clone(),
        lambda: plus_rate.lambda_complex(),
        plus,
        minus,
        integrals_plus,
        integrals_minus,
    })
}
