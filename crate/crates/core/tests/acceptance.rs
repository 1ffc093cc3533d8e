//! Acceptance criteria. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use qfi_core::cli::discover;
use qfi_core::constraints::{solve_integral1, solve_integral2, Family, Potential};
use qfi_core::dynamics::{drift_table, integrate, quadrature_solution, DriftConfig};
use qfi_core::exponential::{build_pencil, critical_rates, solve_integral3};
use qfi_core::geometry::{kt_basis, kt_condition, l_family_basis, symm_deriv, GeometryConfig};
use qfi_core::linalg::{apply, nullspace};
use qfi_core::parse::parse_ring_elem;
use qfi_core::phase::{functional_rank, is_first_integral, poisson_bracket, PhaseFunction};
use qfi_core::qfi::{Qfi, QfiJson, TermJson, TimeJson};
use qfi_core::ring::{format_rational, int, rat, Rational, RingElem};

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

const ALL: [Family; 3] = [Family::Integral1, Family::Integral2, Family::Integral3];
const NAMES: [&str; 3] = ["x", "y", "z"];
const Z3: &[&[&str]] = &[&["0", "0", "0"], &["0", "0", "0"], &["0", "0", "0"]];

/// A QFI written out by hand: `k2`, `k1`, `k0` as expression strings, with
/// the time factor `t^power`.
fn hand(dim: usize, power: u32, k2: &[&[&str]], k1: &[&str], k0: &str) -> Qfi {
    Qfi::from_json_value(&QfiJson {
        dim,
        terms: vec![TermJson {
            time: TimeJson::Poly { poly: power },
            k2: k2.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect(),
            k1: k1.iter().map(|s| s.to_string()).collect(),
            k0: k0.to_string(),
            k2_lambda: None,
            k1_lambda: None,
            k0_lambda: None,
        }],
    })
    .unwrap()
}

fn sum(qs: &[Qfi]) -> Qfi {
    qs.iter()
        .skip(1)
        .fold(qs[0].clone(), |acc, q| acc.add(q).unwrap())
}

/// `e^{lambda t}(v_a - lambda q_a)` with `lambda^2 = mu`.
fn exp_linear(mu: &str, sign: i8, a: usize) -> Qfi {
    let mut k1 = vec!["0".to_string(); 3];
    k1[a] = "1".into();
    Qfi::from_json_value(&QfiJson {
        dim: 3,
        terms: vec![TermJson {
            time: TimeJson::Exp {
                exp_lambda2: mu.into(),
                sign,
            },
            k2: vec![vec!["0".to_string(); 3]; 3],
            k1,
            k0: "0".into(),
            k2_lambda: None,
            k1_lambda: None,
            k0_lambda: Some(format!("-{}", NAMES[a])),
        }],
    })
    .unwrap()
}

fn energy(k: &str) -> Qfi {
    hand(
        3,
        0,
        &[&["1/2", "0", "0"], &["0", "1/2", "0"], &["0", "0", "1/2"]],
        &["0", "0", "0"],
        &format!("-({k})/r"),
    )
}

fn angular() -> Vec<Qfi> {
    vec![
        hand(3, 0, Z3, &["0", "-z", "y"], "0"),
        hand(3, 0, Z3, &["z", "0", "-x"], "0"),
        hand(3, 0, Z3, &["-y", "x", "0"], "0"),
    ]
}

fn runge_lenz(k: &str) -> Vec<Qfi> {
    vec![
        hand(
            3,
            0,
            &[&["0", "-y/2", "-z/2"], &["-y/2", "x", "0"], &["-z/2", "0", "x"]],
            &["0", "0", "0"],
            &format!("-({k})*x/r"),
        ),
        hand(
            3,
            0,
            &[&["y", "-x/2", "0"], &["-x/2", "0", "-z/2"], &["0", "-z/2", "y"]],
            &["0", "0", "0"],
            &format!("-({k})*y/r"),
        ),
        hand(
            3,
            0,
            &[&["z", "0", "-x/2"], &["0", "z", "-y/2"], &["-x/2", "-y/2", "0"]],
            &["0", "0", "0"],
            &format!("-({k})*z/r"),
        ),
    ]
}

/// `B_ab = v_a v_b - 2k q_a q_b`.
fn oscillator_b(k: &str, a: usize, b: usize) -> Qfi {
    let mut k2 = vec![vec!["0".to_string(); 3]; 3];
    if a == b {
        k2[a][a] = "1".into();
    } else {
        k2[a][b] = "1/2".into();
        k2[b][a] = "1/2".into();
    }
    let rows: Vec<Vec<&str>> = k2.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect();
    let refs: Vec<&[&str]> = rows.iter().map(|r| r.as_slice()).collect();
    hand(3, 0, &refs, &["0", "0", "0"], &format!("-2*({k})*{}*{}", NAMES[a], NAMES[b]))
}

fn time_derivative_rank(qs: &[Qfi]) -> usize {
    let ds: Vec<PhaseFunction> = phases(qs).iter().map(|f| f.partial_t()).collect();
    qfi_core::phase::span_rank(&ds).unwrap()
}

fn c1_kt_dimensions() -> Outcome {
    let mut detail = Vec::new();
    for (n, expected) in [(2, 6), (3, 20)] {
        let g = GeometryConfig::new(n).unwrap();
        let basis = kt_basis(&g);
        ensure(basis.len() == expected, format!("n={n}: {} tensors", basis.len()))?;
        for (i, c) in basis.iter().enumerate() {
            ensure(
                kt_condition(c).iter().all(RingElem::is_zero),
                format!("n={n}: basis tensor {i} is not Killing"),
            )?;
        }
        detail.push(format!("n={n}: {expected}"));
    }
    Ok(detail.join(", "))
}

fn c2_kepler() -> Outcome {
    let g = GeometryConfig::new(3).unwrap();
    let mut detail = Vec::new();
    for k in ["1", "3/2"] {
        let v = potential(3, &format!("-({k})/r"));
        let i1 = solve_integral1(&g, &v).unwrap();
        ensure(i1.dimension() == 10, format!("k={k}: Integral 1 dimension {}", i1.dimension()))?;
        let mut named = vec![("E".to_string(), energy(k))];
        for (i, l) in angular().into_iter().enumerate() {
            named.push((format!("L{}", i + 1), l));
        }
        for (i, r) in runge_lenz(k).into_iter().enumerate() {
            named.push((format!("R{}", i + 1), r));
        }
        for (name, q) in named.iter().filter(|(n, _)| !n.starts_with('L')) {
            ensure(qfi_in_span(&i1.basis, q), format!("k={k}: {name} not in the Integral 1 span"))?;
        }
        // L_a is linear in the velocities: it enters Integral 1 through the
        // quadratics L_a L_b and is itself a linear integral of Integral 2
        let f1 = phases(&i1.basis);
        let ls = angular();
        for a in 0..3 {
            for b in a..3 {
                let p = phase_of(&ls[a]).mul(&phase_of(&ls[b])).unwrap();
                ensure(
                    qfi_core::phase::in_span(&f1, &p).unwrap(),
                    format!("k={k}: L{}L{} not in the Integral 1 span", a + 1, b + 1),
                )?;
            }
        }
        let i2 = solve_integral2(&g, &v).unwrap();
        let computed: Vec<Qfi> = i1.all_qfis().into_iter().chain(i2.all_qfis()).collect();
        for (name, q) in named.iter().filter(|(n, _)| n.starts_with('L')) {
            ensure(qfi_in_span(&computed, q), format!("k={k}: {name} not in the computed span"))?;
        }
        ensure(i2.dimension() == 0, format!("k={k}: Integral 2 dimension {}", i2.dimension()))?;
        let i3 = solve_integral3(&g, &v).unwrap();
        ensure(
            i3.solutions.is_empty() && i3.irrational.is_empty(),
            format!("k={k}: Integral 3 not empty"),
        )?;
        detail.push(format!("k={k}: dim 10 with E, R_a, L_a L_b; L_a among the linear integrals; I2 = I3 = 0"));
    }
    Ok(detail.join("; "))
}

fn c3_oscillator() -> Outcome {
    let g = GeometryConfig::new(3).unwrap();
    for k in ["1", "3/2", "-1/2"] {
        let v = potential(3, &format!("-({k})*r^2"));
        let i1 = solve_integral1(&g, &v).unwrap();
        ensure(i1.dimension() == 12, format!("k={k}: Integral 1 dimension {}", i1.dimension()))?;
        for a in 0..3 {
            for b in a..3 {
                ensure(
                    qfi_in_span(&i1.basis, &oscillator_b(k, a, b)),
                    format!("k={k}: B{}{} not in span", a + 1, b + 1),
                )?;
            }
        }
    }
    let v = potential(3, "-r^2");
    let i3 = solve_integral3(&g, &v).unwrap();
    let rates: Vec<(String, usize)> = i3
        .solutions
        .iter()
        .map(|s| (format_rational(&s.mu), s.l_params.len()))
        .collect();
    ensure(
        rates == vec![("2".to_string(), 11), ("8".to_string(), 6)],
        format!("rates {rates:?}"),
    )?;
    ensure(i3.irrational.is_empty(), "unexpected irrational rates")?;
    let pencil = build_pencil(&g, &v).unwrap();
    let generic = pencil.ncols() - critical_rates(&pencil).generic_rank;
    ensure(
        pencil.kernel_at(&int(4)).len() <= generic,
        "mu = 4 is critical",
    )?;
    for sign in [1i8, -1] {
        let pick = |idx: usize| -> Vec<Qfi> {
            let s = &i3.solutions[idx];
            let off = if sign == 1 { 0 } else { 1 };
            s.qfis.iter().skip(off).step_by(2).cloned().collect()
        };
        let mu2 = pick(0);
        let mu8 = pick(1);
        for a in 0..3 {
            ensure(
                qfi_in_span(&mu2, &exp_linear("2", sign, a)),
                format!("e^(lambda t)(v_{a} - lambda q_{a}) missing for sign {sign}"),
            )?;
        }
        // span over Q(sqrt 2): the products carry an extra factor lambda
        let f8: Vec<PhaseFunction> = phases(&mu8)
            .into_iter()
            .flat_map(|f| [f.scale_root(&int(1)), f])
            .collect();
        let mut products = Vec::new();
        for a in 0..3 {
            for b in a..3 {
                let p = phase_of(&exp_linear("2", sign, a))
                    .mul(&phase_of(&exp_linear("2", sign, b)))
                    .unwrap();
                ensure(
                    qfi_core::phase::in_span(&f8, &p).unwrap(),
                    format!("product {a}{b} outside the mu = 8 space"),
                )?;
                products.push(p);
            }
        }
        ensure(
            qfi_core::phase::span_rank(&products).unwrap() == 6 && mu8.len() == 6,
            "products do not span the mu = 8 space",
        )?;
    }
    for a in 0..3 {
        let prod = phase_of(&exp_linear("2", 1, a))
            .mul(&phase_of(&exp_linear("2", -1, a)))
            .unwrap();
        let b = phase_of(&oscillator_b("1", a, a));
        ensure(prod.sub(&b).unwrap().is_zero(), format!("I+ I- != B{}{}", a + 1, a + 1))?;
    }
    Ok("dim 12 with B_ij at k = 1, 3/2, -1/2; rates {2: 11, 8: 6}; mu = 4 regular; I+ I- = B_aa; mu = 8 = products".into())
}

fn c4_inverse_square() -> Outcome {
    let g = GeometryConfig::new(3).unwrap();
    for k in ["1", "3/2"] {
        let v = potential(3, &format!("-({k})/r^2"));
        let h = Qfi::energy(v.expr());
        let qv = hand(3, 0, Z3, &["x", "y", "z"], "0");
        let i1_ref = sum(&[
            shift(&h.scale(&int(-1)), 2),
            shift(&qv, 1),
            hand(3, 0, Z3, &["0", "0", "0"], "-(x^2+y^2+z^2)/2"),
        ]);
        let i2_ref = sum(&[shift(&h.scale(&int(-1)), 1), qv.scale(&rat(1, 2))]);
        let i1 = solve_integral1(&g, &v).unwrap();
        let i2 = solve_integral2(&g, &v).unwrap();
        ensure(i1.dimension() == 8, format!("k={k}: Integral 1 dimension {}", i1.dimension()))?;
        ensure(
            time_derivative_rank(&i1.basis) == 1,
            "Integral 1 time-dependent part is not one-dimensional",
        )?;
        ensure(qfi_in_span(&i1.basis, &i1_ref), format!("k={k}: I1 of Table 5 missing"))?;
        ensure(i2.dimension() == 1, format!("k={k}: Integral 2 dimension {}", i2.dimension()))?;
        ensure(qfi_in_span(&i2.basis, &i2_ref), format!("k={k}: I2 missing"))?;
    }
    Ok("I1 = -H t^2 + t q.v - r^2/2 and I2 = -H t + q.v/2 found, one extra dimension each".into())
}

fn shift(q: &Qfi, power: u32) -> Qfi {
    let terms = q
        .terms()
        .iter()
        .map(|t| {
            let mut t = t.clone();
            t.time = qfi_core::qfi::TimeBasis::Poly(power);
            t
        })
        .collect();
    Qfi::new(q.dim(), terms).unwrap()
}

fn c5_generic() -> Outcome {
    let g = GeometryConfig::new(3).unwrap();
    let v = potential(3, "-1/r^3");
    let d = discover(&g, &v, &ALL).unwrap();
    let i1 = d.integral1.unwrap();
    ensure(i1.dimension() == 7, format!("Integral 1 dimension {}", i1.dimension()))?;
    ensure(time_derivative_rank(&i1.basis) == 0, "time-dependent Integral 1 found")?;
    ensure(qfi_in_span(&i1.basis, &Qfi::energy(v.expr())), "energy missing")?;
    let ls = angular();
    for a in 0..3 {
        for b in a..3 {
            let p = phase_of(&ls[a]).mul(&phase_of(&ls[b])).unwrap();
            ensure(
                qfi_core::phase::in_span(&phases(&i1.basis), &p).unwrap(),
                format!("L{}L{} missing", a + 1, b + 1),
            )?;
        }
    }
    ensure(d.integral2.unwrap().dimension() == 0, "Integral 2 not empty")?;
    ensure(d.integral3.unwrap().solutions.is_empty(), "Integral 3 not empty")?;
    Ok("dim 7 = energy + angular quadratics, autonomous only".into())
}

fn c6_geodesics() -> Outcome {
    let mut detail = Vec::new();
    for (n, i1_dim) in [(3usize, 29usize), (2, 11)] {
        let g = GeometryConfig::new(n).unwrap();
        let v = potential(n, "0");
        let d = discover(&g, &v, &ALL).unwrap();
        let i1 = d.integral1.unwrap();
        let kts = kt_basis(&g);
        ensure(i1.dimension() == i1_dim, format!("n={n}: Integral 1 dimension {}", i1.dimension()))?;
        let autonomous = i1.dimension() - time_derivative_rank(&i1.basis);
        ensure(autonomous == kts.len(), format!("n={n}: autonomous part {autonomous}"))?;
        let zero_k1 = vec![RingElem::zero(n); n];
        let i1a: Vec<Qfi> = kts
            .iter()
            .map(|c| {
                Qfi::new(
                    n,
                    vec![qfi_core::qfi::QfiTerm::real(
                        qfi_core::qfi::TimeBasis::Poly(0),
                        c.components().to_vec(),
                        zero_k1.clone(),
                        RingElem::zero(n),
                    )],
                )
                .unwrap()
            })
            .collect();
        // G linear or quadratic: t^2/2 G_ab v v - t G_a v^a + G
        let mut i1b = Vec::new();
        for e in low_degree_exponents(n) {
            let gf = RingElem::from_monomial(qfi_core::Monomial::new(&e, 0), int(1));
            let hess: Vec<Vec<RingElem>> = (0..n)
                .map(|a| (0..n).map(|b| gf.partial(a).partial(b).scale(&rat(1, 2))).collect())
                .collect();
            let grad: Vec<RingElem> = (0..n).map(|a| -gf.partial(a)).collect();
            let t2 = qfi_core::qfi::QfiTerm::real(
                qfi_core::qfi::TimeBasis::Poly(2),
                hess,
                zero_k1.clone(),
                RingElem::zero(n),
            );
            let t1 = qfi_core::qfi::QfiTerm::real(
                qfi_core::qfi::TimeBasis::Poly(1),
                vec![zero_k1.clone(); n],
                grad,
                RingElem::zero(n),
            );
            let t0 = qfi_core::qfi::QfiTerm::real(
                qfi_core::qfi::TimeBasis::Poly(0),
                vec![zero_k1.clone(); n],
                zero_k1.clone(),
                gf,
            );
            i1b.push(Qfi::new(n, vec![t2, t1, t0]).unwrap());
        }
        let family: Vec<Qfi> = i1a.iter().chain(&i1b).cloned().collect();
        ensure(qfi_span_rank(&family) == i1_dim, format!("n={n}: I1a + I1b rank"))?;
        for q in &family {
            ensure(qfi_in_span(&i1.basis, q), format!("n={n}: {q} not in Integral 1"))?;
        }
        let i2 = d.integral2.unwrap();
        let i2_all = i2.all_qfis();
        let ls = l_family_basis(&g);
        ensure(i2_all.len() == ls.len(), format!("n={n}: Integral 2 has {} directions", i2_all.len()))?;
        for b in &ls {
            let sym = symm_deriv(b);
            let k2: Vec<Vec<RingElem>> = (0..n)
                .map(|a| (0..n).map(|c| -sym.get(a, c)).collect())
                .collect();
            let q = Qfi::new(
                n,
                vec![
                    qfi_core::qfi::QfiTerm::real(
                        qfi_core::qfi::TimeBasis::Poly(1),
                        k2,
                        zero_k1.clone(),
                        RingElem::zero(n),
                    ),
                    qfi_core::qfi::QfiTerm::real(
                        qfi_core::qfi::TimeBasis::Poly(0),
                        vec![zero_k1.clone(); n],
                        b.components().to_vec(),
                        RingElem::zero(n),
                    ),
                ],
            )
            .unwrap();
            ensure(qfi_in_span(&i2_all, &q), format!("n={n}: -t B_(a;b) v v + B.v missing"))?;
        }
        ensure(d.integral3.unwrap().solutions.is_empty(), format!("n={n}: Integral 3 not empty"))?;
        detail.push(format!("n={n}: I1 {} + {}, I2 {}", kts.len(), i1b.len(), ls.len()));
    }
    Ok(detail.join("; "))
}

/// Exponent vectors of degree 1 and 2.
fn low_degree_exponents(n: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    for a in 0..n {
        let mut e = vec![0u16; n];
        e[a] = 1;
        out.push(e.clone());
        for b in a..n {
            let mut f = e.clone();
            f[b] += 1;
            out.push(f);
        }
    }
    out
}

fn c7_soundness() -> Outcome {
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for &(n, src) in TEST_POTENTIALS {
        let g = GeometryConfig::new(n).unwrap();
        let v = potential(n, src);
        let d = match discover(&g, &v, &ALL) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("{src} (n={n}): {e}"));
                continue;
            }
        };
        let qfis = d.all_qfis();
        for q in &qfis {
            if !is_first_integral(q, v.expr()).unwrap() {
                failures.push(format!("{src} (n={n}): dI/dt != 0 for {q}"));
            }
        }
        let table = drift_table(&v, &qfis, &DriftConfig::default()).unwrap();
        let worst = table.max_drift();
        let bad = (0..qfis.len()).filter(|&i| table.max_for(i) >= 1e-8).count();
        lines.push(format!("{src} (n={n}) {} QFIs max {worst:.1e}", qfis.len()));
        if bad > 0 {
            failures.push(format!(
                "{src} (n={n}): {bad} of {} QFIs drift >= 1e-8 (max {worst:.2e})",
                qfis.len()
            ));
        }
    }
    for l in &lines {
        println!("    {l}");
    }
    if failures.is_empty() {
        Ok(format!("{} potentials, exact dI/dt = 0 and drift < 1e-8", TEST_POTENTIALS.len()))
    } else {
        Err(failures.join("; "))
    }
}

fn c8_brackets() -> Outcome {
    let pb = |f: &PhaseFunction, g: &PhaseFunction| poisson_bracket(f, g).unwrap();
    let eps = |a: usize, b: usize, c: usize| -> i64 {
        ((a as i64 - b as i64) * (b as i64 - c as i64) * (c as i64 - a as i64)) / 2
    };
    for k in ["1", "3/2"] {
        let kr: Rational = parse_ring_elem(3, k).unwrap().constant_term();
        let h = phase_of(&energy(k));
        let l = phases(&angular());
        let r = phases(&runge_lenz(k));
        let lin = |fs: &[PhaseFunction], a: usize, b: usize| {
            let mut acc = PhaseFunction::zero(3);
            for c in 0..3 {
                acc = acc.add(&fs[c].scale(&int(eps(a, b, c)))).unwrap();
            }
            acc
        };
        for a in 0..3 {
            for b in 0..3 {
                ensure(pb(&l[a], &l[b]) == lin(&l, a, b), format!("k={k}: {{L{a},L{b}}}"))?;
                ensure(pb(&r[a], &l[b]) == lin(&r, a, b), format!("k={k}: {{R{a},L{b}}}"))?;
                let rr = lin(&l, a, b).mul(&h).unwrap().scale(&int(-2));
                ensure(pb(&r[a], &r[b]) == rr, format!("k={k}: {{R{a},R{b}}}"))?;
            }
        }
        let dot = |x: &[PhaseFunction], y: &[PhaseFunction]| {
            x.iter()
                .zip(y)
                .fold(PhaseFunction::zero(3), |acc, (p, q)| acc.add(&p.mul(q).unwrap()).unwrap())
        };
        ensure(dot(&r, &l).is_zero(), format!("k={k}: R.L != 0"))?;
        let rhs = PhaseFunction::constant(3, &kr * &kr)
            .add(&h.mul(&dot(&l, &l)).unwrap().scale(&int(2)))
            .unwrap();
        ensure(dot(&r, &r) == rhs, format!("k={k}: R^2 != k^2 + 2 H L^2"))?;
        let mut set = vec![h.clone()];
        set.extend(l.iter().cloned());
        set.extend(r.iter().cloned());
        let rank = functional_rank(&set, 20, 0).unwrap();
        ensure(rank == 5, format!("k={k}: Kepler rank {rank}"))?;
    }
    let osc = potential(3, "-r^2");
    let mut set = vec![PhaseFunction::hamiltonian(osc.expr())];
    set.extend(phases(&angular()));
    set.push(phase_of(&oscillator_b("1", 0, 0)));
    let rank = functional_rank(&set, 20, 0).unwrap();
    ensure(rank == 5, format!("oscillator rank {rank}"))?;
    Ok("angular, Runge-Lenz and R.L, R^2 identities exact at k = 1, 3/2; ranks 5 and 5".into())
}

fn c9_noether() -> Outcome {
    let mut count = 0;
    for &(n, src) in TEST_POTENTIALS {
        let g = GeometryConfig::new(n).unwrap();
        let v = potential(n, src);
        for q in discover(&g, &v, &ALL).unwrap().all_qfis() {
            let gen = q.noether_generator();
            ensure(gen.to_qfi() == q, format!("{src}: generator of {q} does not round-trip"))?;
            let back = Qfi::from_json(&q.to_json()).unwrap();
            ensure(back == q, format!("{src}: JSON round trip changed {q}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} solver outputs round-trip exactly"))
}

fn c10_quadrature() -> Outcome {
    let mut detail = Vec::new();
    for (k, kstr) in [(int(1), "1"), (rat(-1, 2), "-1/2")] {
        let v = Potential::power_law(3, -k.clone(), -2);
        let mut ics = vec![(vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0])];
        ics.extend(qfi_core::dynamics::initial_conditions(&v, 3, 11));
        let mut worst: f64 = 0.0;
        for (q0, v0) in &ics {
            let s = quadrature_solution(3, &k, q0, v0).unwrap();
            let traj = integrate(&v, q0, v0, 5.0, 1e-3).unwrap();
            worst = worst.max(s.sup_error(&traj));
        }
        let s = quadrature_solution(3, &k, &[1.0, 0.0, 0.0], &[0.0; 3]).unwrap();
        let closed = |t: f64| if kstr == "1" { (2f64.sqrt() * t).cosh() } else { t.cos() };
        for t in [0.0, 1.0, 2.5, 5.0] {
            let x = s.position(t)[0];
            ensure(
                (x - closed(t)).abs() <= 1e-12 * closed(t).abs().max(1.0),
                format!("k={kstr}: x({t}) = {x}"),
            )?;
        }
        ensure(worst < 1e-6, format!("k={kstr}: sup error {worst:.2e}"))?;
        detail.push(format!("k={kstr}: sup error {worst:.1e}"));
    }
    Ok(detail.join(", "))
}

fn run_property<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> std::result::Result<(), TestCaseError>,
) -> std::result::Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn c11_properties() -> Outcome {
    run_property(
        "ring axioms",
        1000,
        (ring_elem(3), ring_elem(3), ring_elem(3)),
        |(a, b, c)| {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &RingElem::zero(3), a.clone());
            prop_assert_eq!(&a * &RingElem::one(3), a.clone());
            let copy = a.clone();
            prop_assert!((&a - &copy).is_zero());
            Ok(())
        },
    )?;
    run_property("Leibniz", 1000, (ring_elem(3), ring_elem(3), 0usize..3), |(a, b, i)| {
        prop_assert_eq!((&a * &b).partial(i), &(&a.partial(i) * &b) + &(&a * &b.partial(i)));
        Ok(())
    })?;
    run_property(
        "Poisson antisymmetry",
        300,
        (phase_poly(3), phase_poly(3)),
        |(f, g)| {
            let fg = poisson_bracket(&f, &g).unwrap();
            let gf = poisson_bracket(&g, &f).unwrap();
            prop_assert!(fg.add(&gf).unwrap().is_zero());
            Ok(())
        },
    )?;
    run_property(
        "Jacobi",
        100,
        (phase_poly(2), phase_poly(2), phase_poly(2)),
        |(f, g, h)| {
            let pb = |a: &PhaseFunction, b: &PhaseFunction| poisson_bracket(a, b).unwrap();
            let j = pb(&f, &pb(&g, &h))
                .add(&pb(&g, &pb(&h, &f)))
                .unwrap()
                .add(&pb(&h, &pb(&f, &g)))
                .unwrap();
            prop_assert!(j.is_zero());
            Ok(())
        },
    )?;
    run_property("nullspace", 500, (1usize..9).prop_flat_map(|n| (Just(n), sparse_matrix(n))), |(n, rows)| {
        let kernel = nullspace(n, &rows);
        for v in &kernel {
            prop_assert!(apply(&rows, v).iter().all(|x| *x == rat(0, 1)));
        }
        prop_assert_eq!(kernel.len(), n - dense_rank_reversed(n, &rows));
        Ok(())
    })?;
    run_property("parser round trip", 1000, ring_elem(3), |e| {
        let back = parse_ring_elem(3, &e.to_string()).unwrap();
        prop_assert_eq!(back, e);
        Ok(())
    })?;
    Ok("ring 1000, Leibniz 1000, antisymmetry 300, Jacobi 100, nullspace 500, parser 1000 cases".into())
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("Killing tensor dimension counts", c1_kt_dimensions),
        ("Kepler l = 1", c2_kepler),
        ("oscillator family l = -2", c3_oscillator),
        ("inverse square l = 2", c4_inverse_square),
        ("generic l = 3", c5_generic),
        ("geodesics V = 0", c6_geodesics),
        ("soundness gate", c7_soundness),
        ("bracket algebra", c8_brackets),
        ("Noether read-off", c9_noether),
        ("quadrature reconstruction", c10_quadrature),
        ("property suites", c11_properties),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
