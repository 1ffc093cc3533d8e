//! Cross-checks against independently written references.

mod common;

use std::collections::BTreeMap;

use common::*;
use qfi_core::constraints::{solve_integral1, solve_integral2, Potential};
use qfi_core::exponential::solve_integral3;
use qfi_core::geometry::{kt_basis, kt_condition, l_family_basis, symm_deriv, GeometryConfig, KillingTensor, VectorField};
use qfi_core::linalg::{rank, sparse, SparseRow};
use qfi_core::ring::{antiderivative_ansatz_basis, int, rat, Monomial, Rational, RingElem};

fn c(n: i64, d: i64) -> RingElem {
    RingElem::constant(3, rat(n, d))
}

fn x(i: usize) -> RingElem {
    RingElem::coord(3, i)
}

/// `C_ab = L_(a;b)` for the L-family, written out from the closed form.
fn generated_kt(a: &[Rational]) -> Vec<Vec<RingElem>> {
    let p = |i: usize| RingElem::constant(3, a[i - 1].clone());
    let (x0, y0, z0) = (x(0), x(1), x(2));
    let c11 = &(&p(5) * &y0) + &(&(&p(2) * &z0) + &p(3));
    let c12 = &(&(&p(5) * &x0) * &c(-1, 2)) + &(&(&(&p(15) * &y0) * &c(-1, 2)) + &(&(&p(16) * &z0) + &p(17)));
    let c13 = &(&(&p(2) * &x0) * &c(-1, 2)) + &(&(&p(18) * &y0) + &(&(&(&p(11) * &z0) * &c(-1, 2)) + &p(19)));
    let c22 = &(&p(15) * &x0) + &(&(&p(12) * &z0) + &p(13));
    let c23 = &(&(&(&p(16) + &p(18)) * &x0) * &c(-1, 1))
        + &(&(&(&p(12) * &y0) * &c(-1, 2)) + &(&(&(&p(8) * &z0) * &c(-1, 2)) + &p(20)));
    let c33 = &(&p(11) * &x0) + &(&(&p(8) * &y0) + &p(9));
    vec![
        vec![c11, c12.clone(), c13.clone()],
        vec![c12, c22, c23.clone()],
        vec![c13, c23, c33],
    ]
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    (0..n).map(|j| if i == j { int(1) } else { int(0) }).collect()
}

/// Coefficient vectors of tensors over a shared `(component, monomial)` index.
fn flatten(tensors: &[Vec<Vec<RingElem>>]) -> (usize, Vec<SparseRow>) {
    let mut index: BTreeMap<(usize, usize, Monomial), usize> = BTreeMap::new();
    for t in tensors {
        for (a, row) in t.iter().enumerate() {
            for (b, e) in row.iter().enumerate().skip(a) {
                for m in e.monomials() {
                    let len = index.len();
                    index.entry((a, b, m.clone())).or_insert(len);
                }
            }
        }
    }
    let rows = tensors
        .iter()
        .map(|t| {
            let mut dense = vec![int(0); index.len()];
            for (a, row) in t.iter().enumerate() {
                for (b, e) in row.iter().enumerate().skip(a) {
                    for (m, v) in e.terms() {
                        dense[index[&(a, b, m.clone())]] = v.clone();
                    }
                }
            }
            sparse(&dense)
        })
        .collect();
    (index.len(), rows)
}

#[test]
fn l_family_generates_the_closed_form_tensor() {
    let g = GeometryConfig::new(3).unwrap();
    for i in 0..20 {
        let a = unit(20, i);
        let l = VectorField::from_params(&g, &a).unwrap();
        let got = symm_deriv(&l);
        let want = generated_kt(&a);
        for p in 0..3 {
            for q in 0..3 {
                assert_eq!(got.get(p, q), &want[p][q], "a{} component {p}{q}", i + 1);
            }
        }
    }
    let images: Vec<Vec<Vec<RingElem>>> = l_family_basis(&g)
        .iter()
        .map(|l| symm_deriv(l).components().to_vec())
        .collect();
    let (n, rows) = flatten(&images);
    assert_eq!(rank(n, &rows), 14);
    assert_eq!(dense_rank_reversed(n, &rows), 14);
    // the six parameters absent from the image are exactly the Killing vectors
    for i in [1, 4, 6, 7, 10, 14] {
        let l = VectorField::from_params(&g, &unit(20, i - 1)).unwrap();
        assert!(symm_deriv(&l).is_zero(), "a{i}");
    }
}

#[test]
fn plane_l_family_has_three_killing_vectors() {
    let g = GeometryConfig::new(2).unwrap();
    let images: Vec<Vec<Vec<RingElem>>> = l_family_basis(&g)
        .iter()
        .map(|l| symm_deriv(l).components().to_vec())
        .collect();
    let (n, rows) = flatten(&images);
    assert_eq!(images.len() - rank(n, &rows), 3);
}

fn eps(a: usize, b: usize, c: usize) -> i64 {
    ((a as i64 - b as i64) * (b as i64 - c as i64) * (c as i64 - a as i64)) / 2
}

/// The covariant form of the general Killing tensor of E3 for one choice
/// of the constant tensors `A` (symmetric), `B` (symmetric, traceless),
/// `lambda` and `D` (symmetric).
fn covariant_kt(am: &[[i64; 3]; 3], bm: &[[i64; 3]; 3], lam: &[i64; 3], dm: &[[i64; 3]; 3]) -> Vec<Vec<RingElem>> {
    let mut out = vec![vec![RingElem::zero(3); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut e = RingElem::constant(3, int(dm[i][j]));
            for k in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        for n in 0..3 {
                            let w = (eps(i, k, m) * eps(j, l, n) + eps(j, k, m) * eps(i, l, n)) * am[m][n];
                            if w != 0 {
                                e = &e + &(&(&x(k) * &x(l)) * &c(w, 1));
                            }
                        }
                    }
                }
            }
            for k in 0..3 {
                let mut w = rat(0, 1);
                for l in 0..3 {
                    w += rat(bm[i][l] * eps(j, k, l) + bm[j][l] * eps(i, k, l), 2);
                }
                let dij = if i == j { 1 } else { 0 };
                let djk = if j == k { 1 } else { 0 };
                let dik = if i == k { 1 } else { 0 };
                w += rat(lam[i] * djk + lam[j] * dik, 2) - rat(dij * lam[k], 1);
                e = &e + &x(k).scale(&w);
            }
            out[i][j] = e;
        }
    }
    out
}

fn symmetric_units() -> Vec<[[i64; 3]; 3]> {
    let mut out = Vec::new();
    for a in 0..3 {
        for b in a..3 {
            let mut m = [[0; 3]; 3];
            m[a][b] = 1;
            m[b][a] = 1;
            out.push(m);
        }
    }
    out
}

#[test]
fn covariant_form_spans_the_same_tensors() {
    let g = GeometryConfig::new(3).unwrap();
    let zero = [[0i64; 3]; 3];
    let mut cov = Vec::new();
    for a in symmetric_units() {
        cov.push(covariant_kt(&a, &zero, &[0; 3], &zero));
    }
    let traceless: Vec<[[i64; 3]; 3]> = vec![
        [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
        [[0, 0, 0], [0, 1, 0], [0, 0, -1]],
        [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
        [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
        [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
    ];
    for b in &traceless {
        cov.push(covariant_kt(&zero, b, &[0; 3], &zero));
    }
    for i in 0..3 {
        let mut l = [0; 3];
        l[i] = 1;
        cov.push(covariant_kt(&zero, &zero, &l, &zero));
    }
    for d in symmetric_units() {
        cov.push(covariant_kt(&zero, &zero, &[0; 3], &d));
    }
    assert_eq!(cov.len(), 20);
    for t in &cov {
        let kt = KillingTensor::from_components(t.clone()).unwrap();
        assert!(kt_condition(&kt).iter().all(RingElem::is_zero));
    }
    let ours: Vec<Vec<Vec<RingElem>>> = kt_basis(&g).iter().map(|k| k.components().to_vec()).collect();
    let both: Vec<Vec<Vec<RingElem>>> = ours.iter().chain(&cov).cloned().collect();
    let (n, rows) = flatten(&both);
    assert_eq!(rank(n, &rows[..20]), 20);
    assert_eq!(rank(n, &rows[20..]), 20);
    assert_eq!(rank(n, &rows), 20);
}

#[test]
fn solver_nullities_agree_with_reversed_elimination() {
    for &(n, src) in TEST_POTENTIALS {
        let g = GeometryConfig::new(n).unwrap();
        let v = potential(n, src);
        for sol in [solve_integral1(&g, &v).unwrap(), solve_integral2(&g, &v).unwrap()] {
            let cols = sol.system.ncols();
            let nullity = cols - dense_rank_reversed(cols, &sol.system.rows);
            assert_eq!(
                nullity,
                sol.param_basis.len() + sol.lfi_params.len(),
                "{src} family {}",
                sol.family.number()
            );
        }
    }
}

#[test]
fn kepler_potential_term_is_in_the_ansatz() {
    // G = -(k/r)(a11 x + a5 y + a2 z + 2 a3) for k = 1
    let g_expected = &(&(&x(0) + &x(1)) + &(&x(2) + &c(2, 1))) * &RingElem::radial_pow(3, -1);
    let rhs = g_expected.gradient();
    let basis = antiderivative_ansatz_basis(&rhs, 3);
    for m in g_expected.monomials() {
        if !m.is_one() {
            assert!(basis.contains(m), "{m:?} missing");
        }
    }
}

#[test]
fn scaling_the_potential_scales_the_rates() {
    let g = GeometryConfig::new(3).unwrap();
    for (src, rates) in [("-r^2", ["2", "8"]), ("-3*r^2", ["6", "24"]), ("-1/4*r^2", ["1/2", "2"])] {
        let v = potential(3, src);
        let r = solve_integral3(&g, &v).unwrap();
        let got: Vec<(String, usize)> = r
            .solutions
            .iter()
            .map(|s| (qfi_core::ring::format_rational(&s.mu), s.l_params.len()))
            .collect();
        assert_eq!(got, vec![(rates[0].into(), 11), (rates[1].into(), 6)], "{src}");
    }
    for base in ["-1/r", "-1/r^2", "-1/r^3", "x^2 + 2*y^2"] {
        let v = potential(3, base);
        let w = v.scale(&rat(5, 3));
        let a = solve_integral1(&g, &v).unwrap().dimension();
        let b = solve_integral1(&g, &w).unwrap().dimension();
        assert_eq!(a, b, "{base}");
    }
}

#[test]
fn anisotropic_oscillator_separates() {
    // V = x^2 + 2 y^2 + 3 z^2: the three partial energies are integrals
    let g = GeometryConfig::new(3).unwrap();
    let v = Potential::parse(3, "x^2 + 2*y^2 + 3*z^2").unwrap();
    let sol = solve_integral1(&g, &v).unwrap();
    for (i, k) in [(0usize, 1i64), (1, 2), (2, 3)] {
        let src = format!("{{\"dim\":3,\"terms\":[{{\"time\":{{\"poly\":0}},\"k2\":[{}],\"k1\":[\"0\",\"0\",\"0\"],\"k0\":\"{k}*{}^2\"}}]}}",
            (0..3).map(|a| format!("[{}]", (0..3).map(|b| if a == i && b == i { "\"1/2\"" } else { "\"0\"" }).collect::<Vec<_>>().join(","))).collect::<Vec<_>>().join(","),
            ["x", "y", "z"][i]);
        let q = qfi_core::qfi::Qfi::from_json(&src).unwrap();
        assert!(qfi_in_span(&sol.basis, &q), "E{i}");
    }
}
