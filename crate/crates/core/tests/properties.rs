mod common;

use common::*;
use proptest::prelude::*;
use qfi_core::linalg::{apply, nullspace, Echelon};
use qfi_core::parse::parse_ring_elem;
use qfi_core::phase::{poisson_bracket, PhaseFunction};
use qfi_core::ring::{rat, RingElem};

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in ring_elem(3), b in ring_elem(3), q in point(3)) {
        let lhs = (&a * &b).evaluate(&q).unwrap();
        let rhs = a.evaluate(&q).unwrap() * b.evaluate(&q).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        let lhs = (&a + &b).evaluate(&q).unwrap();
        let rhs = a.evaluate(&q).unwrap() + b.evaluate(&q).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn derivative_matches_finite_difference(a in ring_elem(3), q in point(3), i in 0usize..3) {
        let h = 1e-6;
        let mut qp = q.clone();
        qp[i] += h;
        let mut qm = q.clone();
        qm[i] -= h;
        let fd = (a.evaluate(&qp).unwrap() - a.evaluate(&qm).unwrap()) / (2.0 * h);
        let exact = a.partial(i).evaluate(&q).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-4 * (1.0 + exact.abs()), "{} vs {}", fd, exact);
    }

    #[test]
    fn construction_order_does_not_matter(a in ring_elem(2), b in ring_elem(2), c in ring_elem(2)) {
        let one = &(&a * &b) + &(&a * &c);
        let two = &(&c * &a) + &(&b * &a);
        prop_assert_eq!(one.to_string(), two.to_string());
        prop_assert_eq!(&one, &two);
    }

    #[test]
    fn reflection_is_an_involution(a in ring_elem(3), i in 0usize..3) {
        prop_assert_eq!(a.reflect(i).reflect(i), a);
    }

    #[test]
    fn parser_round_trip_2d(a in ring_elem(2)) {
        prop_assert_eq!(parse_ring_elem(2, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn bracket_is_a_derivation(f in phase_poly(2), g in phase_poly(2), h in phase_poly(2)) {
        let lhs = poisson_bracket(&f, &g.mul(&h).unwrap()).unwrap();
        let rhs = poisson_bracket(&f, &g).unwrap().mul(&h).unwrap()
            .add(&g.mul(&poisson_bracket(&f, &h).unwrap()).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn canonical_brackets(i in 0usize..3, j in 0usize..3) {
        let q = PhaseFunction::coordinate(3, i);
        let p = PhaseFunction::momentum(3, j);
        let b = poisson_bracket(&q, &p).unwrap();
        let expected = if i == j { PhaseFunction::constant(3, rat(1, 1)) } else { PhaseFunction::zero(3) };
        prop_assert_eq!(b, expected);
    }

    #[test]
    fn nullspace_is_exact(rows in sparse_matrix(7)) {
        let kernel = nullspace(7, &rows);
        for v in &kernel {
            prop_assert!(apply(&rows, v).iter().all(|x| *x == rat(0, 1)));
        }
        prop_assert_eq!(kernel.len(), 7 - dense_rank_reversed(7, &rows));
        let e = Echelon::from_rows(7, &rows);
        for r in &rows {
            prop_assert!(e.contains(r));
        }
    }
}

#[test]
fn radial_identities() {
    let r = RingElem::radial_pow(3, 1);
    let rho = RingElem::rho(3);
    assert_eq!(&r * &r, rho);
    assert_eq!(&RingElem::radial_pow(3, -3) * &rho, RingElem::radial_pow(3, -1));
    assert_eq!(RingElem::radial_pow(3, -2).partial(0).to_string(), "-2*x*r^-4");
}
