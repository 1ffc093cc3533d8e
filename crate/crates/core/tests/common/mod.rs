#![allow(dead_code)]

use proptest::prelude::*;
use qfi_core::constraints::Potential;
use qfi_core::linalg::SparseRow;
use qfi_core::phase::{self, PhaseFunction};
use qfi_core::qfi::Qfi;
use qfi_core::ring::{rat, Monomial, Rational, RingElem};

/// Potentials exercised by the soundness gate: `(dim, source)`.
pub const TEST_POTENTIALS: &[(usize, &str)] = &[
    (3, "0"),
    (3, "-1/r"),
    (3, "-3/2/r"),
    (3, "-1/r^2"),
    (3, "1/r^2"),
    (3, "-1/r^3"),
    (3, "1/r^3"),
    (3, "1/2*r^2"),
    (3, "r^2"),
    (3, "-r^2"),
    (2, "0"),
    (2, "-1/r"),
    (2, "1/2*r^2"),
];

pub fn potential(dim: usize, s: &str) -> Potential {
    Potential::parse(dim, s).unwrap()
}

pub fn phase_of(q: &Qfi) -> PhaseFunction {
    PhaseFunction::from_qfi(q).unwrap()
}

pub fn phases(qs: &[Qfi]) -> Vec<PhaseFunction> {
    qs.iter().map(phase_of).collect()
}

/// Exact membership of `target` in the span of `basis`.
pub fn qfi_in_span(basis: &[Qfi], target: &Qfi) -> bool {
    phase::in_span(&phases(basis), &phase_of(target)).unwrap()
}

pub fn qfi_span_rank(qs: &[Qfi]) -> usize {
    phase::span_rank(&phases(qs)).unwrap()
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

/// Random ring elements with up to four terms, coordinate degree at most 2
/// per variable and r-exponents in `[-3, 2]`.
pub fn ring_elem(dim: usize) -> impl Strategy<Value = RingElem> {
    prop::collection::vec(
        (
            small_rational(),
            prop::collection::vec(0u16..=2, dim),
            -3i32..=2,
        ),
        0..=4,
    )
    .prop_map(move |terms| {
        let mut acc = RingElem::zero(dim);
        for (c, exps, r) in terms {
            acc = acc + RingElem::from_monomial(Monomial::new(&exps, r), c);
        }
        acc
    })
}

/// Random phase-space polynomials `sum f_i(q) p^alpha_i`, momentum degree
/// at most 2.
pub fn phase_poly(dim: usize) -> impl Strategy<Value = PhaseFunction> {
    prop::collection::vec((ring_elem(dim), prop::collection::vec(0u32..=1, dim)), 1..=3).prop_map(
        move |parts| {
            let mut acc = PhaseFunction::zero(dim);
            for (f, alpha) in parts {
                let mut term = PhaseFunction::from_ring(&f);
                for (a, &e) in alpha.iter().enumerate() {
                    if e == 1 {
                        term = term.mul(&PhaseFunction::momentum(dim, a)).unwrap();
                    }
                }
                acc = acc.add(&term).unwrap();
            }
            acc
        },
    )
}

/// Random sparse rational matrices with at most `ncols` columns.
pub fn sparse_matrix(ncols: usize) -> impl Strategy<Value = Vec<SparseRow>> {
    prop::collection::vec(
        prop::collection::vec((0..ncols, -3i64..=3), 0..=ncols),
        0..=ncols + 2,
    )
    .prop_map(move |rows| {
        rows.into_iter()
            .map(|r| {
                let mut dense = vec![rat(0, 1); ncols];
                for (c, v) in r {
                    dense[c] = rat(v, 1);
                }
                qfi_core::linalg::sparse(&dense)
            })
            .collect()
    })
}

/// Points away from the origin for numeric comparisons.
pub fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.3f64..1.5, dim).prop_flat_map(move |mag| {
        prop::collection::vec(prop::bool::ANY, dim).prop_map(move |signs| {
            mag.iter()
                .zip(signs)
                .map(|(m, s)| if s { *m } else { -*m })
                .collect()
        })
    })
}

/// Rank by dense elimination scanning columns right to left, independent
/// of the library's sparse echelon.
pub fn dense_rank_reversed(ncols: usize, rows: &[SparseRow]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| {
            let mut d = vec![rat(0, 1); ncols];
            for (c, v) in r {
                d[*c] = v.clone();
            }
            d
        })
        .collect();
    let mut rank = 0;
    for col in (0..ncols).rev() {
        let Some(p) = (rank..m.len()).find(|&i| m[i][col] != rat(0, 1)) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for i in 0..m.len() {
            if i != rank && m[i][col] != rat(0, 1) {
                let f = &m[i][col] / &pivot;
                for j in 0..ncols {
                    let d = &f * &m[rank][j];
                    m[i][j] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}
