//! The exponential family
//! `I = exp(lambda t) (-L_(a;b) v^a v^b + lambda L_a v^a + L_a V^,a)`
//! with `(L_b V^,b)_,a + 2 L_(a;b) V^,b + lambda^2 L_a = 0`.
//!
//! With `mu = lambda^2` the condition is a linear pencil `(A + mu B) p = 0`
//! in the L-family parameters `p`. Rates are the values of `mu` where the
//! pencil drops rank.

use nalgebra::DMatrix;
use num_traits::{ToPrimitive, Zero};

use crate::constraints::{check_dims, vector_block, vector_condition, Potential};
use crate::error::Result;
use crate::geometry::{l_family_basis, l_param_names, symm_deriv, GeometryConfig, VectorField};
use crate::linalg::{Echelon, SparseRow};
use crate::poly1::{real_roots, refine_root, UPoly};
use crate::qfi::{Coeff, ExponentialRate, Qfi, QfiTerm, TimeBasis};
use crate::ring::{Rational, RingElem};

/// The pencil `A + mu B` of the exponential condition.
#[derive(Clone, Debug)]
pub struct Pencil {
    pub a: Vec<SparseRow>,
    pub b: Vec<SparseRow>,
    pub unknown_labels: Vec<String>,
}

impl Pencil {
    pub fn ncols(&self) -> usize {
        self.unknown_labels.len()
    }

    /// Rows of `A + mu B` at a rational `mu`.
    pub fn at(&self, mu: &Rational) -> Vec<SparseRow> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(ra, rb)| {
                let mut dense = vec![Rational::zero(); self.ncols()];
                for (c, v) in ra {
                    dense[*c] += v;
                }
                for (c, v) in rb {
                    dense[*c] += v * mu;
                }
                crate::linalg::sparse(&dense)
            })
            .collect()
    }

    /// Exact kernel at a rational `mu`.
    pub fn kernel_at(&self, mu: &Rational) -> Vec<Vec<Rational>> {
        Echelon::from_rows(self.ncols(), &self.at(mu)).kernel()
    }
}

/// Rows `(axis, monomial)` of the exponential condition: `A` holds the
/// rate-free part, `B` the coefficient of `mu` (the components of `L`).
pub fn build_pencil(g: &GeometryConfig, v: &Potential) -> Result<Pencil> {
    check_dims(g, v)?;
    let n = g.dim();
    let lb = l_family_basis(g);
    let block = vector_block(n, &lb, 0);
    let cond = vector_condition(&block, v);
    let mut a_rows = Vec::new();
    let mut b_rows = Vec::new();
    for axis in 0..n {
        let ra = cond[axis].rows_by_monomial();
        let rb = block.comps[axis].rows_by_monomial();
        let mut monos: Vec<_> = ra.keys().chain(rb.keys()).cloned().collect();
        monos.sort();
        monos.dedup();
        for m in monos {
            a_rows.push(ra.get(&m).cloned().unwrap_or_default());
            b_rows.push(rb.get(&m).cloned().unwrap_or_default());
        }
    }
    Ok(Pencil {
        a: a_rows,
        b: b_rows,
        unknown_labels: l_param_names(g),
    })
}

/// An irrational real candidate rate, located numerically.
#[derive(Clone, Debug)]
pub struct IrrationalRate {
    /// Isolating interval `(lo, hi]` of the root.
    pub interval: (Rational, Rational),
    pub mu_approx: f64,
    /// Smallest singular value of `A + mu B` at the approximation.
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Result of the rank-drop search.
#[derive(Clone, Debug)]
pub struct CriticalRates {
    /// Rank of the pencil over the field of rational functions in `mu`.
    pub generic_rank: usize,
    /// The polynomial whose roots contain every rank drop.
    pub determinant: UPoly,
    /// Rational `mu != 0` with a kernel larger than the generic one.
    pub exact: Vec<(Rational, Vec<Vec<Rational>>)>,
    pub irrational: Vec<IrrationalRate>,
}

/// Fraction-free elimination over `Q[mu]` with full pivoting; returns the
/// rank and the last pivot, an `r x r` minor that vanishes wherever the rank
/// drops.
fn bareiss(mut m: Vec<Vec<UPoly>>) -> (usize, UPoly) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut prev = UPoly::constant(Rational::from_integer(1.into()));
    let mut k = 0;
    while k < rows && k < cols {
        // lowest-degree nonzero pivot
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, e) in row.iter().enumerate().skip(k) {
                if let Some(d) = e.degree() {
                    if best.is_none_or(|(_, _, bd)| d < bd) {
                        best = Some((i, j, d));
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        let p = m[k][k].clone();
        for i in k + 1..rows {
            let f = m[i][k].clone();
            for j in k + 1..cols {
                let v = p.mul(&m[i][j]).sub(&f.mul(&m[k][j]));
                m[i][j] = v.exact_div(&prev);
            }
            m[i][k] = UPoly::zero();
        }
        prev = p;
        k += 1;
    }
    (k, prev)
}

/// All `mu != 0` at which the pencil has a nontrivial kernel beyond the
/// generic one.
pub fn critical_rates(p: &Pencil) -> CriticalRates {
    let n = p.ncols();
    // constant row operations on [A | B] keep the pencil's rank profile
    let stacked: Vec<SparseRow> = p
        .a
        .iter()
        .zip(&p.b)
        .map(|(ra, rb)| {
            let mut r = ra.clone();
            r.extend(rb.iter().map(|(c, v)| (c + n, v.clone())));
            r
        })
        .collect();
    let reduced = Echelon::from_rows(2 * n, &stacked).rows();
    let matrix: Vec<Vec<UPoly>> = reduced
        .iter()
        .map(|r| {
            let mut a = vec![Rational::zero(); n];
            let mut b = vec![Rational::zero(); n];
            for (c, v) in r {
                if *c < n {
                    a[*c] = v.clone();
                } else {
                    b[c - n] = v.clone();
                }
            }
            a.into_iter()
                .zip(b)
                .map(|(x, y)| UPoly::linear(x, y))
                .collect()
        })
        .collect();
    let (generic_rank, det) = bareiss(matrix);
    let generic_kernel = n - generic_rank;
    let roots = real_roots(&det);
    let mut exact = Vec::new();
    for mu in roots.rational {
        if mu.is_zero() {
            continue;
        }
        let kernel = p.kernel_at(&mu);
        if kernel.len() > generic_kernel {
            exact.push((mu, kernel));
        }
    }
    let mut irrational = Vec::new();
    for (lo, hi) in roots.irrational {
        let (lo2, hi2) = refine_root(&det, &lo, &hi, 1e-14);
        let mu_approx = ((&lo2 + &hi2) / Rational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN);
        if mu_approx == 0.0 {
            continue;
        }
        let (sigma_min, sigma_max) = numeric_sigma(p, mu_approx);
        irrational.push(IrrationalRate {
            interval: (lo, hi),
            mu_approx,
            sigma_min,
            sigma_max,
        });
    }
    CriticalRates {
        generic_rank,
        determinant: det,
        exact,
        irrational,
    }
}

fn numeric_sigma(p: &Pencil, mu: f64) -> (f64, f64) {
    let n = p.ncols();
    let mut m = DMatrix::<f64>::zeros(p.a.len().max(n), n);
    for (i, (ra, rb)) in p.a.iter().zip(&p.b).enumerate() {
        for (c, v) in ra {
            m[(i, *c)] += v.to_f64().unwrap_or(f64::NAN);
        }
        for (c, v) in rb {
            m[(i, *c)] += mu * v.to_f64().unwrap_or(f64::NAN);
        }
    }
    let sv = m.svd(false, false).singular_values;
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    (smin, smax)
}

/// One critical rate with its vectors and the QFIs for both roots.
#[derive(Clone, Debug)]
pub struct ExponentialSolution {
    pub mu: Rational,
    pub l_params: Vec<Vec<Rational>>,
    pub l_basis: Vec<VectorField>,
    /// For each vector, the QFI with `+sqrt(mu)` followed by `-sqrt(mu)`.
    pub qfis: Vec<Qfi>,
}

impl ExponentialSolution {
    pub fn rate(&self, sign: i8) -> ExponentialRate {
        ExponentialRate::new(self.mu.clone(), sign).expect("nonzero rate")
    }
}

/// The exponential family, normalized by `1/lambda`:
/// `exp(lambda t) (-(lambda/mu) L_(a;b) v^a v^b + L_a v^a + (lambda/mu) L_a V^,a)`.
pub fn assemble_integral3(v: &Potential, rate: &ExponentialRate, l: &VectorField) -> Result<Qfi> {
    let n = v.dim();
    let inv_mu = Rational::from_integer(1.into()) / rate.lambda_squared();
    let lsym = symm_deriv(l);
    let k2 = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| Coeff::new(RingElem::zero(n), lsym.get(a, b).scale(&-inv_mu.clone())))
                .collect()
        })
        .collect();
    let k1 = l.components().iter().cloned().map(Coeff::real).collect();
    let k0 = Coeff::new(
        RingElem::zero(n),
        v.directional(l.components()).scale(&inv_mu),
    );
    Qfi::new(
        n,
        vec![QfiTerm {
            time: TimeBasis::Exp(rate.clone()),
            k2,
            k1,
            k0,
        }],
    )
}

/// Every exponential-family QFI with a rational rate.
#[derive(Clone, Debug)]
pub struct Integral3Result {
    pub solutions: Vec<ExponentialSolution>,
    pub irrational: Vec<IrrationalRate>,
    pub generic_rank: usize,
}

impl Integral3Result {
    pub fn all_qfis(&self) -> Vec<Qfi> {
        self.solutions.iter().flat_map(|s| s.qfis.clone()).collect()
    }
}

pub fn solve_integral3(g: &GeometryConfig, v: &Potential) -> Result<Integral3Result> {
    let pencil = build_pencil(g, v)?;
    let rates = critical_rates(&pencil);
    let mut solutions = Vec::new();
    for (mu, kernel) in rates.exact {
        let mut l_basis = Vec::new();
        let mut qfis = Vec::new();
        for p in &kernel {
            let l = VectorField::from_params(g, p)?;
            for sign in [1, -1] {
                let rate = ExponentialRate::new(mu.clone(), sign)?;
                qfis.push(assemble_integral3(v, &rate, &l)?);
            }
            l_basis.push(l);
        }
        solutions.push(ExponentialSolution {
            mu,
            l_params: kernel,
            l_basis,
            qfis,
        });
    }
    Ok(Integral3Result {
        solutions,
        irrational: rates.irrational,
        generic_rank: rates.generic_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::is_first_integral;
    use crate::ring::int;

    #[test]
    fn repulsive_oscillator_rates() {
        let g = GeometryConfig::new(3).unwrap();
        let v = Potential::parse(3, "-r^2").unwrap();
        let res = solve_integral3(&g, &v).unwrap();
        let mus: Vec<Rational> = res.solutions.iter().map(|s| s.mu.clone()).collect();
        assert_eq!(mus, vec![int(2), int(8)]);
        assert_eq!(res.solutions[0].l_params.len(), 11);
        assert_eq!(res.solutions[1].l_params.len(), 6);
        for q in res.all_qfis() {
            assert!(is_first_integral(&q, v.expr()).unwrap(), "{q}");
        }
        let pencil = build_pencil(&g, &v).unwrap();
        assert!(pencil.kernel_at(&int(4)).is_empty());
    }

    #[test]
    fn kepler_has_no_rates() {
        let g = GeometryConfig::new(3).unwrap();
        let v = Potential::parse(3, "-1/r").unwrap();
        assert!(solve_integral3(&g, &v).unwrap().solutions.is_empty());
    }
}
