//! Linear systems for the polynomial-in-time families of quadratic first
//! integrals and their exact solution.
//!
//! Family 1:
//! `I = -t^2/2 L_(a;b) v^a v^b + C_ab v^a v^b + t L_a v^a + t^2/2 L_a V^,a + G`
//! with `C` a Killing tensor, `(L_b V^,b)_,a = -2 L_(a;b) V^,b` and
//! `G_,a = 2 C_ab V^,b - L_a`.
//!
//! Family 2:
//! `I = -t^3/3 L_(a;b) v^a v^b + t^2 L_a v^a + t^3/3 L_a V^,a
//!      - t B_(a;b) v^a v^b + B_a v^a + t B_a V^,a`
//! with the same condition on `L` and
//! `(B_b V^,b)_,a = -2 B_(a;b) V^,b - 2 L_a`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{
    kt_basis, kt_param_names, l_family_basis, l_param_names, symm_deriv, GeometryConfig,
    KillingTensor, VectorField,
};
use crate::linalg::{sparse, ConstraintSystem, Echelon, LinearExpr};
use crate::qfi::{Qfi, QfiTerm, TimeBasis};
use crate::ring::{antiderivative_ansatz_basis_with, rat, AnsatzBounds, Monomial, Rational, RingElem};

/// A potential `V(q)` with its cached gradient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    expr: RingElem,
    gradient: Vec<RingElem>,
}

impl Potential {
    pub fn new(expr: RingElem) -> Self {
        let gradient = expr.gradient();
        Potential { expr, gradient }
    }

    /// Parses an expression such as `-1/r` over `dim` coordinates.
    pub fn parse(dim: usize, s: &str) -> Result<Self> {
        Ok(Potential::new(crate::parse::parse_ring_elem(dim, s)?))
    }

    /// `c * r^(-l)`, the power-law family.
    pub fn power_law(dim: usize, c: Rational, l: i32) -> Self {
        Potential::new(RingElem::radial_pow(dim, -l).scale(&c))
    }

    pub fn dim(&self) -> usize {
        self.expr.dim()
    }

    pub fn expr(&self) -> &RingElem {
        &self.expr
    }

    pub fn gradient(&self) -> &[RingElem] {
        &self.gradient
    }

    /// `w^a V_,a`.
    pub fn directional(&self, w: &[RingElem]) -> RingElem {
        let mut acc = RingElem::zero(self.dim());
        for (a, g) in w.iter().zip(&self.gradient) {
            acc = &acc + &(a * g);
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Potential {
        Potential::new(self.expr.scale(c))
    }
}

/// Which family a solution belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Integral1,
    Integral2,
    Integral3,
}

impl Family {
    pub fn number(self) -> u8 {
        match self {
            Family::Integral1 => 1,
            Family::Integral2 => 2,
            Family::Integral3 => 3,
        }
    }
}

/// Exact solution space of one polynomial-in-time family.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub family: Family,
    /// QFIs spanning the solution space.
    pub basis: Vec<Qfi>,
    /// Nullspace vectors, one per basis QFI.
    pub param_basis: Vec<Vec<Rational>>,
    /// Autonomous linear integrals `B_a v^a` split off from family 2
    /// (empty for family 1).
    pub lfis: Vec<Qfi>,
    pub lfi_params: Vec<Vec<Rational>>,
    /// The assembled linear system.
    pub system: ConstraintSystem,
}

impl SolutionSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Every QFI of the space, linear integrals included.
    pub fn all_qfis(&self) -> Vec<Qfi> {
        self.basis.iter().chain(&self.lfis).cloned().collect()
    }
}

/// `sum_I params_I * basis_I` for Killing tensors.
fn kt_combination(dim: usize, basis: &[KillingTensor], params: &[Rational]) -> Vec<Vec<RingElem>> {
    let mut out = vec![vec![RingElem::zero(dim); dim]; dim];
    for (t, p) in basis.iter().zip(params) {
        if p.is_zero() {
            continue;
        }
        for (a, row) in out.iter_mut().enumerate() {
            for (b, x) in row.iter_mut().enumerate() {
                *x = &*x + &t.get(a, b).scale(p);
            }
        }
    }
    out
}

fn vec_combination(dim: usize, basis: &[VectorField], params: &[Rational]) -> Vec<RingElem> {
    let mut out = vec![RingElem::zero(dim); dim];
    for (v, p) in basis.iter().zip(params) {
        if p.is_zero() {
            continue;
        }
        for (a, x) in out.iter_mut().enumerate() {
            *x = &*x + &v.get(a).scale(p);
        }
    }
    out
}

fn scaled_tensor(t: &[Vec<RingElem>], c: &Rational) -> Vec<Vec<RingElem>> {
    t.iter()
        .map(|r| r.iter().map(|e| e.scale(c)).collect())
        .collect()
}

/// Linear forms for `L_a`, `L_(a;b)` over a block of L-family unknowns
/// starting at `offset`.
pub(crate) struct VectorBlock {
    pub(crate) comps: Vec<LinearExpr>,
    pub(crate) sym: Vec<Vec<LinearExpr>>,
}

pub(crate) fn vector_block(dim: usize, basis: &[VectorField], offset: usize) -> VectorBlock {
    let mut comps = vec![LinearExpr::zero(dim); dim];
    let mut sym = vec![vec![LinearExpr::zero(dim); dim]; dim];
    for (j, l) in basis.iter().enumerate() {
        let s = symm_deriv(l);
        for a in 0..dim {
            comps[a] = comps[a].add(&LinearExpr::unknown(offset + j, l.get(a).clone()));
            for b in 0..dim {
                sym[a][b] = sym[a][b].add(&LinearExpr::unknown(offset + j, s.get(a, b).clone()));
            }
        }
    }
    VectorBlock { comps, sym }
}

/// `(W_b V^,b)_,a + 2 W_(a;b) V^,b` for each axis.
pub(crate) fn vector_condition(block: &VectorBlock, v: &Potential) -> Vec<LinearExpr> {
    let n = v.dim();
    let mut dot = LinearExpr::zero(n);
    for (c, g) in block.comps.iter().zip(v.gradient()) {
        dot = dot.add(&c.mul_ring(g));
    }
    (0..n)
        .map(|a| {
            let mut e = dot.partial(a);
            for b in 0..n {
                e = e.add(&block.sym[a][b].mul_ring(&v.gradient()[b].scale(&rat(2, 1))));
            }
            e
        })
        .collect()
}

pub(crate) fn check_dims(g: &GeometryConfig, v: &Potential) -> Result<()> {
    if g.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: g.dim(),
            right: v.dim(),
        });
    }
    Ok(())
}

/// Family 1 with the default ansatz bounds.
pub fn solve_integral1(g: &GeometryConfig, v: &Potential) -> Result<SolutionSpace> {
    solve_integral1_with(g, v, AnsatzBounds::default())
}

/// Family 1. Unknowns are the Killing tensor parameters of `C`, the
/// L-family parameters and the coefficients of `G` over the ansatz basis
/// (constant term excluded).
pub fn solve_integral1_with(
    g: &GeometryConfig,
    v: &Potential,
    bounds: AnsatzBounds,
) -> Result<SolutionSpace> {
    check_dims(g, v)?;
    let n = g.dim();
    let cb = kt_basis(g);
    let lb = l_family_basis(g);
    let nc = cb.len();
    let nl = lb.len();

    // support of the right-hand side 2 C_ab V^,b - L_a over all unknowns
    let mut rhs_support = Vec::new();
    for c in &cb {
        rhs_support.extend(c.contract(v.gradient()));
    }
    for l in &lb {
        rhs_support.extend(l.components().iter().cloned());
    }
    let g_monomials: Vec<Monomial> = antiderivative_ansatz_basis_with(&rhs_support, n, bounds)
        .into_iter()
        .filter(|m| !m.is_one())
        .collect();

    let mut labels: Vec<String> = kt_param_names(g).into_iter().map(|s| format!("C.{s}")).collect();
    labels.extend(l_param_names(g).into_iter().map(|s| format!("L.{s}")));
    let names = crate::ring::coordinate_names(n);
    labels.extend(g_monomials.iter().map(|m| {
        format!("G[{}]", m.format_with(&names).unwrap_or_else(|| "1".into()))
    }));

    let lblock = vector_block(n, &lb, nc);
    let mut equations = vector_condition(&lblock, v);

    let mut gexpr = LinearExpr::zero(n);
    for (k, m) in g_monomials.iter().enumerate() {
        gexpr = gexpr.add(&LinearExpr::unknown(
            nc + nl + k,
            RingElem::from_monomial(m.clone(), Rational::from_integer(1.into())),
        ));
    }
    for a in 0..n {
        let mut e = gexpr.partial(a).add(&lblock.comps[a]);
        for (i, c) in cb.iter().enumerate() {
            let mut cv = RingElem::zero(n);
            for b in 0..n {
                cv = &cv + &(c.get(a, b) * &v.gradient()[b]);
            }
            e = e.add(&LinearExpr::unknown(i, cv.scale(&rat(-2, 1))));
        }
        equations.push(e);
    }

    let system = ConstraintSystem::assemble(labels, &equations);
    let kernel = system.nullspace();

    let mut basis = Vec::with_capacity(kernel.len());
    for vec in &kernel {
        let c = kt_combination(n, &cb, &vec[..nc]);
        let lv = vec_combination(n, &lb, &vec[nc..nc + nl]);
        let mut gval = RingElem::zero(n);
        for (k, m) in g_monomials.iter().enumerate() {
            let coef = &vec[nc + nl + k];
            if !coef.is_zero() {
                gval = &gval + &RingElem::from_monomial(m.clone(), coef.clone());
            }
        }
        basis.push(assemble_integral1(n, v, &c, &lv, &gval)?);
    }
    Ok(SolutionSpace {
        family: Family::Integral1,
        basis,
        param_basis: kernel,
        lfis: Vec::new(),
        lfi_params: Vec::new(),
        system,
    })
}

/// Family-1 QFI from its data.
pub fn assemble_integral1(
    n: usize,
    v: &Potential,
    c: &[Vec<RingElem>],
    l: &[RingElem],
    gval: &RingElem,
) -> Result<Qfi> {
    let zero_t = vec![vec![RingElem::zero(n); n]; n];
    let zero_v = vec![RingElem::zero(n); n];
    let lf = VectorField::new(l.to_vec())?;
    let lsym = symm_deriv(&lf);
    let lsym: Vec<Vec<RingElem>> = lsym.components().to_vec();
    let ldv = v.directional(l);
    Qfi::new(
        n,
        vec![
            QfiTerm::real(TimeBasis::Poly(0), c.to_vec(), zero_v.clone(), gval.clone()),
            QfiTerm::real(TimeBasis::Poly(1), zero_t.clone(), l.to_vec(), RingElem::zero(n)),
            QfiTerm::real(
                TimeBasis::Poly(2),
                scaled_tensor(&lsym, &rat(-1, 2)),
                zero_v,
                ldv.scale(&rat(1, 2)),
            ),
        ],
    )
}

/// Family-2 QFI from its data.
pub fn assemble_integral2(n: usize, v: &Potential, l: &[RingElem], b: &[RingElem]) -> Result<Qfi> {
    let zero_t = vec![vec![RingElem::zero(n); n]; n];
    let zero_v = vec![RingElem::zero(n); n];
    let lsym = symm_deriv(&VectorField::new(l.to_vec())?).components().to_vec();
    let bsym = symm_deriv(&VectorField::new(b.to_vec())?).components().to_vec();
    Qfi::new(
        n,
        vec![
            QfiTerm::real(
                TimeBasis::Poly(3),
                scaled_tensor(&lsym, &rat(-1, 3)),
                zero_v.clone(),
                v.directional(l).scale(&rat(1, 3)),
            ),
            QfiTerm::real(TimeBasis::Poly(2), zero_t.clone(), l.to_vec(), RingElem::zero(n)),
            QfiTerm::real(
                TimeBasis::Poly(1),
                scaled_tensor(&bsym, &rat(-1, 1)),
                zero_v,
                v.directional(b),
            ),
            QfiTerm::real(TimeBasis::Poly(0), zero_t, b.to_vec(), RingElem::zero(n)),
        ],
    )
}

/// Family 2. Unknowns are two blocks of L-family parameters (`L`, then `B`).
///
/// Directions with `L = 0`, `B_(a;b) = 0` and `B_a V^,a = 0` give autonomous
/// linear integrals `B_a v^a`; they are reported in `lfis`, and `basis`
/// spans a complement of them in the full solution space.
pub fn solve_integral2(g: &GeometryConfig, v: &Potential) -> Result<SolutionSpace> {
    check_dims(g, v)?;
    let n = g.dim();
    let lb = l_family_basis(g);
    let nl = lb.len();
    let mut labels: Vec<String> = l_param_names(g).into_iter().map(|s| format!("L.{s}")).collect();
    labels.extend(l_param_names(g).into_iter().map(|s| format!("B.{s}")));

    let lblock = vector_block(n, &lb, 0);
    let bblock = vector_block(n, &lb, nl);
    let mut equations = vector_condition(&lblock, v);
    let two = RingElem::constant(n, rat(2, 1));
    for (a, e) in vector_condition(&bblock, v).into_iter().enumerate() {
        equations.push(e.add(&lblock.comps[a].mul_ring(&two)));
    }
    let system = ConstraintSystem::assemble(labels.clone(), &equations);
    let full = system.nullspace();

    // autonomous linear integrals: add L = 0, B_(a;b) = 0, B.grad V = 0
    let mut lfi_eqs = equations.clone();
    for j in 0..nl {
        lfi_eqs.push(LinearExpr::unknown(j, RingElem::one(n)));
    }
    for a in 0..n {
        for b in a..n {
            lfi_eqs.push(bblock.sym[a][b].clone());
        }
    }
    let mut bdot = LinearExpr::zero(n);
    for (c, gr) in bblock.comps.iter().zip(v.gradient()) {
        bdot = bdot.add(&c.mul_ring(gr));
    }
    lfi_eqs.push(bdot);
    let lfi_params = ConstraintSystem::assemble(labels, &lfi_eqs).nullspace();

    let mut ech = Echelon::new(2 * nl);
    for w in &lfi_params {
        ech.insert(&sparse(w));
    }
    let param_basis: Vec<Vec<Rational>> = full
        .into_iter()
        .filter(|vec| ech.insert(&sparse(vec)))
        .collect();

    let build = |vec: &Vec<Rational>| {
        let l = vec_combination(n, &lb, &vec[..nl]);
        let b = vec_combination(n, &lb, &vec[nl..]);
        assemble_integral2(n, v, &l, &b)
    };
    let basis = param_basis.iter().map(build).collect::<Result<Vec<_>>>()?;
    let lfis = lfi_params.iter().map(build).collect::<Result<Vec<_>>>()?;
    Ok(SolutionSpace {
        family: Family::Integral2,
        basis,
        param_basis,
        lfis,
        lfi_params,
        system,
    })
}
