//! Killing tensors and Killing-type vector families of the Euclidean plane
//! and space.
//!
//! The parameterized bases are hardcoded; [`kt_condition`] checks them
//! independently.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::{rat, Monomial, Rational, RingElem};

/// Flat configuration space `E^n` with the identity kinetic metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeometryConfig {
    dim: usize,
}

impl GeometryConfig {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 2 || dim == 3 {
            Ok(GeometryConfig { dim })
        } else {
            Err(Error::UnsupportedDimension(dim))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of parameters of the general second-order Killing tensor.
    pub fn kt_param_count(&self) -> usize {
        let n = self.dim;
        n * (n + 1) * (n + 1) * (n + 2) / 12
    }

    /// Number of parameters of the L-vector family.
    pub fn l_param_count(&self) -> usize {
        match self.dim {
            2 => 8,
            _ => 20,
        }
    }

    /// Dimension of the Killing vector algebra.
    pub fn kv_count(&self) -> usize {
        self.dim * (self.dim + 1) / 2
    }
}

/// Symmetric `n x n` tensor field over the radical ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillingTensor {
    dim: usize,
    components: Vec<Vec<RingElem>>,
    params: Option<Vec<Rational>>,
}

impl KillingTensor {
    /// Builds a tensor from its components; the matrix must be symmetric.
    pub fn from_components(components: Vec<Vec<RingElem>>) -> Result<Self> {
        let dim = components.len();
        for (a, row) in components.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            for (b, c) in row.iter().enumerate() {
                if c.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        left: dim,
                        right: c.dim(),
                    });
                }
                if c != &components[b][a] {
                    return Err(Error::Verification(format!(
                        "tensor is not symmetric in ({a},{b})"
                    )));
                }
            }
        }
        Ok(KillingTensor {
            dim,
            components,
            params: None,
        })
    }

    pub fn zero(dim: usize) -> Self {
        KillingTensor {
            dim,
            components: vec![vec![RingElem::zero(dim); dim]; dim],
            params: None,
        }
    }

    /// `delta_ab`.
    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zero(dim);
        for a in 0..dim {
            t.components[a][a] = RingElem::one(dim);
        }
        t
    }

    /// The general Killing tensor at the given basis coordinates.
    pub fn from_params(g: &GeometryConfig, params: &[Rational]) -> Result<Self> {
        let n = g.kt_param_count();
        if params.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: params.len(),
            });
        }
        let mut t = Self::zero(g.dim());
        for (entries_of, p) in kt_table(g.dim()).iter().zip(params) {
            if p.is_zero() {
                continue;
            }
            for &(a, b, num, den, ref e) in entries_of.iter() {
                let term = RingElem::from_monomial(Monomial::new(e, 0), rat(num, den) * p);
                t.components[a][b] = &t.components[a][b] + &term;
                if a != b {
                    t.components[b][a] = &t.components[b][a] + &term;
                }
            }
        }
        t.params = Some(params.to_vec());
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> &RingElem {
        &self.components[a][b]
    }

    pub fn components(&self) -> &[Vec<RingElem>] {
        &self.components
    }

    pub fn params(&self) -> Option<&[Rational]> {
        self.params.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().flatten().all(|c| c.is_zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        KillingTensor {
            dim: self.dim,
            components: self
                .components
                .iter()
                .map(|row| row.iter().map(|e| e.scale(c)).collect())
                .collect(),
            params: self
                .params
                .as_ref()
                .map(|p| p.iter().map(|v| v * c).collect()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        KillingTensor {
            dim: self.dim,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| a + b).collect())
                .collect(),
            params: match (&self.params, &other.params) {
                (Some(p), Some(q)) => Some(p.iter().zip(q).map(|(a, b)| a + b).collect()),
                _ => None,
            },
        }
    }

    /// `C_ab v^b`.
    pub fn contract(&self, v: &[RingElem]) -> Vec<RingElem> {
        (0..self.dim)
            .map(|a| {
                let mut acc = RingElem::zero(self.dim);
                for b in 0..self.dim {
                    acc = &acc + &(&self.components[a][b] * &v[b]);
                }
                acc
            })
            .collect()
    }
}

/// Vector field `L_a` over the radical ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    dim: usize,
    components: Vec<RingElem>,
    params: Option<Vec<Rational>>,
}

impl VectorField {
    pub fn new(components: Vec<RingElem>) -> Result<Self> {
        let dim = components.len();
        if let Some(c) = components.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: c.dim(),
            });
        }
        Ok(VectorField {
            dim,
            components,
            params: None,
        })
    }

    pub fn zero(dim: usize) -> Self {
        VectorField {
            dim,
            components: vec![RingElem::zero(dim); dim],
            params: None,
        }
    }

    /// The L-family member at the given parameters.
    pub fn from_params(g: &GeometryConfig, params: &[Rational]) -> Result<Self> {
        let n = g.l_param_count();
        if params.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: params.len(),
            });
        }
        let mut v = Self::zero(g.dim());
        for (entries_of, p) in l_table(g.dim()).iter().zip(params) {
            if p.is_zero() {
                continue;
            }
            for &(a, num, den, ref e) in entries_of.iter() {
                let term = RingElem::from_monomial(Monomial::new(e, 0), rat(num, den) * p);
                v.components[a] = &v.components[a] + &term;
            }
        }
        v.params = Some(params.to_vec());
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[RingElem] {
        &self.components
    }

    pub fn get(&self, a: usize) -> &RingElem {
        &self.components[a]
    }

    pub fn params(&self) -> Option<&[Rational]> {
        self.params.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    /// `L_a w^a`.
    pub fn dot(&self, w: &[RingElem]) -> RingElem {
        let mut acc = RingElem::zero(self.dim);
        for (l, x) in self.components.iter().zip(w) {
            acc = &acc + &(l * x);
        }
        acc
    }
}

/// `L_(a;b) = (d_a L_b + d_b L_a) / 2`.
pub fn symm_deriv(v: &VectorField) -> KillingTensor {
    let n = v.dim;
    let half = rat(1, 2);
    let grads: Vec<Vec<RingElem>> = v.components.iter().map(|c| c.gradient()).collect();
    let mut t = KillingTensor::zero(n);
    for a in 0..n {
        for b in a..n {
            let s = (&grads[b][a] + &grads[a][b]).scale(&half);
            t.components[b][a] = s.clone();
            t.components[a][b] = s;
        }
    }
    t
}

/// The independent components `C_(ab;c)` for `a <= b <= c`, in lexicographic
/// order of `(a, b, c)`. All vanish exactly when `C` is a Killing tensor.
pub fn kt_condition(c: &KillingTensor) -> Vec<RingElem> {
    let n = c.dim;
    let third = rat(1, 3);
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            for k in b..n {
                let s = &(&c.components[a][b].partial(k) + &c.components[b][k].partial(a))
                    + &c.components[k][a].partial(b);
                out.push(s.scale(&third));
            }
        }
    }
    out
}

/// One tensor per parameter (that parameter 1, the others 0), in parameter
/// order: `(gamma, a, beta, A, B, C)` in the plane, `a1..a20` in space.
pub fn kt_basis(g: &GeometryConfig) -> Vec<KillingTensor> {
    let n = g.kt_param_count();
    (0..n)
        .map(|i| KillingTensor::from_params(g, &unit(n, i)).expect("parameter count"))
        .collect()
}

/// One vector per parameter of the L-family: `(a, beta, A, B, a8, a9, a10,
/// a11)` in the plane, `a1..a20` in space.
pub fn l_family_basis(g: &GeometryConfig) -> Vec<VectorField> {
    let n = g.l_param_count();
    (0..n)
        .map(|i| VectorField::from_params(g, &unit(n, i)).expect("parameter count"))
        .collect()
}

/// Printable names of the Killing tensor parameters.
pub fn kt_param_names(g: &GeometryConfig) -> Vec<String> {
    match g.dim() {
        2 => ["gamma", "a", "beta", "A", "B", "C"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        _ => (1..=20).map(|i| format!("a{i}")).collect(),
    }
}

/// Printable names of the L-family parameters.
pub fn l_param_names(g: &GeometryConfig) -> Vec<String> {
    match g.dim() {
        2 => ["a", "beta", "A", "B", "a8", "a9", "a10", "a11"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        _ => (1..=20).map(|i| format!("a{i}")).collect(),
    }
}

pub(crate) fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

/// `(row, col, num, den, exponents)` contributions of a Killing tensor
/// parameter to the upper triangle.
type KtEntry = (usize, usize, i64, i64, Vec<u16>);
/// `(axis, num, den, exponents)` contributions of an L-family parameter.
type LEntry = (usize, i64, i64, Vec<u16>);

fn kt_table(dim: usize) -> Vec<Vec<KtEntry>> {
    let e = |s: &[u16]| s.to_vec();
    if dim == 2 {
        // C11 = g y^2 + 2a y + A, C12 = -g xy - a x - b y + C, C22 = g x^2 + 2b x + B
        return vec![
            vec![
                (0, 0, 1, 1, e(&[0, 2])),
                (0, 1, -1, 1, e(&[1, 1])),
                (1, 1, 1, 1, e(&[2, 0])),
            ],
            vec![(0, 0, 2, 1, e(&[0, 1])), (0, 1, -1, 1, e(&[1, 0]))],
            vec![(0, 1, -1, 1, e(&[0, 1])), (1, 1, 2, 1, e(&[1, 0]))],
            vec![(0, 0, 1, 1, e(&[0, 0]))],
            vec![(1, 1, 1, 1, e(&[0, 0]))],
            vec![(0, 1, 1, 1, e(&[0, 0]))],
        ];
    }
    let mut t: Vec<Vec<KtEntry>> = vec![Vec::new(); 20];
    let mut put = |param: usize, a: usize, b: usize, num: i64, den: i64, ex: [u16; 3]| {
        t[param - 1].push((a, b, num, den, ex.to_vec()));
    };
    // C11
    put(6, 0, 0, 1, 2, [0, 2, 0]);
    put(1, 0, 0, 1, 2, [0, 0, 2]);
    put(4, 0, 0, 1, 1, [0, 1, 1]);
    put(5, 0, 0, 1, 1, [0, 1, 0]);
    put(2, 0, 0, 1, 1, [0, 0, 1]);
    put(3, 0, 0, 1, 1, [0, 0, 0]);
    // C12
    put(10, 0, 1, 1, 2, [0, 0, 2]);
    put(6, 0, 1, -1, 2, [1, 1, 0]);
    put(4, 0, 1, -1, 2, [1, 0, 1]);
    put(14, 0, 1, -1, 2, [0, 1, 1]);
    put(5, 0, 1, -1, 2, [1, 0, 0]);
    put(15, 0, 1, -1, 2, [0, 1, 0]);
    put(16, 0, 1, 1, 1, [0, 0, 1]);
    put(17, 0, 1, 1, 1, [0, 0, 0]);
    // C13
    put(14, 0, 2, 1, 2, [0, 2, 0]);
    put(4, 0, 2, -1, 2, [1, 1, 0]);
    put(1, 0, 2, -1, 2, [1, 0, 1]);
    put(10, 0, 2, -1, 2, [0, 1, 1]);
    put(2, 0, 2, -1, 2, [1, 0, 0]);
    put(18, 0, 2, 1, 1, [0, 1, 0]);
    put(11, 0, 2, -1, 2, [0, 0, 1]);
    put(19, 0, 2, 1, 1, [0, 0, 0]);
    // C22
    put(6, 1, 1, 1, 2, [2, 0, 0]);
    put(7, 1, 1, 1, 2, [0, 0, 2]);
    put(14, 1, 1, 1, 1, [1, 0, 1]);
    put(15, 1, 1, 1, 1, [1, 0, 0]);
    put(12, 1, 1, 1, 1, [0, 0, 1]);
    put(13, 1, 1, 1, 1, [0, 0, 0]);
    // C23
    put(4, 1, 2, 1, 2, [2, 0, 0]);
    put(14, 1, 2, -1, 2, [1, 1, 0]);
    put(10, 1, 2, -1, 2, [1, 0, 1]);
    put(7, 1, 2, -1, 2, [0, 1, 1]);
    put(16, 1, 2, -1, 1, [1, 0, 0]);
    put(18, 1, 2, -1, 1, [1, 0, 0]);
    put(12, 1, 2, -1, 2, [0, 1, 0]);
    put(8, 1, 2, -1, 2, [0, 0, 1]);
    put(20, 1, 2, 1, 1, [0, 0, 0]);
    // C33
    put(1, 2, 2, 1, 2, [2, 0, 0]);
    put(7, 2, 2, 1, 2, [0, 2, 0]);
    put(10, 2, 2, 1, 1, [1, 1, 0]);
    put(11, 2, 2, 1, 1, [1, 0, 0]);
    put(8, 2, 2, 1, 1, [0, 1, 0]);
    put(9, 2, 2, 1, 1, [0, 0, 0]);
    t
}

fn l_table(dim: usize) -> Vec<Vec<LEntry>> {
    if dim == 2 {
        // L1 = -2b y^2 + 2a xy + A x + a8 y + a11
        // L2 = -2a x^2 + 2b xy + a10 x + B y + a9
        let e = |s: &[u16]| s.to_vec();
        return vec![
            vec![(0, 2, 1, e(&[1, 1])), (1, -2, 1, e(&[2, 0]))],
            vec![(0, -2, 1, e(&[0, 2])), (1, 2, 1, e(&[1, 1]))],
            vec![(0, 1, 1, e(&[1, 0]))],
            vec![(1, 1, 1, e(&[0, 1]))],
            vec![(0, 1, 1, e(&[0, 1]))],
            vec![(1, 1, 1, e(&[0, 0]))],
            vec![(1, 1, 1, e(&[1, 0]))],
            vec![(0, 1, 1, e(&[0, 0]))],
        ];
    }
    let mut t: Vec<Vec<LEntry>> = vec![Vec::new(); 20];
    let mut put = |param: usize, a: usize, num: i64, ex: [u16; 3]| {
        t[param - 1].push((a, num, 1, ex.to_vec()));
    };
    // L1
    put(15, 0, -1, [0, 2, 0]);
    put(11, 0, -1, [0, 0, 2]);
    put(5, 0, 1, [1, 1, 0]);
    put(2, 0, 1, [1, 0, 1]);
    put(16, 0, 2, [0, 1, 1]);
    put(18, 0, 2, [0, 1, 1]);
    put(3, 0, 1, [1, 0, 0]);
    put(4, 0, 2, [0, 1, 0]);
    put(1, 0, 2, [0, 0, 1]);
    put(6, 0, 1, [0, 0, 0]);
    // L2
    put(5, 1, -1, [2, 0, 0]);
    put(8, 1, -1, [0, 0, 2]);
    put(15, 1, 1, [1, 1, 0]);
    put(18, 1, -2, [1, 0, 1]);
    put(12, 1, 1, [0, 1, 1]);
    put(17, 1, 2, [1, 0, 0]);
    put(4, 1, -2, [1, 0, 0]);
    put(13, 1, 1, [0, 1, 0]);
    put(7, 1, 2, [0, 0, 1]);
    put(14, 1, 1, [0, 0, 0]);
    // L3
    put(2, 2, -1, [2, 0, 0]);
    put(12, 2, -1, [0, 2, 0]);
    put(16, 2, -2, [1, 1, 0]);
    put(11, 2, 1, [1, 0, 1]);
    put(8, 2, 1, [0, 1, 1]);
    put(19, 2, 2, [1, 0, 0]);
    put(1, 2, -2, [1, 0, 0]);
    put(20, 2, 2, [0, 1, 0]);
    put(7, 2, -2, [0, 1, 0]);
    put(9, 2, 1, [0, 0, 1]);
    put(10, 2, 1, [0, 0, 0]);
    t
}
