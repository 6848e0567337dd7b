//! The real form `so(p,q)` with its Cartan decomposition `k ⊕ p`, the Cartan
//! subspace `a ⊂ p`, and the restricted root system of type `B_p`.
//!
//! Matrices are `(p+q) × (p+q)` with the block pattern `[p | p | q−p]`; the
//! Cartan element with diagonal `(H₁, …, H_p)` sits in the off-diagonal
//! `p × p` blocks of the first two block rows.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{matrix_exp, DenseMatrix, FieldTag, Tolerance};

/// Shape `(p, q)` of the Grassmannian `SO₀(p,q)/SO(p)×SO(q)`; requires
/// `q > p ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrassmannShape {
    p: usize,
    q: usize,
}

impl GrassmannShape {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p < 2 {
            return Err(invalid(format!("p must be at least 2, got {p}")));
        }
        if q <= p {
            return Err(invalid(format!("q must exceed p, got p = {p}, q = {q}")));
        }
        Ok(GrassmannShape { p, q })
    }

    pub fn p(self) -> usize {
        self.p
    }

    pub fn q(self) -> usize {
        self.q
    }

    /// Matrix size `p + q`.
    pub fn n(self) -> usize {
        self.p + self.q
    }

    pub fn dim_p(self) -> usize {
        self.p * self.q
    }

    pub fn dim_k(self) -> usize {
        self.p * (self.p - 1) / 2 + self.q * (self.q - 1) / 2
    }

    pub fn dim_g(self) -> usize {
        self.n() * (self.n() - 1) / 2
    }

    /// `I_{p,q} = diag(−I_p, I_q)` over `field`.
    pub fn signature_matrix(self, field: FieldTag) -> DenseMatrix {
        let mut m = DenseMatrix::identity(field, self.n());
        for i in 0..self.p {
            m.set_real(i, i, -1.0);
        }
        m
    }
}

impl fmt::Display for GrassmannShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// A point of the Cartan subspace `a`, stored as the `p` diagonal entries of
/// its `p × p` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanElement {
    shape: GrassmannShape,
    h: Vec<f64>,
}

impl CartanElement {
    pub fn new(shape: GrassmannShape, h: Vec<f64>) -> Result<Self> {
        if h.len() != shape.p() {
            return Err(invalid(format!(
                "expected {} Cartan coordinates, got {}",
                shape.p(),
                h.len()
            )));
        }
        if h.iter().any(|x| !x.is_finite()) {
            return Err(invalid("Cartan coordinates must be finite"));
        }
        Ok(CartanElement { shape, h })
    }

    pub fn zero(shape: GrassmannShape) -> Self {
        CartanElement {
            shape,
            h: vec![0.0; shape.p()],
        }
    }

    pub fn shape(&self) -> GrassmannShape {
        self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.h
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().all(|&x| x == 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        CartanElement {
            shape: self.shape,
            h: self.h.iter().map(|x| x * s).collect(),
        }
    }

    /// The `(p+q) × (p+q)` matrix of this element over `field`.
    pub fn embed(&self, field: FieldTag) -> DenseMatrix {
        let p = self.shape.p();
        let mut m = DenseMatrix::zeros(field, self.shape.n(), self.shape.n());
        for (i, &x) in self.h.iter().enumerate() {
            m.set_real(i, p + i, x);
            m.set_real(p + i, i, x);
        }
        m
    }

    /// Coordinates of the orthogonal projection of `m ∈ p` onto `a`, i.e.
    /// `⟨m, A_i⟩ / ‖A_i‖²` with `‖A_i‖² = 2`.
    pub fn project(shape: GrassmannShape, m: &DenseMatrix) -> Vec<f64> {
        (0..shape.p())
            .map(|i| 0.5 * (m.real_entry(i, shape.p() + i) + m.real_entry(shape.p() + i, i)))
            .collect()
    }
}

/// The basis vector `A_i = E_{i,p+i} + E_{p+i,i}` of `a` (0-based `i`).
pub fn cartan_basis(shape: GrassmannShape, i: usize) -> DenseMatrix {
    let mut h = vec![0.0; shape.p()];
    h[i] = 1.0;
    CartanElement { shape, h }.embed(FieldTag::Real)
}

/// Which family of restricted roots a root vector belongs to (0-based
/// indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootKind {
    /// `±H_i`, one vector per `r < q − p`.
    Short { i: usize, r: usize },
    /// `±(H_i − H_j)`, `i < j`.
    Difference { i: usize, j: usize },
    /// `±(H_i + H_j)`, `i < j`.
    Sum { i: usize, j: usize },
}

/// A restricted root together with its root vector `X_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootDatum {
    pub kind: RootKind,
    /// `+1` for the positive root, `−1` for its negative.
    pub sign: i8,
    pub vector: DenseMatrix,
    pub multiplicity: usize,
    coefficients: Vec<f64>,
}

impl RootDatum {
    /// `α(H)`.
    pub fn eval(&self, h: &CartanElement) -> f64 {
        self.coefficients
            .iter()
            .zip(h.values())
            .map(|(c, x)| c * x)
            .sum()
    }

    /// The root as a linear form on `a`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// Generator `X_α + θX_α` of `k`.
    pub fn compact_generator(&self) -> DenseMatrix {
        &self.vector + &theta(&self.vector)
    }

    /// `½(X_α − θX_α) ∈ p`.
    pub fn symmetrize(&self) -> SymmetrizedVector {
        let matrix = (&self.vector - &theta(&self.vector)).scale(0.5);
        SymmetrizedVector {
            origin: self.clone(),
            matrix,
        }
    }

    pub fn label(&self) -> String {
        let s = if self.sign > 0 { '+' } else { '-' };
        match self.kind {
            RootKind::Short { i, r } => format!("X_{{{},{}}}^{s}", i + 1, r + 1),
            RootKind::Difference { i, j } => format!("Y_{{{},{}}}^{s}", i + 1, j + 1),
            RootKind::Sum { i, j } => format!("Z_{{{},{}}}^{s}", i + 1, j + 1),
        }
    }
}

/// A symmetrised root vector `½(X_α − θX_α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedVector {
    pub origin: RootDatum,
    pub matrix: DenseMatrix,
}

/// All root vectors `X_{ir}^±`, `Y_{ij}^±`, `Z_{ij}^±` of `so(p,q)`, written
/// out entrywise. There are `2p(q−p) + 2p(p−1)` of them.
pub fn build_roots(shape: GrassmannShape) -> Vec<RootDatum> {
    let (p, q, n) = (shape.p(), shape.q(), shape.n());
    let mut out = Vec::with_capacity(2 * p * (q - p) + 2 * p * (p - 1));
    let unit = |entries: &[(usize, usize, f64)]| {
        let mut m = DenseMatrix::zeros(FieldTag::Real, n, n);
        for &(a, b, v) in entries {
            m.set_real(a, b, m.real_entry(a, b) + v);
        }
        m
    };
    let form = |terms: &[(usize, f64)]| {
        let mut c = vec![0.0; p];
        for &(k, v) in terms {
            c[k] += v;
        }
        c
    };

    for i in 0..p {
        for r in 0..q - p {
            let c = 2 * p + r;
            for sign in [1i8, -1] {
                let s = f64::from(sign);
                out.push(RootDatum {
                    kind: RootKind::Short { i, r },
                    sign,
                    vector: unit(&[(i, c, 1.0), (c, i, 1.0), (p + i, c, s), (c, p + i, -s)]),
                    multiplicity: q - p,
                    coefficients: form(&[(i, s)]),
                });
            }
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            for sign in [1i8, -1] {
                let s = f64::from(sign);
                let symmetric = [
                    (i, p + j, 1.0),
                    (p + j, i, 1.0),
                    (j, p + i, 1.0),
                    (p + i, j, 1.0),
                ];
                let mut y = vec![(i, j, s), (j, i, -s), (p + i, p + j, s), (p + j, p + i, -s)];
                y.extend(symmetric);
                out.push(RootDatum {
                    kind: RootKind::Difference { i, j },
                    sign,
                    vector: unit(&y),
                    multiplicity: 1,
                    coefficients: form(&[(i, s), (j, -s)]),
                });
                let z = [
                    (i, j, s),
                    (j, i, -s),
                    (p + i, p + j, -s),
                    (p + j, p + i, s),
                    (i, p + j, -1.0),
                    (p + j, i, -1.0),
                    (j, p + i, 1.0),
                    (p + i, j, 1.0),
                ];
                out.push(RootDatum {
                    kind: RootKind::Sum { i, j },
                    sign,
                    vector: unit(&z),
                    multiplicity: 1,
                    coefficients: form(&[(i, s), (j, s)]),
                });
            }
        }
    }
    out
}

/// Cartan involution `θ(M) = −M*`.
pub fn theta(m: &DenseMatrix) -> DenseMatrix {
    -&m.adjoint()
}

/// `Ad(g)M = g M g⁻¹`. Unitary `g` (within `tol.entry_abs`) is inverted by its
/// adjoint; otherwise a general inverse is computed.
pub fn adjoint(g: &DenseMatrix, m: &DenseMatrix, tol: &Tolerance) -> Result<DenseMatrix> {
    if !g.is_square() || g.shape() != m.shape() || g.field() != m.field() {
        return Err(invalid(format!(
            "adjoint: g {:?} over {} cannot act on {:?} over {}",
            g.shape(),
            g.field(),
            m.shape(),
            m.field()
        )));
    }
    let gstar = g.adjoint();
    let defect = (&(&gstar * g) - &DenseMatrix::identity(g.field(), g.rows())).max_abs();
    let inverse = if defect <= tol.entry_abs {
        gstar
    } else {
        let inv = g
            .embedded()
            .clone()
            .try_inverse()
            .filter(|inv| inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
            .ok_or_else(|| invalid("adjoint: g is singular"))?;
        DenseMatrix::from_embedded(g.field(), inv)?
    };
    Ok(&(g * m) * &inverse)
}

/// The orthogonal matrix `S` with `SᵀHS = diag(H₁, …, H_p, 0, …, 0, −H_p, …, −H₁)`
/// for every `H ∈ a`.
pub fn build_s(shape: GrassmannShape) -> DenseMatrix {
    let (p, q, n) = (shape.p(), shape.q(), shape.n());
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let mut s = DenseMatrix::zeros(FieldTag::Real, n, n);
    for i in 0..p {
        s.set_real(i, i, c);
        s.set_real(p + i, i, c);
        // J_p sits in the last p columns.
        let col = q + (p - 1 - i);
        s.set_real(i, col, c);
        s.set_real(p + i, col, -c);
    }
    for r in 0..q - p {
        s.set_real(2 * p + r, p + r, 1.0);
    }
    s
}

/// Representative of `H` in the closed positive chamber: absolute values
/// sorted in decreasing order (the `B_p` Weyl group acts by signed
/// permutations).
pub fn weyl_project(h: &CartanElement) -> CartanElement {
    let mut v: Vec<f64> = h.values().iter().map(|x| x.abs()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    CartanElement {
        shape: h.shape(),
        h: v,
    }
}

/// `k^t_{X_α} = exp(t(X_α + θX_α)) ∈ K`.
pub fn one_param_k(root: &RootDatum, t: f64) -> DenseMatrix {
    matrix_exp(&root.compact_generator().scale(t)).expect("square finite generator")
}

/// Basis `E_ij − E_ji` of `k = so(p) ⊕ so(q)`.
pub fn compact_basis(shape: GrassmannShape) -> Vec<DenseMatrix> {
    let n = shape.n();
    let block = |lo: usize, hi: usize| (lo..hi).flat_map(move |i| (i + 1..hi).map(move |j| (i, j)));
    block(0, shape.p())
        .chain(block(shape.p(), n))
        .map(|(i, j)| {
            let mut m = DenseMatrix::zeros(FieldTag::Real, n, n);
            m.set_real(i, j, 1.0);
            m.set_real(j, i, -1.0);
            m
        })
        .collect()
}

/// Checks `g* I_{p,q} g = I_{p,q}`; returns the defect.
pub fn group_defect(shape: GrassmannShape, g: &DenseMatrix) -> Result<f64> {
    if g.shape() != (shape.n(), shape.n()) {
        return Err(Error::InvalidInput(format!(
            "expected a {n}×{n} matrix, got {:?}",
            g.shape(),
            n = shape.n()
        )));
    }
    let ipq = shape.signature_matrix(g.field());
    Ok((&(&(&g.adjoint() * &ipq) * g) - &ipq).max_abs())
}

/// Haar sample of `K` over `field`: `SO(p)×SO(q)`, `S(U(p)×U(q))` or
/// `Sp(p)×Sp(q)`, drawn from stream `(seed, index)`.
pub fn sample_compact(
    shape: GrassmannShape,
    field: FieldTag,
    seed: u64,
    index: u64,
) -> DenseMatrix {
    use crate::linalg::haar_sample_with;
    let mut rng = crate::rng::stream(seed, index);
    let a = haar_sample_with(field, shape.p(), &mut rng);
    let b = haar_sample_with(field, shape.q(), &mut rng);
    DenseMatrix::block_diag(&a, &b)
}
