//! Cartan projection `a(g)` through singular values, configurations of
//! Cartan elements, and the eligibility predicate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lie::{build_s, group_defect, weyl_project, CartanElement, GrassmannShape};
use crate::linalg::{singular_values, DenseMatrix, FieldTag, Tolerance};

/// `e^H` in closed form, `S·diag(e^{H₁}, …, e^{H_p}, 1, …, 1, e^{−H_p}, …, e^{−H₁})·Sᵀ`.
pub fn exp_cartan(h: &CartanElement) -> DenseMatrix {
    let shape = h.shape();
    let n = shape.n();
    let s = build_s(shape);
    let mut d = DenseMatrix::identity(FieldTag::Real, n);
    for (i, &x) in h.values().iter().enumerate() {
        d.set_real(i, i, x.exp());
        d.set_real(n - 1 - i, n - 1 - i, (-x).exp());
    }
    &(&s * &d) * &s.adjoint()
}

/// Cartan projection of `g ∈ SO₀(p,q)`, `SU(p,q)` or `Sp(p,q)`.
///
/// Of the `p + q` singular values, the middle `q − p` equal 1 and the others
/// pair up as `(a_i, 1/a_i)`; the result is `(log a₁, …, log a_p)`, sorted in
/// decreasing order. Each coordinate is computed as `½(log σ_i − log σ_{n+1−i})`
/// so it is non-negative even in floating point.
pub fn cartan_projection(
    g: &DenseMatrix,
    shape: GrassmannShape,
    tol: &Tolerance,
) -> Result<CartanElement> {
    let n = shape.n();
    let defect = group_defect(shape, g)?;
    let sv = singular_values(g)?;
    let scale = sv[0] * sv[0];
    let allowed = tol.entry_abs * scale.max(1.0);
    if defect > allowed {
        return Err(Error::NotInGroup {
            defect,
            tolerance: allowed,
        });
    }

    let cond = sv[0] / sv[n - 1];
    let unit_slack = 100.0 * tol.entry_abs * cond;
    for (k, &s) in sv.iter().enumerate().take(shape.q()).skip(shape.p()) {
        if (s - 1.0).abs() > unit_slack {
            return Err(Error::NumericalInconsistency(format!(
                "singular value {k} is {s}, expected 1 (slack {unit_slack:.3e})"
            )));
        }
    }
    let mut h = Vec::with_capacity(shape.p());
    for i in 0..shape.p() {
        let (big, small) = (sv[i], sv[n - 1 - i]);
        if (big * small - 1.0).abs() > 100.0 * tol.entry_abs {
            return Err(Error::NumericalInconsistency(format!(
                "singular values {big} and {small} are not reciprocal"
            )));
        }
        h.push(0.5 * (big.ln() - small.ln()));
    }
    CartanElement::new(shape, h)
}

/// Configuration `[s₁, …, s_r; u]` of a Cartan element: sizes of the blocks of
/// equal non-zero chamber coordinates (largest value first) and the number of
/// zero coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    blocks: Vec<usize>,
    zeros: usize,
}

impl Configuration {
    pub fn new(blocks: Vec<usize>, zeros: usize) -> Result<Self> {
        if blocks.contains(&0) {
            return Err(invalid("configuration blocks must be positive"));
        }
        Ok(Configuration { blocks, zeros })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn zeros(&self) -> usize {
        self.zeros
    }

    /// `Σ s_i + u`.
    pub fn p(&self) -> usize {
        self.blocks.iter().sum::<usize>() + self.zeros
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_regular(&self) -> bool {
        self.zeros == 0 && self.blocks.iter().all(|&s| s == 1)
    }

    /// `max 𝐬`, or 0 without blocks.
    pub fn max_block(&self) -> usize {
        self.blocks.iter().copied().max().unwrap_or(0)
    }

    /// `max(𝐬, u)`.
    pub fn max_with_zeros(&self) -> usize {
        self.max_block().max(self.zeros)
    }

    /// `max(𝐬, 2u)`, this configuration's share of the eligibility sum.
    pub fn eligibility_weight(&self) -> usize {
        self.max_block().max(2 * self.zeros)
    }

    /// A chamber element with this configuration: block `b` of `r` gets the
    /// value `0.5 + 0.6·(r − 1 − b)`.
    pub fn representative(&self, shape: GrassmannShape) -> Result<CartanElement> {
        if self.p() != shape.p() {
            return Err(invalid(format!(
                "configuration {self} does not sum to p = {}",
                shape.p()
            )));
        }
        let r = self.blocks.len();
        let mut h = Vec::with_capacity(shape.p());
        for (b, &size) in self.blocks.iter().enumerate() {
            h.extend(std::iter::repeat_n(0.5 + 0.6 * (r - 1 - b) as f64, size));
        }
        h.extend(std::iter::repeat_n(0.0, self.zeros));
        CartanElement::new(shape, h)
    }

    /// Every configuration for rank `p`, blocks listed as partitions (block
    /// sizes non-increasing). Block order never affects eligibility or any
    /// rank computation, so this covers all cases up to relabelling.
    pub fn all(p: usize) -> Vec<Configuration> {
        fn partitions(n: usize, cap: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if n == 0 {
                out.push(prefix.clone());
                return;
            }
            for k in (1..=n.min(cap)).rev() {
                prefix.push(k);
                partitions(n - k, k, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        for zeros in 0..=p {
            let mut parts = Vec::new();
            partitions(p - zeros, p - zeros, &mut Vec::new(), &mut parts);
            out.extend(
                parts
                    .into_iter()
                    .map(|blocks| Configuration { blocks, zeros }),
            );
        }
        out
    }

    /// [`Configuration::all`] without the zero configuration `[0; p]`.
    pub fn all_nonzero(p: usize) -> Vec<Configuration> {
        Self::all(p).into_iter().filter(|c| !c.is_zero()).collect()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            write!(f, "0;{}", self.zeros)
        } else {
            let b: Vec<String> = self.blocks.iter().map(|s| s.to_string()).collect();
            write!(f, "{};{}", b.join(","), self.zeros)
        }
    }
}

/// Parses `"s1,s2,…;u"`, e.g. `"2,1;0"`; `"0;p"` is the zero configuration.
impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (blocks, zeros) = s
            .split_once(';')
            .ok_or_else(|| invalid(format!("configuration `{s}` must look like `s1,s2;u`")))?;
        let zeros: usize = zeros
            .trim()
            .parse()
            .map_err(|_| invalid(format!("bad zero count in `{s}`")))?;
        let mut parsed = Vec::new();
        for part in blocks.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v: usize = part
                .parse()
                .map_err(|_| invalid(format!("bad block size `{part}` in `{s}`")))?;
            parsed.push(v);
        }
        if parsed == [0] {
            parsed.clear();
        }
        Configuration::new(parsed, zeros)
    }
}

/// Configuration of `H` after projecting to the closed chamber. Coordinates
/// at most `entry_abs` are zeros; the remaining sorted coordinates are chained
/// into one block while consecutive gaps stay within `entry_abs`.
pub fn configuration_of(h: &CartanElement, tol: &Tolerance) -> Configuration {
    let chamber = weyl_project(h);
    let mut blocks: Vec<usize> = Vec::new();
    let mut zeros = 0;
    let mut prev: Option<f64> = None;
    for &x in chamber.values() {
        if x <= tol.entry_abs {
            zeros += 1;
            continue;
        }
        match prev {
            Some(y) if y - x <= tol.entry_abs => *blocks.last_mut().expect("open block") += 1,
            _ => blocks.push(1),
        }
        prev = Some(x);
    }
    Configuration { blocks, zeros }
}

/// Outcome of the eligibility test `max(𝐬, 2u) + max(𝐭, 2v) ≤ 2p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EligibilityVerdict {
    pub eligible: bool,
    pub lhs: usize,
    pub rhs: usize,
}

pub fn is_eligible(cx: &Configuration, cy: &Configuration, p: usize) -> Result<EligibilityVerdict> {
    if cx.p() != p || cy.p() != p {
        return Err(invalid(format!(
            "configurations {cx} and {cy} must both sum to p = {p}"
        )));
    }
    let lhs = cx.eligibility_weight() + cy.eligibility_weight();
    Ok(EligibilityVerdict {
        eligible: lhs <= 2 * p,
        lhs,
        rhs: 2 * p,
    })
}
