//! Deciding absolute continuity of `δ♮_{e^X} ⋆ δ♮_{e^Y}`.
//!
//! Sufficiency is certified by a tangent-space rank computation: a single
//! `k ∈ K` with `V_X + Ad(k)V_Y = p` (or, as a fallback, with
//! `U_{−X} + Ad(k)U_Y = g`) makes the derivative of `(k₁,k₂,k₃) ↦ k₁e^Xk₂e^Yk₃`
//! surjective. Necessity is the deterministic eligibility predicate; sampled
//! Cartan projections of `e^X K e^Y` are checked against the repetitions it
//! forces.

use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan::{
    cartan_projection, configuration_of, exp_cartan, is_eligible, Configuration, EligibilityVerdict,
};
use crate::error::{invalid, Error, Result};
use crate::lie::{
    build_roots, compact_basis, sample_compact, weyl_project, CartanElement, GrassmannShape,
    RootDatum, SymmetrizedVector,
};
use crate::linalg::{span_rank_of_rows, DenseMatrix, FieldTag, Tolerance};
use crate::rng;

/// Absolute tolerance for zero detection and value clustering on sampled
/// chamber coordinates; projection noise grows near the chamber walls.
pub const NECESSITY_TOL: f64 = 1e-6;

/// Default number of Haar draws in a certificate search.
pub const DEFAULT_TRIALS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// `V_X + Ad(k)V_Y = p`.
    #[serde(rename = "V")]
    V,
    /// `U_{−X} + Ad(k)U_Y = g`.
    #[serde(rename = "U")]
    U,
}

/// Result of a tangent-space rank search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangentReport {
    pub criterion: Criterion,
    pub achieved_rank: usize,
    pub target_rank: usize,
    /// Seed of the witnessing `k` (see [`witness_k`]); `None` if no trial
    /// reached the target.
    pub witness_seed: Option<u64>,
    pub trials: usize,
    /// Rank reached by each trial, in order.
    pub rank_trace: Vec<usize>,
}

impl TangentReport {
    pub fn is_full(&self) -> bool {
        self.achieved_rank == self.target_rank
    }
}

/// Symmetrised root vectors `½(X_α − θX_α)` over the positive roots with
/// `|α(Z)| > entry_abs`. The vectors for `α` and `−α` coincide, so one per
/// pair is enough.
pub fn v_span(z: &CartanElement, tol: &Tolerance) -> Vec<SymmetrizedVector> {
    v_span_from(&build_roots(z.shape()), z, tol)
}

fn v_span_from(roots: &[RootDatum], z: &CartanElement, tol: &Tolerance) -> Vec<SymmetrizedVector> {
    roots
        .iter()
        .filter(|r| r.is_positive() && r.eval(z).abs() > tol.entry_abs)
        .map(RootDatum::symmetrize)
        .collect()
}

/// `k` for a recorded witness seed.
pub fn witness_k(shape: GrassmannShape, witness_seed: u64) -> DenseMatrix {
    sample_compact(shape, FieldTag::Real, witness_seed, 0)
}

fn check_compact(shape: GrassmannShape, k: &DenseMatrix, tol: &Tolerance) -> Result<()> {
    let n = shape.n();
    if k.field() != FieldTag::Real || k.shape() != (n, n) {
        return Err(invalid(format!("k must be a real {n}×{n} matrix")));
    }
    let defect = (&(&k.adjoint() * k) - &DenseMatrix::identity(FieldTag::Real, n)).max_abs();
    let mut leak: f64 = 0.0;
    for a in 0..shape.p() {
        for b in shape.p()..n {
            leak = leak
                .max(k.real_entry(a, b).abs())
                .max(k.real_entry(b, a).abs());
        }
    }
    if defect > tol.entry_abs || leak > tol.entry_abs {
        return Err(invalid(format!(
            "k is not in K: orthogonality defect {defect:.3e}, off-block {leak:.3e}"
        )));
    }
    Ok(())
}

/// Coordinates of `M ∈ p` (its upper-right `p × q` block).
fn p_coordinates(shape: GrassmannShape, m: &DenseMatrix) -> Vec<f64> {
    let p = shape.p();
    (0..p)
        .flat_map(|i| (0..shape.q()).map(move |j| (i, p + j)))
        .map(|(i, j)| m.real_entry(i, j))
        .collect()
}

fn rank_of(rows: Vec<Vec<f64>>, tol: &Tolerance) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let width = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), width, |i, j| rows[i][j]);
    span_rank_of_rows(&m, tol)
}

fn conjugate(k: &DenseMatrix, m: &DenseMatrix) -> DenseMatrix {
    &(k * m) * &k.adjoint()
}

/// `dim(V_X + Ad(k)V_Y)` inside `p`; the value `pq` certifies absolute
/// continuity.
pub fn v_span_rank(
    x: &CartanElement,
    y: &CartanElement,
    k: &DenseMatrix,
    tol: &Tolerance,
) -> Result<usize> {
    let shape = same_shape(x, y)?;
    check_compact(shape, k, tol)?;
    let roots = build_roots(shape);
    Ok(v_rank_unchecked(
        shape,
        &v_span_from(&roots, x, tol),
        &v_span_from(&roots, y, tol),
        k,
        tol,
    ))
}

fn v_rank_unchecked(
    shape: GrassmannShape,
    vx: &[SymmetrizedVector],
    vy: &[SymmetrizedVector],
    k: &DenseMatrix,
    tol: &Tolerance,
) -> usize {
    let rows = vx
        .iter()
        .map(|v| p_coordinates(shape, &v.matrix))
        .chain(
            vy.iter()
                .map(|v| p_coordinates(shape, &conjugate(k, &v.matrix))),
        )
        .collect();
    rank_of(rows, tol)
}

/// `dim(k + Ad(e^{−X})k + Ad(k)Ad(e^Y)k)` inside `g`; the value `dim g`
/// certifies absolute continuity.
pub fn u_span_rank(
    x: &CartanElement,
    y: &CartanElement,
    k: &DenseMatrix,
    tol: &Tolerance,
) -> Result<usize> {
    let shape = same_shape(x, y)?;
    check_compact(shape, k, tol)?;
    Ok(u_rank_unchecked(&u_generators(x, y), k, tol))
}

struct UGenerators {
    compact: Vec<DenseMatrix>,
    from_x: Vec<DenseMatrix>,
    from_y: Vec<DenseMatrix>,
}

fn u_generators(x: &CartanElement, y: &CartanElement) -> UGenerators {
    let shape = x.shape();
    let compact = compact_basis(shape);
    let (emx, ex) = (exp_cartan(&x.scaled(-1.0)), exp_cartan(x));
    let (ey, emy) = (exp_cartan(y), exp_cartan(&y.scaled(-1.0)));
    let from_x = compact.iter().map(|a| &(&emx * a) * &ex).collect();
    let from_y = compact.iter().map(|a| &(&ey * a) * &emy).collect();
    UGenerators {
        compact,
        from_x,
        from_y,
    }
}

fn u_rank_unchecked(gens: &UGenerators, k: &DenseMatrix, tol: &Tolerance) -> usize {
    let rows = gens
        .compact
        .iter()
        .chain(&gens.from_x)
        .map(DenseMatrix::real_coordinates)
        .chain(
            gens.from_y
                .iter()
                .map(|m| conjugate(k, m).real_coordinates()),
        )
        .collect();
    rank_of(rows, tol)
}

fn same_shape(x: &CartanElement, y: &CartanElement) -> Result<GrassmannShape> {
    if x.shape() != y.shape() {
        return Err(invalid(format!(
            "X has shape {} but Y has shape {}",
            x.shape(),
            y.shape()
        )));
    }
    Ok(x.shape())
}

/// Full search: tries `trials` Haar draws for the V-criterion, then the same
/// draws for the U-criterion. Always returns the best report found.
pub fn search_certificate(
    x: &CartanElement,
    y: &CartanElement,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<TangentReport> {
    let shape = same_shape(x, y)?;
    let roots = build_roots(shape);
    let (vx, vy) = (v_span_from(&roots, x, tol), v_span_from(&roots, y, tol));
    let trial_seed = |t: usize| rng::subseed(seed, t as u64);

    let mut v_trace = Vec::new();
    for t in 0..trials {
        let k = witness_k(shape, trial_seed(t));
        let rank = v_rank_unchecked(shape, &vx, &vy, &k, tol);
        v_trace.push(rank);
        if rank == shape.dim_p() {
            return Ok(TangentReport {
                criterion: Criterion::V,
                achieved_rank: rank,
                target_rank: shape.dim_p(),
                witness_seed: Some(trial_seed(t)),
                trials: t + 1,
                rank_trace: v_trace,
            });
        }
    }

    let gens = u_generators(x, y);
    let mut u_trace = Vec::new();
    for t in 0..trials {
        let k = witness_k(shape, trial_seed(t));
        let rank = u_rank_unchecked(&gens, &k, tol);
        u_trace.push(rank);
        if rank == shape.dim_g() {
            return Ok(TangentReport {
                criterion: Criterion::U,
                achieved_rank: rank,
                target_rank: shape.dim_g(),
                witness_seed: Some(trial_seed(t)),
                trials: t + 1,
                rank_trace: u_trace,
            });
        }
    }

    Ok(TangentReport {
        criterion: Criterion::V,
        achieved_rank: v_trace.iter().copied().max().unwrap_or(0),
        target_rank: shape.dim_p(),
        witness_seed: None,
        trials,
        rank_trace: v_trace,
    })
}

/// First Haar `k` (out of `trials`) giving a full-rank tangent space, or
/// `None`. Absence is not a proof of singularity.
pub fn find_certificate(
    x: &CartanElement,
    y: &CartanElement,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<Option<TangentReport>> {
    let report = search_certificate(x, y, trials, seed, tol)?;
    Ok(report.witness_seed.is_some().then_some(report))
}

/// Sampled Cartan projections `a(e^X k e^Y)`, `k` Haar in `K` over a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SampleRepr", try_from = "SampleRepr")]
pub struct SupportSample {
    pub shape: GrassmannShape,
    pub points: Vec<CartanElement>,
    pub field: FieldTag,
    pub seed: u64,
}

/// Wire form: the shape once, then bare coordinate rows.
#[derive(Serialize, Deserialize)]
struct SampleRepr {
    shape: GrassmannShape,
    field: FieldTag,
    seed: u64,
    points: Vec<Vec<f64>>,
}

impl From<SupportSample> for SampleRepr {
    fn from(s: SupportSample) -> Self {
        SampleRepr {
            shape: s.shape,
            field: s.field,
            seed: s.seed,
            points: s.points.iter().map(|pt| pt.values().to_vec()).collect(),
        }
    }
}

impl TryFrom<SampleRepr> for SupportSample {
    type Error = Error;

    fn try_from(r: SampleRepr) -> Result<Self> {
        let points = r
            .points
            .into_iter()
            .map(|h| CartanElement::new(r.shape, h))
            .collect::<Result<_>>()?;
        Ok(SupportSample {
            shape: r.shape,
            points,
            field: r.field,
            seed: r.seed,
        })
    }
}

impl SupportSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n` points of the support `a(e^X K e^Y)`. Point `i` uses the random stream
/// `(seed, i)`, so the output does not depend on the thread count.
pub fn support_sample(
    x: &CartanElement,
    y: &CartanElement,
    field: FieldTag,
    n: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<SupportSample> {
    let shape = same_shape(x, y)?;
    let (ex, ey) = (exp_cartan(x).lift(field), exp_cartan(y).lift(field));
    let points = (0..n)
        .into_par_iter()
        .map(|i| {
            let k = sample_compact(shape, field, seed, i as u64);
            cartan_projection(&(&(&ex * &k) * &ey), shape, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SupportSample {
        shape,
        points,
        field,
        seed,
    })
}

/// Which forced-repetition clause of the necessity argument applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    /// `u + v > p`: at least `u + v − p` zero coordinates.
    #[serde(rename = "zeros")]
    Zeros,
    /// `2u + max 𝐭 > 2p`: a longest block value of `Y` repeats.
    #[serde(rename = "x_zeros_y_block")]
    XZerosYBlock,
    /// `2v + max 𝐬 > 2p`: a longest block value of `X` repeats.
    #[serde(rename = "y_zeros_x_block")]
    YZerosXBlock,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Zeros => "u+v>p",
            Clause::XZerosYBlock => "2u+max(t)>2p",
            Clause::YZerosXBlock => "2v+max(s)>2p",
        })
    }
}

/// Per-clause verification over a support sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseCheck {
    pub clause: Clause,
    /// The value that must repeat (0 for the zero clause).
    pub value: f64,
    /// Minimum number of coordinates equal to `value`.
    pub required: usize,
    pub samples: usize,
    pub passed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessityReport {
    pub x_config: Configuration,
    pub y_config: Configuration,
    pub tolerance: f64,
    pub checks: Vec<ClauseCheck>,
}

impl NecessityReport {
    pub fn triggered(&self) -> bool {
        !self.checks.is_empty()
    }

    pub fn consistent(&self) -> bool {
        self.checks.iter().all(|c| c.passed == c.samples)
    }
}

/// `(value, size)` of each block of equal non-zero chamber coordinates.
fn block_values(h: &CartanElement, tol: &Tolerance) -> Vec<(f64, usize)> {
    let chamber = weyl_project(h);
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &x in chamber.values().iter().filter(|&&x| x > tol.entry_abs) {
        match out.last_mut() {
            Some((v, size)) if *v - x <= tol.entry_abs => *size += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

/// Checks every violated eligibility clause on every sampled point.
/// `cluster_tol` is the absolute tolerance for "equal to the forced value".
pub fn necessity_report(
    x: &CartanElement,
    y: &CartanElement,
    sample: &SupportSample,
    cluster_tol: f64,
) -> Result<NecessityReport> {
    let shape = same_shape(x, y)?;
    let p = shape.p();
    let tol = Tolerance::default();
    let (cx, cy) = (configuration_of(x, &tol), configuration_of(y, &tol));
    let (u, v) = (cx.zeros(), cy.zeros());

    let mut targets: Vec<(Clause, f64, usize)> = Vec::new();
    if u + v > p {
        targets.push((Clause::Zeros, 0.0, u + v - p));
    }
    let mut block_clause =
        |clause, zeros: usize, other: &CartanElement, other_conf: &Configuration| {
            let t = other_conf.max_block();
            if t > 0 && 2 * zeros + t > 2 * p {
                for (value, size) in block_values(other, &tol) {
                    if size == t {
                        targets.push((clause, value, 2 * zeros + t - 2 * p));
                    }
                }
            }
        };
    block_clause(Clause::XZerosYBlock, u, y, &cy);
    block_clause(Clause::YZerosXBlock, v, x, &cx);

    let checks = targets
        .into_iter()
        .map(|(clause, value, required)| {
            let passed = sample
                .points
                .iter()
                .filter(|pt| {
                    pt.values()
                        .iter()
                        .filter(|&&c| (c - value).abs() <= cluster_tol)
                        .count()
                        >= required
                })
                .count();
            ClauseCheck {
                clause,
                value,
                required,
                samples: sample.len(),
                passed,
            }
        })
        .collect();
    Ok(NecessityReport {
        x_config: cx,
        y_config: cy,
        tolerance: cluster_tol,
        checks,
    })
}

/// Numerical dimension of the affine hull of a point cloud: the rank of the
/// centred cloud. Besides the relative `rank_rel` cutoff, singular values
/// must exceed `entry_abs·√(points·p)`, the size of pure projection noise.
pub fn affine_dimension(sample: &SupportSample, tol: &Tolerance) -> Result<usize> {
    affine_dimension_of(&sample.points, tol)
}

pub(crate) fn affine_dimension_of(points: &[CartanElement], tol: &Tolerance) -> Result<usize> {
    if points.len() < 2 {
        return Err(invalid("affine_dimension needs at least two points"));
    }
    let p = points[0].values().len();
    let count = points.len();
    let mut mean = vec![0.0; p];
    for pt in points {
        for (m, x) in mean.iter_mut().zip(pt.values()) {
            *m += x / count as f64;
        }
    }
    let centred = DMatrix::from_fn(count, p, |i, j| points[i].values()[j] - mean[j]);
    let sv = centred.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let floor = (tol.rank_rel * top).max(tol.entry_abs * ((count * p) as f64).sqrt());
    Ok(sv.iter().filter(|&&s| s > floor).count())
}

/// Largest size accepted by [`is_total`].
pub const MAX_TOTAL_SIZE: usize = 8;

/// Whether every square submatrix left after deleting `r` rows and `r`
/// columns (`1 ≤ r < n`) has `|det| > entry_abs`.
pub fn is_total(m: &DenseMatrix, tol: &Tolerance) -> Result<bool> {
    if !m.is_square() {
        return Err(invalid("is_total needs a square matrix"));
    }
    let n = m.rows();
    if n > MAX_TOTAL_SIZE {
        return Err(Error::UnsupportedSize {
            size: n,
            max: MAX_TOTAL_SIZE,
        });
    }
    let real = m
        .to_real(tol.entry_abs)
        .ok_or_else(|| invalid("is_total needs a real matrix"))?;
    let subsets_of = |size: usize| -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|mask| mask.count_ones() as usize == size)
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
            .collect()
    };
    for keep in 1..n {
        let subsets = subsets_of(keep);
        for rows in &subsets {
            for cols in &subsets {
                let minor = DMatrix::from_fn(keep, keep, |a, b| real[(rows[a], cols[b])]);
                if minor.determinant().abs() <= tol.entry_abs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityStatus {
    #[serde(rename = "AC_CERTIFIED")]
    AcCertified,
    #[serde(rename = "SINGULAR_PROVEN")]
    SingularProven,
    #[serde(rename = "UNDECIDED")]
    Undecided,
}

impl fmt::Display for DensityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityStatus::AcCertified => "AC_CERTIFIED",
            DensityStatus::SingularProven => "SINGULAR_PROVEN",
            DensityStatus::Undecided => "UNDECIDED",
        })
    }
}

/// Verdict on the absolute continuity of `δ♮_{e^X} ⋆ δ♮_{e^Y}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityVerdict {
    pub status: DensityStatus,
    pub field: FieldTag,
    pub eligibility: EligibilityVerdict,
    pub tangent: Option<TangentReport>,
    pub necessity: Option<NecessityReport>,
    pub diagnostics: Option<String>,
}

/// Eligible pairs are certified by a real tangent witness, which covers ℂ and
/// ℍ as well since `a(e^X K_ℝ e^Y) ⊂ a(e^X K_ℂ e^Y) ⊂ a(e^X K_ℍ e^Y)`.
/// Ineligible pairs are singular; `samples` support points over `field`
/// corroborate the forced repetitions.
pub fn decide(
    x: &CartanElement,
    y: &CartanElement,
    field: FieldTag,
    trials: usize,
    samples: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<DensityVerdict> {
    let shape = same_shape(x, y)?;
    let (cx, cy) = (configuration_of(x, tol), configuration_of(y, tol));
    let eligibility = is_eligible(&cx, &cy, shape.p())?;

    if eligibility.eligible {
        let report = search_certificate(x, y, trials, seed, tol)?;
        let (status, diagnostics) = if report.witness_seed.is_some() {
            (DensityStatus::AcCertified, None)
        } else {
            (
                DensityStatus::Undecided,
                Some(format!(
                    "eligible pair but no full-rank witness in {trials} trials (best V-rank {} of {})",
                    report.achieved_rank, report.target_rank
                )),
            )
        };
        return Ok(DensityVerdict {
            status,
            field,
            eligibility,
            tangent: Some(report),
            necessity: None,
            diagnostics,
        });
    }

    let sample = support_sample(x, y, field, samples, seed, tol)?;
    let report = necessity_report(x, y, &sample, NECESSITY_TOL)?;
    let (status, diagnostics) = if report.consistent() {
        (DensityStatus::SingularProven, None)
    } else {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| c.passed < c.samples)
            .map(|c| {
                format!(
                    "{} failed on {} of {} samples",
                    c.clause,
                    c.samples - c.passed,
                    c.samples
                )
            })
            .collect();
        (
            DensityStatus::Undecided,
            Some(format!(
                "ineligible pair with inconsistent samples: {}",
                failed.join("; ")
            )),
        )
    };
    Ok(DensityVerdict {
        status,
        field,
        eligibility,
        tangent: None,
        necessity: Some(report),
        diagnostics,
    })
}
