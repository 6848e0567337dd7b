//! Verification checks at desk scale.
//!
//! Every check takes its sizes and bounds explicitly so the same code serves a
//! quick self-test and the stricter acceptance gate.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cartan::{cartan_projection, exp_cartan, is_eligible, Configuration};
use crate::density::{
    decide, necessity_report, search_certificate, support_sample, v_span_rank, Criterion,
    DensityStatus, NECESSITY_TOL,
};
use crate::error::Result;
use crate::lie::{
    build_roots, build_s, cartan_basis, one_param_k, sample_compact, weyl_project, CartanElement,
    GrassmannShape, RootKind,
};
use crate::linalg::{matrix_exp, DenseMatrix, FieldTag, Tolerance};
use crate::powers::{min_power, MinAbsStats, PowerStatus};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{mark} {}: {} ({:.2?})",
            self.name, self.detail, self.elapsed
        )
    }
}

fn timed(name: &str, body: impl FnOnce() -> Result<(bool, String)>) -> CheckOutcome {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckOutcome {
        name: name.to_string(),
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

fn random_element(shape: GrassmannShape, rng: &mut impl Rng) -> CartanElement {
    CartanElement::new(
        shape,
        (0..shape.p())
            .map(|_| rng.random_range(-2.0..2.0))
            .collect(),
    )
    .expect("finite coordinates")
}

/// Ordered pairs of nonzero configurations for `p`.
pub fn nonzero_pairs(p: usize) -> Vec<(Configuration, Configuration)> {
    let confs = Configuration::all_nonzero(p);
    confs
        .iter()
        .flat_map(|a| confs.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

/// Ordered pairs of all configurations for `p`, zero included.
pub fn all_pairs(p: usize) -> Vec<(Configuration, Configuration)> {
    let confs = Configuration::all(p);
    confs
        .iter()
        .flat_map(|a| confs.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

/// `‖[H, X_α] − α(H)X_α‖∞ ≤ bound` for every root vector and `draws` random `H`.
pub fn check_root_fidelity(
    shapes: &[GrassmannShape],
    draws: usize,
    bound: f64,
    seed: u64,
) -> CheckOutcome {
    timed("root fidelity", || {
        let mut worst: f64 = 0.0;
        for (si, &shape) in shapes.iter().enumerate() {
            let roots = build_roots(shape);
            let mut rng = rng::stream(seed, si as u64);
            for _ in 0..draws {
                let h = random_element(shape, &mut rng);
                let hm = h.embed(FieldTag::Real);
                for r in &roots {
                    let lhs = hm.bracket(&r.vector);
                    worst = worst.max(lhs.max_abs_diff(&r.vector.scale(r.eval(&h))));
                }
            }
        }
        Ok((
            worst <= bound,
            format!("max residual {worst:.3e} (bound {bound:.0e})"),
        ))
    })
}

/// `SᵀHS` and `Sᵀe^HS` against their closed-form diagonals.
pub fn check_diagonalizer(
    shapes: &[GrassmannShape],
    draws: usize,
    algebra_bound: f64,
    group_bound: f64,
    seed: u64,
) -> CheckOutcome {
    timed("diagonalizer", || {
        let (mut worst_alg, mut worst_grp): (f64, f64) = (0.0, 0.0);
        for (si, &shape) in shapes.iter().enumerate() {
            let n = shape.n();
            let s = build_s(shape);
            let st = s.adjoint();
            let mut rng = rng::stream(seed, si as u64);
            for _ in 0..draws {
                let h = random_element(shape, &mut rng);
                let mut diag = vec![0.0; n];
                let mut exp_diag = vec![1.0; n];
                for (i, &x) in h.values().iter().enumerate() {
                    diag[i] = x;
                    diag[n - 1 - i] = -x;
                    exp_diag[i] = x.exp();
                    exp_diag[n - 1 - i] = (-x).exp();
                }
                let hm = h.embed(FieldTag::Real);
                let d = &(&st * &hm) * &s;
                let e = &(&st * &matrix_exp(&hm)?) * &s;
                for a in 0..n {
                    for b in 0..n {
                        let (want, want_exp) = if a == b {
                            (diag[a], exp_diag[a])
                        } else {
                            (0.0, 0.0)
                        };
                        worst_alg = worst_alg.max((d.real_entry(a, b) - want).abs());
                        worst_grp = worst_grp.max((e.real_entry(a, b) - want_exp).abs());
                    }
                }
            }
        }
        Ok((
            worst_alg <= algebra_bound && worst_grp <= group_bound,
            format!("algebra {worst_alg:.3e} (bound {algebra_bound:.0e}), group {worst_grp:.3e} (bound {group_bound:.0e})"),
        ))
    })
}

/// `a(k₁e^Hk₂) = weyl_project(H)` over every field.
pub fn check_projection_round_trip(
    shapes: &[GrassmannShape],
    fields: &[FieldTag],
    draws: usize,
    bound: f64,
    seed: u64,
    tol: &Tolerance,
) -> CheckOutcome {
    timed("projection round trip", || {
        let mut worst: f64 = 0.0;
        for (si, &shape) in shapes.iter().enumerate() {
            for &field in fields {
                let mut rng = rng::stream(seed, si as u64);
                for d in 0..draws {
                    let h = random_element(shape, &mut rng);
                    let k1 = sample_compact(shape, field, seed, 2 * d as u64);
                    let k2 = sample_compact(shape, field, seed, 2 * d as u64 + 1);
                    let g = &(&k1 * &exp_cartan(&h).lift(field)) * &k2;
                    let got = cartan_projection(&g, shape, tol)?;
                    for (a, b) in got.values().iter().zip(weyl_project(&h).values()) {
                        worst = worst.max((a - b).abs());
                    }
                }
            }
        }
        Ok((
            worst <= bound,
            format!("max deviation {worst:.3e} (bound {bound:.0e})"),
        ))
    })
}

/// One row of the configuration-pair table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub shape: GrassmannShape,
    pub x: Configuration,
    pub y: Configuration,
    pub eligible: bool,
    pub certified: bool,
    /// Best V-rank over the trials (or the witnessing rank).
    pub rank: usize,
    /// Forced repetitions seen on every sample, for ineligible pairs.
    pub necessity_ok: Option<bool>,
}

impl PairRow {
    pub fn agrees(&self) -> bool {
        self.eligible == self.certified && self.necessity_ok != Some(false)
    }
}

/// `is_eligible ⇔` a V-witness of rank `pq` within `trials` draws, over all
/// ordered nonzero pairs.
pub fn check_oracle_equivalence(
    shapes: &[GrassmannShape],
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> (CheckOutcome, Vec<PairRow>) {
    let mut rows = Vec::new();
    let outcome = timed("oracle equivalence", || {
        for &shape in shapes {
            for (cx, cy) in nonzero_pairs(shape.p()) {
                let (x, y) = (cx.representative(shape)?, cy.representative(shape)?);
                let eligible = is_eligible(&cx, &cy, shape.p())?.eligible;
                let search = search_certificate(&x, &y, trials, seed, tol)?;
                let certified = search.witness_seed.is_some() && search.criterion == Criterion::V;
                rows.push(PairRow {
                    shape,
                    x: cx,
                    y: cy,
                    eligible,
                    certified,
                    rank: search.achieved_rank,
                    necessity_ok: None,
                });
            }
        }
        let mismatches: Vec<String> = rows
            .iter()
            .filter(|r| r.eligible != r.certified)
            .map(|r| format!("{} [{}]x[{}]", r.shape, r.x, r.y))
            .collect();
        Ok((
            mismatches.is_empty(),
            if mismatches.is_empty() {
                format!("{} pairs, 0 mismatches", rows.len())
            } else {
                format!("{} mismatches: {}", mismatches.len(), mismatches.join(", "))
            },
        ))
    });
    (outcome, rows)
}

/// The two explicit rotations of `so(2,3)`: `k₁` serves `Z[2;0]×Z[2;0]` and
/// `Z[1;1]×Z[1;1]`, `k₂` serves `Z[2;0]×Z[1;1]`.
pub fn explicit_witnesses() -> (DenseMatrix, DenseMatrix) {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let k1 = DenseMatrix::from_rows(&[
        &[c, -c, 0.0, 0.0, 0.0],
        &[c, c, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, c, -c],
        &[0.0, 0.0, 0.0, c, c],
    ]);
    let k2 = DenseMatrix::from_rows(&[
        &[c, -c, 0.0, 0.0, 0.0],
        &[c, c, 0.0, 0.0, 0.0],
        &[0.0, 0.0, c, 0.0, -c],
        &[0.0, 0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.0, c, 0.0, c],
    ]);
    (k1, k2)
}

pub fn check_explicit_witnesses(tol: &Tolerance) -> CheckOutcome {
    timed("explicit witnesses", || {
        let shape = GrassmannShape::new(2, 3)?;
        let z20 = CartanElement::new(shape, vec![1.0, 1.0])?;
        let z11 = CartanElement::new(shape, vec![1.0, 0.0])?;
        let (k1, k2) = explicit_witnesses();
        let ranks = [
            v_span_rank(&z20, &z20, &k1, tol)?,
            v_span_rank(&z11, &z11, &k1, tol)?,
            v_span_rank(&z20, &z11, &k2, tol)?,
        ];
        Ok((
            ranks == [6, 6, 6],
            format!("ranks {ranks:?} (want [6, 6, 6])"),
        ))
    })
}

/// Every ineligible pair, zero configurations included: every support sample
/// shows the forced repetitions.
pub fn check_necessity(
    shapes: &[GrassmannShape],
    fields: &[FieldTag],
    samples: usize,
    cluster_tol: f64,
    seed: u64,
    tol: &Tolerance,
    rows: &mut [PairRow],
) -> CheckOutcome {
    timed("necessity patterns", || {
        let (mut pairs, mut violations, mut checked) = (0, 0, 0);
        let mut untriggered = Vec::new();
        for &shape in shapes {
            for (cx, cy) in all_pairs(shape.p()) {
                if is_eligible(&cx, &cy, shape.p())?.eligible {
                    continue;
                }
                pairs += 1;
                let (x, y) = (cx.representative(shape)?, cy.representative(shape)?);
                let mut ok = true;
                for &field in fields {
                    let sample = support_sample(&x, &y, field, samples, seed, tol)?;
                    let report = necessity_report(&x, &y, &sample, cluster_tol)?;
                    if !report.triggered() {
                        untriggered.push(format!("{shape} [{cx}]x[{cy}]"));
                        ok = false;
                    }
                    for c in &report.checks {
                        checked += c.samples;
                        violations += c.samples - c.passed;
                        ok &= c.passed == c.samples;
                    }
                }
                if let Some(row) = rows
                    .iter_mut()
                    .find(|r| r.shape == shape && r.x == cx && r.y == cy)
                {
                    row.necessity_ok = Some(ok);
                }
            }
        }
        let passed = violations == 0 && untriggered.is_empty();
        let mut detail =
            format!("{pairs} ineligible pairs, {checked} clause checks, {violations} violations");
        if !untriggered.is_empty() {
            detail += &format!("; no clause applies to {}", untriggered.join(", "));
        }
        Ok((passed, detail))
    })
}

/// `Ad(e^{t(X_α+θX_α)})` on `W = X_α − θX_α` for every positive root, and the
/// absence of `a`-components when it acts on the other symmetrised vectors.
pub fn check_root_rotations(shape: GrassmannShape, ts: &[f64], bound: f64) -> CheckOutcome {
    timed("root rotations", || {
        let roots: Vec<_> = build_roots(shape)
            .into_iter()
            .filter(|r| r.is_positive())
            .collect();
        let a = |i: usize| cartan_basis(shape, i);
        let (mut worst_i, mut worst_ii): (f64, f64) = (0.0, 0.0);
        for r in &roots {
            let w = r.symmetrize().matrix.scale(2.0);
            let (freq, target) = match r.kind {
                RootKind::Short { i, .. } => (2.0, a(i)),
                RootKind::Difference { i, j } => (4.0, &a(i) - &a(j)),
                RootKind::Sum { i, j } => (4.0, &a(i) + &a(j)),
            };
            for &t in ts {
                let k = one_param_k(r, t);
                let rotated = &(&k * &w) * &k.adjoint();
                let expected = &w.scale((freq * t).cos()) + &target.scale(2.0 * (freq * t).sin());
                worst_i = worst_i.max(rotated.max_abs_diff(&expected));
                for other in roots.iter().filter(|o| o.kind != r.kind) {
                    let moved = &(&k * &other.symmetrize().matrix) * &k.adjoint();
                    for c in CartanElement::project(shape, &moved) {
                        worst_ii = worst_ii.max(c.abs());
                    }
                }
            }
        }
        Ok((
            worst_i <= bound && worst_ii <= bound,
            format!("formulas {worst_i:.3e}, a-leakage {worst_ii:.3e} (bound {bound:.0e})"),
        ))
    })
}

/// For `X` of configuration `[1; p−1]`: `S_X^{p−1}` sits on the walls and
/// `S_X^p` is full-dimensional with a bootstrapped witness.
pub fn check_power_threshold(
    shape: GrassmannShape,
    field: FieldTag,
    trials: usize,
    samples: usize,
    wall_bound: f64,
    seed: u64,
    tol: &Tolerance,
) -> CheckOutcome {
    timed("power threshold", || {
        let p = shape.p();
        let x = Configuration::new(vec![1], p - 1)?.representative(shape)?;
        let mp = min_power(&x, field, trials, samples, seed, tol)?;
        let below = &mp.trail[p - 2];
        let top = &mp.trail[p - 1];
        let wall = MinAbsStats::of(&below.sample).map_or(f64::NAN, |s| s.max);
        let passed = wall <= wall_bound
            && top.affine_dim == Some(p)
            && top.certificate.as_ref().is_some_and(|c| c.is_full())
            && top.verdict == PowerStatus::AcEvidenced
            && mp.min_power == Some(p);
        Ok((
            passed,
            format!(
                "S^{}: max min|h| {wall:.3e} (bound {wall_bound:.0e}); S^{p}: affine dim {:?}, verdict {}, min power {:?}",
                p - 1,
                top.affine_dim,
                top.verdict,
                mp.min_power
            ),
        ))
    })
}

/// Pairs of configurations with eligible self-pairs are certified.
pub fn check_squares(
    shape: GrassmannShape,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> CheckOutcome {
    timed("squares", || {
        let p = shape.p();
        let good: Vec<Configuration> = Configuration::all_nonzero(p)
            .into_iter()
            .filter(|c| is_eligible(c, c, p).map(|v| v.eligible).unwrap_or(false))
            .collect();
        let mut exceptions = Vec::new();
        let mut count = 0;
        for cx in &good {
            for cy in &good {
                count += 1;
                let (x, y) = (cx.representative(shape)?, cy.representative(shape)?);
                let v = decide(&x, &y, FieldTag::Real, trials, 0, seed, tol)?;
                if v.status != DensityStatus::AcCertified {
                    exceptions.push(format!("[{cx}]x[{cy}] {}", v.status));
                }
            }
        }
        Ok((
            exceptions.is_empty(),
            format!(
                "{count} pairs, {} exceptions{}",
                exceptions.len(),
                if exceptions.is_empty() {
                    String::new()
                } else {
                    format!(": {}", exceptions.join(", "))
                }
            ),
        ))
    })
}

/// Sizes for [`run_selftest`].
#[derive(Debug, Clone, PartialEq)]
pub struct SelftestConfig {
    pub shapes: Vec<GrassmannShape>,
    pub trials: usize,
    pub samples: usize,
    pub draws: usize,
    pub seed: u64,
    pub tol: Tolerance,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            shapes: vec![
                GrassmannShape::new(2, 3).unwrap(),
                GrassmannShape::new(3, 4).unwrap(),
            ],
            trials: crate::density::DEFAULT_TRIALS,
            samples: 100,
            draws: 20,
            seed: 0,
            tol: Tolerance::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub checks: Vec<CheckOutcome>,
    pub pairs: Vec<PairRow>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<8} {:<10} {:<10} {:<9} {:<10} {:<5} {:<9}",
            "shape", "X", "Y", "eligible", "certified", "rank", "necessity"
        )?;
        for r in &self.pairs {
            let nec = match r.necessity_ok {
                Some(true) => "ok",
                Some(false) => "VIOLATED",
                None => "-",
            };
            writeln!(
                f,
                "{:<8} {:<10} {:<10} {:<9} {:<10} {:<5} {:<9}{}",
                r.shape.to_string(),
                r.x.to_string(),
                r.y.to_string(),
                r.eligible,
                r.certified,
                r.rank,
                nec,
                if r.agrees() { "" } else { "  <-- mismatch" }
            )?;
        }
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Runs every check at the configured sizes.
pub fn run_selftest(cfg: &SelftestConfig) -> SelftestReport {
    let tol = &cfg.tol;
    let shapes = &cfg.shapes;
    let mut checks = vec![
        check_root_fidelity(shapes, cfg.draws, 1e-10, cfg.seed),
        check_diagonalizer(shapes, cfg.draws, 1e-12, 1e-10, cfg.seed),
        check_projection_round_trip(shapes, &FieldTag::ALL, cfg.draws, 1e-8, cfg.seed, tol),
    ];
    let (oracle, mut pairs) = check_oracle_equivalence(shapes, cfg.trials, cfg.seed, tol);
    checks.push(oracle);
    checks.push(check_necessity(
        shapes,
        &FieldTag::ALL,
        cfg.samples,
        NECESSITY_TOL,
        cfg.seed,
        tol,
        &mut pairs,
    ));
    if shapes.iter().any(|s| (s.p(), s.q()) == (2, 3)) {
        checks.push(check_explicit_witnesses(tol));
    }
    for &shape in shapes {
        checks.push(check_root_rotations(shape, &[0.1, 0.3, 0.7], 1e-10));
        checks.push(check_power_threshold(
            shape,
            FieldTag::Real,
            cfg.trials,
            cfg.samples,
            NECESSITY_TOL,
            cfg.seed,
            tol,
        ));
        checks.push(check_squares(shape, cfg.trials, cfg.seed, tol));
    }
    SelftestReport { checks, pairs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_selftest_passes() {
        let cfg = SelftestConfig {
            shapes: vec![GrassmannShape::new(2, 3).unwrap()],
            ..Default::default()
        };
        let report = run_selftest(&cfg);
        assert!(report.passed(), "{report}");
        assert_eq!(report.pairs.len(), 9);
    }

    #[test]
    fn coarse_rank_tolerance_fails() {
        let cfg = SelftestConfig {
            shapes: vec![GrassmannShape::new(2, 3).unwrap()],
            tol: Tolerance::new(0.5, 1e-10).unwrap(),
            ..Default::default()
        };
        assert!(!run_selftest(&cfg).passed());
    }
}
