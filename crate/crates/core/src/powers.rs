//! Convolution powers `(δ♮_{e^X})^l` of a single orbital measure.
//!
//! `S_X^l = a(e^X K e^X K ⋯ K e^X)` (with `l` factors `e^X`) is the Cartan
//! projected support of the `l`-th power. A point `H ∈ S_X^{l−1}` for which the
//! pair `(X, H)` has a full-rank tangent witness shows `a(e^X K e^H) ⊂ S_X^l`
//! has interior; this is how powers beyond the square are handled.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan::{cartan_projection, configuration_of, exp_cartan, is_eligible, Configuration};
use crate::density::{
    affine_dimension, decide, necessity_report, search_certificate, DensityStatus, SupportSample,
    TangentReport, NECESSITY_TOL,
};
use crate::error::{invalid, Result};
use crate::lie::{sample_compact, weyl_project, CartanElement};
use crate::linalg::{FieldTag, Tolerance};
use crate::rng;

/// Default size of every sampled point cloud.
pub const DEFAULT_SAMPLES: usize = 500;

/// `n` points of `S_X^l`. Point `i` draws its `j`-th factor `k` from stream
/// `(seed, i)` for `j = 0` and from `(subseed(seed, j), i)` otherwise, so the
/// clouds for successive `l` share their leading factors.
pub fn sample_power(
    x: &CartanElement,
    l: usize,
    field: FieldTag,
    n: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<SupportSample> {
    if l == 0 {
        return Err(invalid("the power l must be at least 1"));
    }
    let shape = x.shape();
    let ex = exp_cartan(x).lift(field);
    let points = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut g = ex.clone();
            for j in 0..l - 1 {
                let stream_seed = if j == 0 {
                    seed
                } else {
                    rng::subseed(seed, j as u64)
                };
                let k = sample_compact(shape, field, stream_seed, i as u64);
                g = &(&g * &k) * &ex;
            }
            cartan_projection(&g, shape, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SupportSample {
        shape,
        points,
        field,
        seed,
    })
}

/// Number of zero coordinates every point of `S_X^l` must have:
/// `max(u − (l−1)(p−u), 0)` for `X` of configuration `[𝐬; u]`.
pub fn forced_zero_count(conf: &Configuration, l: usize, p: usize) -> usize {
    let u = conf.zeros().min(p);
    u.saturating_sub(l.saturating_sub(1) * (p - u))
}

/// Chamber representative of a sampled point with coordinates within
/// `cluster_tol` of zero set to zero and near-equal coordinates merged.
pub fn snap_chamber(h: &CartanElement, cluster_tol: f64) -> CartanElement {
    let chamber = weyl_project(h);
    let mut values: Vec<f64> = chamber
        .values()
        .iter()
        .map(|&x| if x <= cluster_tol { 0.0 } else { x })
        .collect();
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len()
            && values[end] > 0.0
            && values[end - 1] - values[end] <= cluster_tol
        {
            end += 1;
        }
        let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
        values[start..end].iter_mut().for_each(|v| *v = mean);
        start = end;
    }
    CartanElement::new(h.shape(), values).expect("snapping keeps the length and finiteness")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PowerStatus {
    #[serde(rename = "AC_EVIDENCED")]
    AcEvidenced,
    #[serde(rename = "SINGULAR_PROVEN")]
    SingularProven,
    #[serde(rename = "UNDECIDED")]
    Undecided,
}

impl fmt::Display for PowerStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PowerStatus::AcEvidenced => "AC_EVIDENCED",
            PowerStatus::SingularProven => "SINGULAR_PROVEN",
            PowerStatus::Undecided => "UNDECIDED",
        })
    }
}

/// Summary of the smallest absolute coordinate of each sampled point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinAbsStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl MinAbsStats {
    pub fn of(sample: &SupportSample) -> Option<Self> {
        let mins: Vec<f64> = sample
            .points
            .iter()
            .map(|pt| {
                pt.values()
                    .iter()
                    .map(|x| x.abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        if mins.is_empty() {
            return None;
        }
        Some(MinAbsStats {
            min: mins.iter().copied().fold(f64::INFINITY, f64::min),
            mean: mins.iter().sum::<f64>() / mins.len() as f64,
            max: mins.iter().copied().fold(0.0, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub l: usize,
    pub sample: SupportSample,
    pub min_abs_entry: Option<MinAbsStats>,
    /// `None` when fewer than two points were sampled.
    pub affine_dim: Option<usize>,
    pub forced_zeros: usize,
    pub verdict: PowerStatus,
    /// Tangent witness: for `(X, X)` at `l = 2`, for `(X, H)` with
    /// `H = bootstrap_point` beyond.
    pub certificate: Option<TangentReport>,
    pub bootstrap_point: Option<CartanElement>,
    pub diagnostics: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinPower {
    pub x: CartanElement,
    pub configuration: Configuration,
    pub field: FieldTag,
    /// Smallest `l ≤ p` with evidence of absolute continuity.
    pub min_power: Option<usize>,
    /// One report for each `l = 1, …, p`.
    pub trail: Vec<PowerReport>,
}

/// Smallest power of `δ♮_{e^X}` with evidence of absolute continuity, and the
/// report trail for `l = 1, …, p`.
pub fn min_power(
    x: &CartanElement,
    field: FieldTag,
    trials: usize,
    samples: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<MinPower> {
    if x.is_zero() {
        return Err(invalid(
            "X = 0: every power is the Haar measure of K, which is singular",
        ));
    }
    let shape = x.shape();
    let p = shape.p();
    let conf = configuration_of(x, tol);
    let mut trail: Vec<PowerReport> = Vec::with_capacity(p);
    let mut found: Option<usize> = None;

    for l in 1..=p {
        let sample = sample_power(x, l, field, samples, seed, tol)?;
        let affine_dim = if sample.len() >= 2 {
            Some(affine_dimension(&sample, tol)?)
        } else {
            None
        };
        let forced_zeros = forced_zero_count(&conf, l, p);
        let mut report = PowerReport {
            l,
            min_abs_entry: MinAbsStats::of(&sample),
            sample,
            affine_dim,
            forced_zeros,
            verdict: PowerStatus::Undecided,
            certificate: None,
            bootstrap_point: None,
            diagnostics: None,
        };

        if let Some(l0) = found {
            if affine_dim == Some(p) {
                report.verdict = PowerStatus::AcEvidenced;
                report.diagnostics = Some(format!("inherited from l = {l0}"));
            } else {
                report.diagnostics = Some(format!(
                    "l = {l0} is absolutely continuous but the cloud is degenerate"
                ));
            }
        } else if l == 1 {
            // A single double coset: the support is one chamber point.
            report.verdict = PowerStatus::SingularProven;
        } else if l == 2 {
            let verdict = decide(x, x, field, trials, 0, seed, tol)?;
            match verdict.status {
                DensityStatus::AcCertified => report.verdict = PowerStatus::AcEvidenced,
                DensityStatus::SingularProven => {
                    let check = necessity_report(x, x, &report.sample, NECESSITY_TOL)?;
                    if check.consistent() {
                        report.verdict = PowerStatus::SingularProven;
                    } else {
                        report.diagnostics =
                            Some("sampled points violate a forced repetition".into());
                    }
                }
                DensityStatus::Undecided => report.diagnostics = verdict.diagnostics,
            }
            report.certificate = verdict.tangent;
        } else {
            bootstrap(
                x,
                &conf,
                &trail[l - 2].sample,
                trials,
                seed,
                tol,
                &mut report,
            )?;
        }

        if report.verdict == PowerStatus::AcEvidenced && found.is_none() {
            found = Some(l);
        }
        trail.push(report);
    }

    Ok(MinPower {
        x: x.clone(),
        configuration: conf,
        field,
        min_power: found,
        trail,
    })
}

/// Looks for `H` in the previous cloud with `(X, H)` eligible and certified.
fn bootstrap(
    x: &CartanElement,
    conf: &Configuration,
    previous: &SupportSample,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
    report: &mut PowerReport,
) -> Result<()> {
    let p = x.shape().p();
    let mut eligible_seen = 0;
    for h in &previous.points {
        let snapped = snap_chamber(h, NECESSITY_TOL);
        let conf_h = configuration_of(&snapped, tol);
        if conf_h.is_zero() || !is_eligible(conf, &conf_h, p)?.eligible {
            continue;
        }
        eligible_seen += 1;
        let tangent = search_certificate(x, &snapped, trials, seed, tol)?;
        if tangent.witness_seed.is_some() {
            if report.affine_dim == Some(p) {
                report.verdict = PowerStatus::AcEvidenced;
            } else {
                report.diagnostics =
                    Some("certified pair but the sampled cloud is degenerate".into());
            }
            report.certificate = Some(tangent);
            report.bootstrap_point = Some(snapped);
            return Ok(());
        }
    }

    if report.forced_zeros > 0 {
        let short = report
            .sample
            .points
            .iter()
            .filter(|pt| {
                pt.values()
                    .iter()
                    .filter(|v| v.abs() <= NECESSITY_TOL)
                    .count()
                    < report.forced_zeros
            })
            .count();
        if short == 0 {
            report.verdict = PowerStatus::SingularProven;
        } else {
            report.diagnostics = Some(format!("{short} sampled points lack the forced zeros"));
        }
    } else {
        report.diagnostics = Some(format!(
            "no certified bootstrap point among {} draws ({eligible_seen} eligible)",
            previous.len()
        ));
    }
    Ok(())
}
