//! Report envelopes and their JSON, CSV and text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use orbital_core::selftest::SelftestReport;
use orbital_core::{DensityVerdict, EligibilityVerdict, FieldTag, MinPower, SupportSample};

pub const SCHEMA: u32 = 1;
const DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<M, T> {
    pub schema: u32,
    pub command: String,
    pub run: M,
    pub result: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operand {
    pub configuration: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub p: usize,
    pub q: usize,
    pub field: FieldTag,
    pub x: Option<Operand>,
    pub y: Option<Operand>,
    pub trials: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol_rank: f64,
    pub tol_entry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestMeta {
    pub shapes: Vec<(usize, usize)>,
    pub trials: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol_rank: f64,
    pub tol_entry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EligibilityResult {
    pub x: String,
    pub y: String,
    /// `max(𝐬, 2u)` for X.
    pub x_weight: usize,
    /// `max(𝐭, 2v)` for Y.
    pub y_weight: usize,
    pub verdict: EligibilityVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub sample: SupportSample,
    /// Smallest absolute coordinate of each point.
    pub min_abs: Vec<f64>,
    pub affine_dim: Option<usize>,
}

pub type EligibilityReport = Envelope<RunMeta, EligibilityResult>;
pub type DecideReport = Envelope<RunMeta, DensityVerdict>;
pub type SampleReport = Envelope<RunMeta, SampleResult>;
pub type PowerReportEnvelope = Envelope<RunMeta, MinPower>;
pub type SelftestEnvelope = Envelope<SelftestMeta, SelftestReport>;

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn num(x: f64) -> String {
    let r = round_sig(x);
    if r != 0.0 && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round_sig)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn csv_string(rows: Vec<Vec<String>>) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn values(h: &[f64]) -> String {
    h.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
}

pub fn eligibility_csv(r: &EligibilityReport) -> csv::Result<String> {
    let e = &r.result;
    csv_string(vec![
        ["x", "y", "x_weight", "y_weight", "lhs", "rhs", "eligible"]
            .map(String::from)
            .to_vec(),
        vec![
            e.x.clone(),
            e.y.clone(),
            e.x_weight.to_string(),
            e.y_weight.to_string(),
            e.verdict.lhs.to_string(),
            e.verdict.rhs.to_string(),
            e.verdict.eligible.to_string(),
        ],
    ])
}

pub fn eligibility_text(r: &EligibilityReport) -> String {
    let e = &r.result;
    format!(
        "[{}] x [{}] at p={}: {} (max(s,2u) + max(t,2v) = {} + {} = {} {} {})\n",
        e.x,
        e.y,
        r.run.p,
        if e.verdict.eligible {
            "eligible"
        } else {
            "not eligible"
        },
        e.x_weight,
        e.y_weight,
        e.verdict.lhs,
        if e.verdict.eligible { "<=" } else { ">" },
        e.verdict.rhs
    )
}

pub fn decide_csv(r: &DecideReport) -> csv::Result<String> {
    let v = &r.result;
    let t = v.tangent.as_ref();
    let clauses = v
        .necessity
        .as_ref()
        .map(|n| {
            n.checks
                .iter()
                .map(|c| format!("{}:{}/{}", c.clause, c.passed, c.samples))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .unwrap_or_default();
    csv_string(vec![
        [
            "status",
            "field",
            "eligible",
            "lhs",
            "rhs",
            "criterion",
            "achieved_rank",
            "target_rank",
            "witness_seed",
            "trials",
            "clauses",
        ]
        .map(String::from)
        .to_vec(),
        vec![
            v.status.to_string(),
            v.field.to_string(),
            v.eligibility.eligible.to_string(),
            v.eligibility.lhs.to_string(),
            v.eligibility.rhs.to_string(),
            opt(t.map(|t| format!("{:?}", t.criterion))),
            opt(t.map(|t| t.achieved_rank)),
            opt(t.map(|t| t.target_rank)),
            opt(t.and_then(|t| t.witness_seed)),
            opt(t.map(|t| t.trials)),
            clauses,
        ],
    ])
}

pub fn decide_text(r: &DecideReport) -> String {
    let v = &r.result;
    let mut s = String::new();
    let _ = writeln!(s, "status: {}", v.status);
    let _ = writeln!(
        s,
        "eligibility: {} (lhs {} vs rhs {})",
        v.eligibility.eligible, v.eligibility.lhs, v.eligibility.rhs
    );
    if let Some(t) = &v.tangent {
        let _ = writeln!(
            s,
            "tangent: {:?}-criterion rank {} of {} after {} trials, witness seed {}",
            t.criterion,
            t.achieved_rank,
            t.target_rank,
            t.trials,
            opt(t.witness_seed).if_empty("none")
        );
        let _ = writeln!(s, "rank trace: {:?}", t.rank_trace);
    }
    if let Some(n) = &v.necessity {
        for c in &n.checks {
            let _ = writeln!(
                s,
                "clause {}: value {} repeated >= {} times on {} of {} samples",
                c.clause,
                num(c.value),
                c.required,
                c.passed,
                c.samples
            );
        }
    }
    if let Some(d) = &v.diagnostics {
        let _ = writeln!(s, "diagnostics: {d}");
    }
    s
}

trait IfEmpty {
    fn if_empty(self, fallback: &str) -> String;
}

impl IfEmpty for String {
    fn if_empty(self, fallback: &str) -> String {
        if self.is_empty() {
            fallback.to_string()
        } else {
            self
        }
    }
}

fn sample_header(r: &SampleReport) -> Vec<String> {
    vec![
        format!("# seed={}", r.run.seed),
        format!("# field={}", r.run.field),
        format!("# tol_rank={}", num(r.run.tol_rank)),
        format!("# tol_entry={}", num(r.run.tol_entry)),
    ]
}

/// Metadata as `#` comment lines, then one row per point.
pub fn sample_csv(r: &SampleReport) -> csv::Result<String> {
    let p = r.run.p;
    let mut rows = vec![(1..=p)
        .map(|i| format!("H{i}"))
        .chain(["min_abs".to_string()])
        .collect()];
    for (pt, m) in r.result.sample.points.iter().zip(&r.result.min_abs) {
        rows.push(
            pt.values()
                .iter()
                .map(|&x| num(x))
                .chain([num(*m)])
                .collect(),
        );
    }
    let mut out = sample_header(r).join("\n");
    out.push('\n');
    out += &csv_string(rows)?;
    Ok(out)
}

pub fn sample_text(r: &SampleReport) -> String {
    let mut s = sample_header(r).join("\n");
    s.push('\n');
    for pt in &r.result.sample.points {
        let _ = writeln!(s, "{}", values(pt.values()));
    }
    let _ = writeln!(
        s,
        "affine dimension: {}",
        opt(r.result.affine_dim).if_empty("n/a")
    );
    s
}

pub fn power_csv(r: &PowerReportEnvelope) -> csv::Result<String> {
    let mut rows = vec![[
        "l",
        "verdict",
        "affine_dim",
        "forced_zeros",
        "min_abs_max",
        "certificate_rank",
        "bootstrap_point",
    ]
    .map(String::from)
    .to_vec()];
    for t in &r.result.trail {
        rows.push(vec![
            t.l.to_string(),
            t.verdict.to_string(),
            opt(t.affine_dim),
            t.forced_zeros.to_string(),
            opt(t.min_abs_entry.map(|m| num(m.max))),
            opt(t.certificate.as_ref().map(|c| c.achieved_rank)),
            opt(t.bootstrap_point.as_ref().map(|h| values(h.values()))),
        ]);
    }
    csv_string(rows)
}

pub fn power_text(r: &PowerReportEnvelope) -> String {
    let m = &r.result;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "X = ({}) configuration [{}]",
        values(m.x.values()),
        m.configuration
    );
    for t in &m.trail {
        let _ = write!(
            s,
            "l={} {} affine_dim={} forced_zeros={}",
            t.l,
            t.verdict,
            opt(t.affine_dim).if_empty("n/a"),
            t.forced_zeros
        );
        if let Some(stats) = t.min_abs_entry {
            let _ = write!(s, " max(min|h|)={}", num(stats.max));
        }
        if let Some(h) = &t.bootstrap_point {
            let _ = write!(s, " via H=({})", values(h.values()));
        }
        if let Some(d) = &t.diagnostics {
            let _ = write!(s, " [{d}]");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "min power: {}", opt(m.min_power).if_empty("undecided"));
    s
}

pub fn selftest_csv(r: &SelftestEnvelope) -> csv::Result<String> {
    let mut rows = vec![[
        "p",
        "q",
        "x",
        "y",
        "eligible",
        "certified",
        "rank",
        "necessity",
    ]
    .map(String::from)
    .to_vec()];
    for row in &r.result.pairs {
        rows.push(vec![
            row.shape.p().to_string(),
            row.shape.q().to_string(),
            row.x.to_string(),
            row.y.to_string(),
            row.eligible.to_string(),
            row.certified.to_string(),
            row.rank.to_string(),
            opt(row.necessity_ok),
        ]);
    }
    csv_string(rows)
}
