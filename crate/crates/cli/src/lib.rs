//! Command-line front end for `orbital-core`.
//!
//! [`run`] executes a full command line and returns the exit code and output
//! instead of touching the process, so it can be driven from tests and from
//! inside a chosen rayon pool.

pub mod args;
pub mod report;

use std::fs;

use clap::Parser;
use thiserror::Error;

use orbital_core::powers::DEFAULT_SAMPLES;
use orbital_core::selftest::{run_selftest, SelftestConfig};
use orbital_core::{
    affine_dimension, configuration_of, decide, is_eligible, min_power, support_sample,
    weyl_project, CartanElement, Configuration, FieldTag, GrassmannShape, Tolerance,
};

pub use args::{Cli, Command, CommonArgs, Format, RunArgs, SelftestArgs};
use report::*;

/// Sample count of the self-test clouds.
pub const SELFTEST_SAMPLES: usize = 100;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] orbital_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use orbital_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Core(E::InvalidInput(_) | E::UnsupportedSize { .. }) => 1,
            CliError::Core(E::NotInGroup { .. } | E::NumericalInconsistency(_)) => 2,
            CliError::Json(_) | CliError::Csv(_) => 2,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Validated inputs of a pair or power command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub shape: GrassmannShape,
    pub field: FieldTag,
    pub x: Option<(CartanElement, Configuration)>,
    pub y: Option<(CartanElement, Configuration)>,
    pub trials: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: Tolerance,
}

fn tolerance(common: &CommonArgs) -> Result<Tolerance, CliError> {
    let d = Tolerance::default();
    Tolerance::new(
        common.tol_rank.unwrap_or(d.rank_rel),
        common.tol_entry.unwrap_or(d.entry_abs),
    )
    .map_err(|e| usage(e.to_string()))
}

fn operand(
    shape: GrassmannShape,
    name: &str,
    conf: &Option<String>,
    vals: &Option<Vec<f64>>,
    tol: &Tolerance,
) -> Result<Option<(CartanElement, Configuration)>, CliError> {
    match (conf, vals) {
        (Some(_), Some(_)) => Err(usage(format!(
            "give either --{name} or --{name}-values, not both"
        ))),
        (Some(c), None) => {
            let c: Configuration = c
                .parse()
                .map_err(|e: orbital_core::Error| usage(format!("--{name}: {e}")))?;
            if c.p() != shape.p() {
                return Err(usage(format!(
                    "--{name}: configuration [{c}] does not sum to p = {}",
                    shape.p()
                )));
            }
            let h = c
                .representative(shape)
                .map_err(|e| usage(format!("--{name}: {e}")))?;
            Ok(Some((h, c)))
        }
        (None, Some(v)) => {
            let h = CartanElement::new(shape, v.clone())
                .map_err(|e| usage(format!("--{name}-values: {e}")))?;
            let c = configuration_of(&h, tol);
            Ok(Some((h, c)))
        }
        (None, None) => Ok(None),
    }
}

impl RunConfig {
    pub fn from_args(a: &RunArgs, default_samples: usize) -> Result<Self, CliError> {
        let shape = GrassmannShape::new(a.p, a.q).map_err(|e| usage(e.to_string()))?;
        let field: FieldTag = a
            .field
            .parse()
            .map_err(|e: orbital_core::Error| usage(e.to_string()))?;
        let tol = tolerance(&a.common)?;
        Ok(RunConfig {
            shape,
            field,
            x: operand(shape, "x", &a.x, &a.x_values, &tol)?,
            y: operand(shape, "y", &a.y, &a.y_values, &tol)?,
            trials: a.common.trials,
            samples: a.common.samples.unwrap_or(default_samples),
            seed: a.common.seed,
            tol,
        })
    }

    fn need_x(&self) -> Result<&CartanElement, CliError> {
        self.x
            .as_ref()
            .map(|(h, _)| h)
            .ok_or_else(|| usage("missing --x or --x-values"))
    }

    fn need_y(&self) -> Result<&CartanElement, CliError> {
        self.y
            .as_ref()
            .map(|(h, _)| h)
            .ok_or_else(|| usage("missing --y or --y-values"))
    }

    fn meta(&self) -> RunMeta {
        let op = |o: &Option<(CartanElement, Configuration)>| {
            o.as_ref().map(|(h, c)| Operand {
                configuration: c.to_string(),
                values: h.values().to_vec(),
            })
        };
        RunMeta {
            p: self.shape.p(),
            q: self.shape.q(),
            field: self.field,
            x: op(&self.x),
            y: op(&self.y),
            trials: self.trials,
            samples: self.samples,
            seed: self.seed,
            tol_rank: self.tol.rank_rel,
            tol_entry: self.tol.entry_abs,
        }
    }
}

fn envelope<M, T>(command: &str, run: M, result: T) -> Envelope<M, T> {
    Envelope {
        schema: SCHEMA,
        command: command.to_string(),
        run,
        result,
    }
}

pub fn cmd_eligibility(cfg: &RunConfig) -> Result<EligibilityReport, CliError> {
    let (_, cx) = cfg
        .x
        .as_ref()
        .ok_or_else(|| usage("missing --x or --x-values"))?;
    let (_, cy) = cfg
        .y
        .as_ref()
        .ok_or_else(|| usage("missing --y or --y-values"))?;
    let verdict = is_eligible(cx, cy, cfg.shape.p())?;
    Ok(envelope(
        "eligibility",
        cfg.meta(),
        EligibilityResult {
            x: cx.to_string(),
            y: cy.to_string(),
            x_weight: cx.eligibility_weight(),
            y_weight: cy.eligibility_weight(),
            verdict,
        },
    ))
}

pub fn cmd_decide(cfg: &RunConfig) -> Result<DecideReport, CliError> {
    let v = decide(
        cfg.need_x()?,
        cfg.need_y()?,
        cfg.field,
        cfg.trials,
        cfg.samples,
        cfg.seed,
        &cfg.tol,
    )?;
    Ok(envelope("decide", cfg.meta(), v))
}

pub fn cmd_sample(cfg: &RunConfig) -> Result<SampleReport, CliError> {
    let sample = support_sample(
        cfg.need_x()?,
        cfg.need_y()?,
        cfg.field,
        cfg.samples,
        cfg.seed,
        &cfg.tol,
    )?;
    let min_abs = sample
        .points
        .iter()
        .map(|pt| weyl_project(pt).values().last().copied().unwrap_or(0.0))
        .collect();
    let affine_dim = if sample.len() >= 2 {
        Some(affine_dimension(&sample, &cfg.tol)?)
    } else {
        None
    };
    Ok(envelope(
        "sample",
        cfg.meta(),
        SampleResult {
            sample,
            min_abs,
            affine_dim,
        },
    ))
}

pub fn cmd_power(cfg: &RunConfig) -> Result<PowerReportEnvelope, CliError> {
    let m = min_power(
        cfg.need_x()?,
        cfg.field,
        cfg.trials,
        cfg.samples,
        cfg.seed,
        &cfg.tol,
    )?;
    Ok(envelope("power", cfg.meta(), m))
}

pub fn cmd_selftest(a: &SelftestArgs) -> Result<SelftestEnvelope, CliError> {
    let tol = tolerance(&a.common)?;
    let mut cfg = SelftestConfig {
        trials: a.common.trials,
        samples: a.common.samples.unwrap_or(SELFTEST_SAMPLES),
        seed: a.common.seed,
        tol,
        ..Default::default()
    };
    match (a.p, a.q) {
        (Some(p), q) => {
            cfg.shapes =
                vec![GrassmannShape::new(p, q.unwrap_or(p + 1)).map_err(|e| usage(e.to_string()))?]
        }
        (None, Some(_)) => return Err(usage("--q needs --p")),
        (None, None) => {}
    }
    let meta = SelftestMeta {
        shapes: cfg.shapes.iter().map(|s| (s.p(), s.q())).collect(),
        trials: cfg.trials,
        samples: cfg.samples,
        seed: cfg.seed,
        tol_rank: tol.rank_rel,
        tol_entry: tol.entry_abs,
    };
    Ok(envelope("selftest", meta, run_selftest(&cfg)))
}

/// Exit code and rendered output of one command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn render(cli: &Cli) -> Result<(String, i32), CliError> {
    let (body, code) = match &cli.command {
        Command::Eligibility(a) => {
            let r = cmd_eligibility(&RunConfig::from_args(a, 0)?)?;
            let body = match a.common.format {
                Format::Json => to_json(&r)?,
                Format::Csv => eligibility_csv(&r)?,
                Format::Text => eligibility_text(&r),
            };
            (body, 0)
        }
        Command::Decide(a) => {
            let r = cmd_decide(&RunConfig::from_args(a, DEFAULT_SAMPLES)?)?;
            let body = match a.common.format {
                Format::Json => to_json(&r)?,
                Format::Csv => decide_csv(&r)?,
                Format::Text => decide_text(&r),
            };
            (body, 0)
        }
        Command::Sample(a) => {
            let r = cmd_sample(&RunConfig::from_args(a, DEFAULT_SAMPLES)?)?;
            let body = match a.common.format {
                Format::Json => to_json(&r)?,
                Format::Csv => sample_csv(&r)?,
                Format::Text => sample_text(&r),
            };
            (body, 0)
        }
        Command::Power(a) => {
            let r = cmd_power(&RunConfig::from_args(a, DEFAULT_SAMPLES)?)?;
            let body = match a.common.format {
                Format::Json => to_json(&r)?,
                Format::Csv => power_csv(&r)?,
                Format::Text => power_text(&r),
            };
            (body, 0)
        }
        Command::Selftest(a) => {
            let r = cmd_selftest(a)?;
            let code = if r.result.passed() { 0 } else { 3 };
            let body = match a.common.format {
                Format::Json => to_json(&r)?,
                Format::Csv => selftest_csv(&r)?,
                Format::Text => r.result.to_string(),
            };
            (body, code)
        }
    };
    Ok((body, code))
}

fn out_path(cli: &Cli) -> Option<&std::path::Path> {
    match &cli.command {
        Command::Eligibility(a) | Command::Decide(a) | Command::Sample(a) | Command::Power(a) => {
            a.common.out.as_deref()
        }
        Command::Selftest(a) => a.common.out.as_deref(),
    }
}

/// Parses and executes a command line (`args[0]` is the program name).
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let result = render(&cli).and_then(|(body, code)| match out_path(&cli) {
        Some(path) => fs::write(path, &body)
            .map(|_| (String::new(), code))
            .map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            }),
        None => Ok((body, code)),
    });
    match result {
        Ok((stdout, code)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
