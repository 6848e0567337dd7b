//! Numerical toolkit for deciding whether the convolution of two orbital
//! measures on the non-compact Grassmannians `SO₀(p,q)/SO(p)×SO(q)`, `q > p`,
//! (and their complex and quaternionic analogues) is absolutely continuous.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: field-generic dense matrices, singular values, the matrix
//!   exponential, Haar sampling of compact groups and numerical span ranks.
//! * [`lie`]: the Cartan subspace, the `B_p` root vectors of `so(p,q)`, the
//!   Cartan involution and the diagonaliser `S`.
//! * [`cartan`]: Cartan projection through singular values, configurations and
//!   the eligibility predicate.
//! * [`density`]: tangent-space rank certificates, support sampling, forced
//!   repetition checks and the final verdict.
//! * [`powers`]: convolution powers of a single orbital measure.
//! * [`selftest`]: the desk-scale verification suite used by the CLI.

pub mod cartan;
pub mod density;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod powers;
pub mod rng;
pub mod selftest;

pub use cartan::{
    cartan_projection, configuration_of, exp_cartan, is_eligible, Configuration, EligibilityVerdict,
};
pub use density::{
    affine_dimension, decide, find_certificate, is_total, necessity_report, support_sample,
    u_span_rank, v_span, v_span_rank, Criterion, DensityStatus, DensityVerdict, NecessityReport,
    SupportSample, TangentReport,
};
pub use error::{Error, Result};
pub use lie::{
    adjoint, build_roots, build_s, one_param_k, theta, weyl_project, CartanElement, GrassmannShape,
    RootDatum, RootKind, SymmetrizedVector,
};
pub use linalg::{
    haar_sample, matrix_exp, singular_values, span_rank, DenseMatrix, FieldTag, Quaternion,
    Tolerance,
};
pub use powers::{forced_zero_count, min_power, sample_power, MinPower, PowerReport, PowerStatus};
