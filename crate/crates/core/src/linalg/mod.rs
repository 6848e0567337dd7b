//! Field-generic dense linear algebra.
//!
//! Matrices over ℝ, ℂ and ℍ share one carrier, [`DenseMatrix`], which stores
//! complex entries. Quaternionic matrices are stored through their 2×2 complex
//! block embedding, so every rank and singular value computed on the embedded
//! matrix is doubled relative to the quaternionic one; the public functions
//! here undo that doubling.

mod expm;
mod haar;
mod matrix;
mod quaternion;
mod rank;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use expm::matrix_exp;
pub use haar::{haar_sample, haar_sample_with};
pub use matrix::DenseMatrix;
pub use quaternion::Quaternion;
pub use rank::{singular_values, span_rank, span_rank_of_rows};

/// Base field of the group: `SO₀(p,q)`, `SU(p,q)` or `Sp(p,q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldTag {
    Real,
    Complex,
    Quaternion,
}

impl FieldTag {
    pub const ALL: [FieldTag; 3] = [FieldTag::Real, FieldTag::Complex, FieldTag::Quaternion];

    /// Complex rows used to store one scalar row.
    pub fn embedding_factor(self) -> usize {
        match self {
            FieldTag::Quaternion => 2,
            _ => 1,
        }
    }

    /// Real dimension of the field.
    pub fn real_dim(self) -> usize {
        match self {
            FieldTag::Real => 1,
            FieldTag::Complex => 2,
            FieldTag::Quaternion => 4,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            FieldTag::Real => "R",
            FieldTag::Complex => "C",
            FieldTag::Quaternion => "H",
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for FieldTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "R" | "r" | "real" => Ok(FieldTag::Real),
            "C" | "c" | "complex" => Ok(FieldTag::Complex),
            "H" | "h" | "quaternion" => Ok(FieldTag::Quaternion),
            other => Err(invalid(format!(
                "unknown field `{other}` (expected R, C or H)"
            ))),
        }
    }
}

/// Numerical tolerances shared by every routine.
///
/// `rank_rel` is the relative singular-value cutoff used for numerical ranks;
/// `entry_abs` is the absolute tolerance for entrywise comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_rel: f64,
    pub entry_abs: f64,
}

impl Tolerance {
    pub fn new(rank_rel: f64, entry_abs: f64) -> Result<Self> {
        if !(rank_rel > 0.0 && rank_rel < 1.0) {
            return Err(invalid(format!(
                "rank_rel must lie in (0, 1), got {rank_rel}"
            )));
        }
        if !(entry_abs > 0.0 && entry_abs.is_finite()) {
            return Err(invalid(format!(
                "entry_abs must be positive, got {entry_abs}"
            )));
        }
        Ok(Tolerance {
            rank_rel,
            entry_abs,
        })
    }

    /// Same rank cutoff with a different entry tolerance.
    pub fn with_entry_abs(self, entry_abs: f64) -> Self {
        Tolerance { entry_abs, ..self }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_rel: 1e-9,
            entry_abs: 1e-10,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(1e-9, 1e-10).is_ok());
        assert!(Tolerance::new(1.0, 1e-10).is_err());
        assert!(Tolerance::new(0.0, 1e-10).is_err());
        assert!(Tolerance::new(0.5, -1.0).is_err());
        let d = Tolerance::default();
        assert_eq!((d.rank_rel, d.entry_abs), (1e-9, 1e-10));
    }

    #[test]
    fn field_parsing() {
        for f in FieldTag::ALL {
            assert_eq!(f.symbol().parse::<FieldTag>().unwrap(), f);
        }
        assert!("Q".parse::<FieldTag>().is_err());
    }
}
