use nalgebra::DMatrix;
use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::{invalid, Result};

// Scaled norms stay below this before the Taylor series is summed.
const SCALED_NORM: f64 = 0.25;
const MAX_TERMS: usize = 40;

/// Matrix exponential by scaling and squaring of the Taylor series.
///
/// Accurate to about `1e-12` relative for `‖M‖ ≤ 10`; `exp(0) = I` exactly.
pub fn matrix_exp(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(invalid(format!(
            "matrix_exp needs a square matrix, got {:?}",
            m.shape()
        )));
    }
    if !m.is_finite() {
        return Err(invalid("matrix_exp: non-finite entries"));
    }
    let a = m.embedded();
    let norm = one_norm(a);
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / Complex64::from(2f64.powi(squarings));

    let n = a.nrows();
    let mut sum = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=MAX_TERMS {
        term = &term * &scaled / Complex64::from(k as f64);
        sum += &term;
        if one_norm(&term) <= f64::EPSILON * one_norm(&sum) * 1e-2 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    DenseMatrix::from_embedded(m.field(), sum)
}

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}
