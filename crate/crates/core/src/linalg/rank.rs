use nalgebra::DMatrix;

use super::{DenseMatrix, FieldTag, Tolerance};
use crate::error::{invalid, Result};

/// Singular values in descending order; `min(rows, cols)` of them.
///
/// For quaternionic input the embedded complex matrix has every singular value
/// twice; one copy of each pair is returned.
pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(Vec::new());
    }
    let mut sv: Vec<f64> = match m.field() {
        FieldTag::Real => {
            let real = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.embedded()[(i, j)].re);
            real.singular_values().iter().copied().collect()
        }
        _ => m
            .embedded()
            .clone()
            .singular_values()
            .iter()
            .copied()
            .collect(),
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    if m.field() == FieldTag::Quaternion {
        sv = sv.into_iter().step_by(2).collect();
    }
    Ok(sv)
}

/// Numerical rank of the rows of `rows` (singular values above
/// `rank_rel · σ_max`).
pub fn span_rank_of_rows(rows: &DMatrix<f64>, tol: &Tolerance) -> usize {
    if rows.nrows() == 0 || rows.ncols() == 0 {
        return 0;
    }
    let sv = if rows.nrows() > rows.ncols() {
        rows.transpose().singular_values()
    } else {
        rows.clone().singular_values()
    };
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.rank_rel * top).count()
}

/// Dimension of the real span of a list of equally shaped matrices.
///
/// Each matrix is flattened to its real coordinates (1, 2 or 4 per entry).
pub fn span_rank(vectors: &[DenseMatrix], tol: &Tolerance) -> Result<usize> {
    let first = vectors
        .first()
        .ok_or_else(|| invalid("span_rank needs at least one matrix"))?;
    for v in vectors {
        if v.shape() != first.shape() || v.field() != first.field() {
            return Err(invalid(format!(
                "span_rank: matrix {:?} over {} does not match {:?} over {}",
                v.shape(),
                v.field(),
                first.shape(),
                first.field()
            )));
        }
        if !v.is_finite() {
            return Err(invalid("span_rank: non-finite entries"));
        }
    }
    let width = first.rows() * first.cols() * first.field().real_dim();
    let mut stacked = DMatrix::zeros(vectors.len(), width);
    for (r, v) in vectors.iter().enumerate() {
        for (c, x) in v.real_coordinates().into_iter().enumerate() {
            stacked[(r, c)] = x;
        }
    }
    Ok(span_rank_of_rows(&stacked, tol))
}
