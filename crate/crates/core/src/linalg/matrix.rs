use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{FieldTag, Quaternion};
use crate::error::{invalid, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense matrix over ℝ, ℂ or ℍ.
///
/// Entries are stored as complex numbers. A quaternionic `rows × cols` matrix
/// is stored as its `2·rows × 2·cols` complex embedding, entry `(i, j)`
/// occupying the block at `(2i, 2j)`. Real matrices keep zero imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    field: FieldTag,
    rows: usize,
    cols: usize,
    data: DMatrix<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(field: FieldTag, rows: usize, cols: usize) -> Self {
        let f = field.embedding_factor();
        DenseMatrix {
            field,
            rows,
            cols,
            data: DMatrix::from_element(f * rows, f * cols, ZERO),
        }
    }

    pub fn identity(field: FieldTag, n: usize) -> Self {
        let f = field.embedding_factor();
        DenseMatrix {
            field,
            rows: n,
            cols: n,
            data: DMatrix::identity(f * n, f * n),
        }
    }

    /// Real matrix viewed over `field` (each real entry `x` becomes `x·1`).
    pub fn from_real(field: FieldTag, m: &DMatrix<f64>) -> Self {
        let mut out = Self::zeros(field, m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.set_real(i, j, m[(i, j)]);
            }
        }
        out
    }

    /// Real matrix from row slices.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let m = DMatrix::from_fn(r, c, |i, j| rows[i][j]);
        Self::from_real(FieldTag::Real, &m)
    }

    pub fn from_complex(m: DMatrix<Complex64>) -> Self {
        DenseMatrix {
            field: FieldTag::Complex,
            rows: m.nrows(),
            cols: m.ncols(),
            data: m,
        }
    }

    /// Quaternionic matrix from row-major entries.
    pub fn from_quaternions(rows: usize, cols: usize, entries: &[Quaternion]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(invalid(format!(
                "expected {} quaternion entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let mut out = Self::zeros(FieldTag::Quaternion, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set_quaternion(i, j, entries[i * cols + j]);
            }
        }
        Ok(out)
    }

    /// Wraps an already embedded complex matrix.
    pub fn from_embedded(field: FieldTag, data: DMatrix<Complex64>) -> Result<Self> {
        let f = field.embedding_factor();
        if !data.nrows().is_multiple_of(f) || !data.ncols().is_multiple_of(f) {
            return Err(invalid(
                "embedded quaternionic matrix must have even dimensions",
            ));
        }
        Ok(DenseMatrix {
            field,
            rows: data.nrows() / f,
            cols: data.ncols() / f,
            data,
        })
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// The complex storage (the 2×2-block embedding for ℍ).
    pub fn embedded(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_embedded(self) -> DMatrix<Complex64> {
        self.data
    }

    /// Real part of the scalar component of entry `(i, j)`.
    pub fn real_entry(&self, i: usize, j: usize) -> f64 {
        let f = self.field.embedding_factor();
        self.data[(f * i, f * j)].re
    }

    pub fn set_real(&mut self, i: usize, j: usize, v: f64) {
        self.set_quaternion(i, j, Quaternion::real(v));
    }

    /// Entry `(i, j)` as a quaternion; real and complex entries embed as usual.
    pub fn quaternion_entry(&self, i: usize, j: usize) -> Quaternion {
        match self.field {
            FieldTag::Quaternion => Quaternion::from_complex_pair(
                self.data[(2 * i, 2 * j)],
                self.data[(2 * i, 2 * j + 1)],
            ),
            _ => {
                let z = self.data[(i, j)];
                Quaternion::new(z.re, z.im, 0.0, 0.0)
            }
        }
    }

    /// Writes a quaternion entry; components the field cannot hold are dropped.
    pub fn set_quaternion(&mut self, i: usize, j: usize, q: Quaternion) {
        match self.field {
            FieldTag::Real => self.data[(i, j)] = Complex64::new(q.w, 0.0),
            FieldTag::Complex => self.data[(i, j)] = Complex64::new(q.w, q.x),
            FieldTag::Quaternion => {
                let b = q.embed();
                for a in 0..2 {
                    for c in 0..2 {
                        self.data[(2 * i + a, 2 * j + c)] = b[(a, c)];
                    }
                }
            }
        }
    }

    pub fn set_complex(&mut self, i: usize, j: usize, z: Complex64) {
        self.set_quaternion(i, j, Quaternion::new(z.re, z.im, 0.0, 0.0));
    }

    /// Conjugate transpose `M*` (plain transpose over ℝ).
    pub fn adjoint(&self) -> Self {
        DenseMatrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            data: self.data.adjoint(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        DenseMatrix {
            data: self.data.map(|z| z * s),
            ..self.clone()
        }
    }

    /// Frobenius norm of the underlying field matrix.
    pub fn frobenius_norm(&self) -> f64 {
        let s: f64 = self.data.iter().map(|z| z.norm_sqr()).sum();
        (s / self.field.embedding_factor() as f64).sqrt()
    }

    /// Largest absolute real coordinate.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.re.abs().max(z.im.abs()))
            .fold(0.0, f64::max)
    }

    /// `‖self − other‖` in the entrywise max-norm.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        (self - other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Real coordinates: 1, 2 or 4 per entry depending on the field, row-major.
    pub fn real_coordinates(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows * self.cols * self.field.real_dim());
        for i in 0..self.rows {
            for j in 0..self.cols {
                match self.field {
                    FieldTag::Real => out.push(self.data[(i, j)].re),
                    FieldTag::Complex => {
                        let z = self.data[(i, j)];
                        out.extend([z.re, z.im]);
                    }
                    FieldTag::Quaternion => {
                        let q = self.quaternion_entry(i, j);
                        out.extend([q.w, q.x, q.y, q.z]);
                    }
                }
            }
        }
        out
    }

    /// Real part as an `f64` matrix, or `None` if some entry is not real
    /// within `tol`.
    pub fn to_real(&self, tol: f64) -> Option<DMatrix<f64>> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let q = self.quaternion_entry(i, j);
                if q.x.abs() > tol || q.y.abs() > tol || q.z.abs() > tol {
                    return None;
                }
                out[(i, j)] = q.w;
            }
        }
        Some(out)
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn block_diag(a: &DenseMatrix, b: &DenseMatrix) -> Self {
        assert_eq!(a.field, b.field, "field mismatch");
        let mut out = Self::zeros(a.field, a.rows + b.rows, a.cols + b.cols);
        let f = a.field.embedding_factor();
        out.data
            .view_mut((0, 0), (f * a.rows, f * a.cols))
            .copy_from(&a.data);
        out.data
            .view_mut((f * a.rows, f * a.cols), (f * b.rows, f * b.cols))
            .copy_from(&b.data);
        out
    }

    /// Square block `[start, start+len)` on both axes.
    pub fn principal_block(&self, start: usize, len: usize) -> Self {
        let f = self.field.embedding_factor();
        DenseMatrix {
            field: self.field,
            rows: len,
            cols: len,
            data: self
                .data
                .view((f * start, f * start), (f * len, f * len))
                .into_owned(),
        }
    }

    /// Commutator `[self, other]`.
    pub fn bracket(&self, other: &DenseMatrix) -> Self {
        &(self * other) - &(other * self)
    }

    /// Frobenius inner product `Re tr(A* B)` on the field matrix.
    pub fn inner(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        let s: f64 = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        s / self.field.embedding_factor() as f64
    }

    /// Same entries over a larger field (ℝ ⊂ ℂ ⊂ ℍ).
    pub fn lift(&self, field: FieldTag) -> Self {
        if field == self.field {
            return self.clone();
        }
        let mut out = Self::zeros(field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set_quaternion(i, j, self.quaternion_entry(i, j));
            }
        }
        out
    }

    fn check_same(&self, other: &DenseMatrix, op: &str) {
        assert_eq!(self.field, other.field, "{op}: field mismatch");
        assert_eq!(self.shape(), other.shape(), "{op}: shape mismatch");
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.check_same(rhs, "add");
        DenseMatrix {
            data: &self.data + &rhs.data,
            ..self.clone()
        }
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.check_same(rhs, "sub");
        DenseMatrix {
            data: &self.data - &rhs.data,
            ..self.clone()
        }
    }
}

impl Neg for &DenseMatrix {
    type Output = DenseMatrix;
    fn neg(self) -> DenseMatrix {
        DenseMatrix {
            data: -&self.data,
            ..self.clone()
        }
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.field, rhs.field, "mul: field mismatch");
        assert_eq!(self.cols, rhs.rows, "mul: inner dimension mismatch");
        DenseMatrix {
            field: self.field,
            rows: self.rows,
            cols: rhs.cols,
            data: &self.data * &rhs.data,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternionic_product_matches_entrywise_hamilton_product() {
        let a = [
            Quaternion::new(1.0, 2.0, -1.0, 0.5),
            Quaternion::new(0.0, 1.0, 1.0, 1.0),
            Quaternion::new(-2.0, 0.0, 3.0, 1.0),
            Quaternion::new(0.3, -0.7, 0.0, 2.0),
        ];
        let b = [
            Quaternion::new(0.5, 0.0, 1.0, -1.0),
            Quaternion::new(1.0, 1.0, 0.0, 0.0),
            Quaternion::new(2.0, -1.0, 0.5, 0.0),
            Quaternion::new(0.0, 0.0, 0.0, 1.0),
        ];
        let ma = DenseMatrix::from_quaternions(2, 2, &a).unwrap();
        let mb = DenseMatrix::from_quaternions(2, 2, &b).unwrap();
        let prod = &ma * &mb;
        for i in 0..2 {
            for j in 0..2 {
                let expect = a[2 * i] * b[j] + a[2 * i + 1] * b[2 + j];
                let got = prod.quaternion_entry(i, j);
                assert!(
                    (got - expect).norm() < 1e-12,
                    "({i},{j}): {got:?} vs {expect:?}"
                );
            }
        }
    }

    #[test]
    fn frobenius_norm_counts_field_entries_once() {
        let mut m = DenseMatrix::zeros(FieldTag::Quaternion, 2, 2);
        m.set_quaternion(0, 1, Quaternion::new(0.0, 3.0, 0.0, 4.0));
        assert!((m.frobenius_norm() - 5.0).abs() < 1e-14);
        assert_eq!(
            DenseMatrix::zeros(FieldTag::Complex, 3, 2).frobenius_norm(),
            0.0
        );
        assert_eq!(m.real_coordinates().len(), 16);
    }

    #[test]
    fn lift_preserves_products() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, -1.0]]);
        let b = DenseMatrix::from_rows(&[&[0.5, 0.0], &[3.0, 1.0]]);
        for f in FieldTag::ALL {
            let lifted = &a.lift(f) * &b.lift(f);
            assert!(lifted.max_abs_diff(&(&a * &b).lift(f)) < 1e-15);
            assert_eq!(
                lifted.to_real(1e-15).unwrap(),
                (&a * &b).to_real(0.0).unwrap()
            );
        }
    }

    #[test]
    fn inner_product_is_frobenius() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!((a.inner(&a) - a.frobenius_norm().powi(2)).abs() < 1e-12);
        let aq = a.lift(FieldTag::Quaternion);
        assert!((aq.inner(&aq) - 30.0).abs() < 1e-12);
    }
}
