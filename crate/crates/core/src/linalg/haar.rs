//! Haar-distributed elements of `SO(n)`, `SU(n)` and `Sp(n)`.
//!
//! All three come from orthonormalising a Gaussian matrix column by column
//! and fixing the phases so the triangular factor has a positive real
//! diagonal; that makes the law invariant under left multiplication.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DenseMatrix, FieldTag};
use crate::rng;

/// Haar sample of the compact group of rank `n` over `field`, reproducible
/// from `seed`.
pub fn haar_sample(field: FieldTag, n: usize, seed: u64) -> DenseMatrix {
    haar_sample_with(field, n, &mut rng::stream(seed, 0))
}

/// Same as [`haar_sample`] but draws from a caller supplied generator.
pub fn haar_sample_with<R: Rng + ?Sized>(field: FieldTag, n: usize, rng: &mut R) -> DenseMatrix {
    assert!(n >= 1, "haar_sample needs n >= 1");
    match field {
        FieldTag::Real => special_orthogonal(n, rng),
        FieldTag::Complex => special_unitary(n, rng),
        FieldTag::Quaternion => compact_symplectic(n, rng),
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

fn special_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    DenseMatrix::from_real(FieldTag::Real, &q)
}

fn special_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        col *= phase;
    }
    // Push U(n) Haar onto SU(n): the map U ↦ U·diag(conj det U, 1, …, 1)
    // commutes with left multiplication by SU(n).
    let det = q.determinant();
    let fix = (det / det.norm()).conj();
    let mut c0 = q.column_mut(0);
    c0 *= fix;
    DenseMatrix::from_complex(q)
}

/// Quaternionic Gram–Schmidt carried out on the complex embedding. Each
/// quaternion column `v` spans the complex pair `(v, Ω v̄)` where `Ω` acts on
/// every row pair as `(a, b) ↦ (−b, a)`.
fn compact_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseMatrix {
    let dim = 2 * n;
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        // The first embedded column (z₁, −z̄₂) of a Gaussian quaternion column.
        let mut v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
        for _ in 0..2 {
            for u in &basis {
                let c = u.dotc(&v);
                v -= u * c;
            }
        }
        let norm = v.norm();
        if norm < 1e-8 {
            continue;
        }
        v /= Complex64::from(norm);
        let partner = DVector::from_fn(dim, |i, _| {
            if i % 2 == 0 {
                -v[i + 1].conj()
            } else {
                v[i - 1].conj()
            }
        });
        basis.push(v);
        basis.push(partner);
    }
    let q = DMatrix::from_columns(&basis);
    DenseMatrix::from_embedded(FieldTag::Quaternion, q).expect("even dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unitarity_defect(q: &DenseMatrix) -> f64 {
        let n = q.rows();
        (&(&q.adjoint() * q) - &DenseMatrix::identity(q.field(), n)).max_abs()
    }

    #[test]
    fn real_samples_are_rotations() {
        for seed in 0..20 {
            let q = haar_sample(FieldTag::Real, 3, seed);
            assert!(unitarity_defect(&q) <= 1e-12);
            let det = q.to_real(0.0).unwrap().determinant();
            assert!((det - 1.0).abs() <= 1e-12, "det = {det}");
        }
    }

    #[test]
    fn complex_samples_have_unit_determinant() {
        for seed in 0..20 {
            let q = haar_sample(FieldTag::Complex, 4, seed);
            assert!(unitarity_defect(&q) <= 1e-12);
            let det = q.embedded().determinant();
            assert!(
                (det - Complex64::new(1.0, 0.0)).norm() <= 1e-12,
                "det = {det}"
            );
        }
    }

    #[test]
    fn quaternionic_samples_are_symplectic() {
        for seed in 0..20 {
            let q = haar_sample(FieldTag::Quaternion, 3, seed);
            assert!(unitarity_defect(&q) <= 1e-12);
            // Every 2×2 block has the embedded-quaternion shape.
            let e = q.embedded();
            for i in 0..3 {
                for j in 0..3 {
                    let (a, b) = (e[(2 * i, 2 * j)], e[(2 * i, 2 * j + 1)]);
                    assert!((e[(2 * i + 1, 2 * j)] + b.conj()).norm() < 1e-14);
                    assert!((e[(2 * i + 1, 2 * j + 1)] - a.conj()).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        for f in FieldTag::ALL {
            assert_eq!(haar_sample(f, 3, 42), haar_sample(f, 3, 42));
            assert_ne!(haar_sample(f, 3, 42), haar_sample(f, 3, 43));
        }
    }

    #[test]
    fn one_by_one_groups() {
        assert_eq!(
            haar_sample(FieldTag::Real, 1, 5),
            DenseMatrix::identity(FieldTag::Real, 1)
        );
        let u = haar_sample(FieldTag::Complex, 1, 5);
        assert!((u.embedded()[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let s = haar_sample(FieldTag::Quaternion, 1, 5);
        assert!((s.quaternion_entry(0, 0).norm() - 1.0).abs() < 1e-14);
    }
}
