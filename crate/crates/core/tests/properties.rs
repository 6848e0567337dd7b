use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

use orbital_core::density::{search_certificate, DensityStatus};
use orbital_core::lie::sample_compact;
use orbital_core::powers::{forced_zero_count, min_power, sample_power};
use orbital_core::{
    affine_dimension, cartan_projection, configuration_of, decide, exp_cartan, haar_sample,
    is_eligible, matrix_exp, singular_values, span_rank, support_sample, weyl_project,
    CartanElement, Configuration, DenseMatrix, FieldTag, GrassmannShape, Quaternion, Tolerance,
};

fn shape(p: usize, q: usize) -> GrassmannShape {
    GrassmannShape::new(p, q).unwrap()
}

fn field() -> impl Strategy<Value = FieldTag> {
    prop_oneof![
        Just(FieldTag::Real),
        Just(FieldTag::Complex),
        Just(FieldTag::Quaternion)
    ]
}

fn general_matrix(field: FieldTag, n: usize, entries: &[f64]) -> DenseMatrix {
    let at = |k: usize| entries[k % entries.len()];
    match field {
        FieldTag::Real => {
            DenseMatrix::from_real(field, &DMatrix::from_fn(n, n, |i, j| at(i * n + j)))
        }
        FieldTag::Complex => DenseMatrix::from_complex(DMatrix::from_fn(n, n, |i, j| {
            Complex::new(at(i * n + j), at(i * n + j + 7))
        })),
        FieldTag::Quaternion => {
            let qs: Vec<Quaternion> = (0..n * n)
                .map(|k| Quaternion::new(at(k), at(k + 3), at(k + 5), at(k + 11)))
                .collect();
            DenseMatrix::from_quaternions(n, n, &qs).unwrap()
        }
    }
}

fn signed_permutation(h: &CartanElement, perm_seed: u64) -> CartanElement {
    let mut v = h.values().to_vec();
    let n = v.len();
    for i in (1..n).rev() {
        v.swap(i, (perm_seed as usize / (i + 1)) % (i + 1));
    }
    for (i, x) in v.iter_mut().enumerate() {
        if perm_seed >> i & 1 == 1 {
            *x = -*x;
        }
    }
    CartanElement::new(h.shape(), v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn haar_samples_are_unitary(f in field(), n in 1usize..7, seed in any::<u64>()) {
        let q = haar_sample(f, n, seed);
        let defect = (&(&q.adjoint() * &q) - &DenseMatrix::identity(f, n)).max_abs();
        prop_assert!(defect <= Tolerance::default().entry_abs, "{defect}");
    }

    #[test]
    fn singular_values_are_unitarily_invariant(
        f in field(),
        n in 1usize..6,
        entries in proptest::collection::vec(-1.0f64..1.0, 16),
        seed in any::<u64>(),
    ) {
        let m = general_matrix(f, n, &entries);
        let (u, v) = (haar_sample(f, n, seed), haar_sample(f, n, seed ^ 1));
        let a = singular_values(&m).unwrap();
        let b = singular_values(&(&(&u * &m) * &v)).unwrap();
        prop_assert_eq!(a.len(), n);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * a[0].max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn exp_of_commuting_sum_factors(
        a in proptest::collection::vec(-2.0f64..2.0, 4),
        b in proptest::collection::vec(-2.0f64..2.0, 4),
    ) {
        let da = DenseMatrix::from_real(FieldTag::Real, &DMatrix::from_diagonal(&a.clone().into()));
        let db = DenseMatrix::from_real(FieldTag::Real, &DMatrix::from_diagonal(&b.clone().into()));
        let lhs = matrix_exp(&(&da + &db)).unwrap();
        let rhs = &matrix_exp(&da).unwrap() * &matrix_exp(&db).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10);
    }

    #[test]
    fn span_rank_ignores_order_and_scale(
        f in field(),
        entries in proptest::collection::vec(-1.0f64..1.0, 24),
        count in 1usize..6,
        scale in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
    ) {
        let tol = Tolerance::default();
        let list: Vec<DenseMatrix> = (0..count)
            .map(|k| general_matrix(f, 2, &entries[k * 4..]))
            .collect();
        let r = span_rank(&list, &tol).unwrap();
        let mut reversed: Vec<DenseMatrix> = list.iter().rev().cloned().collect();
        prop_assert_eq!(span_rank(&reversed, &tol).unwrap(), r);
        reversed[0] = reversed[0].scale(scale);
        prop_assert_eq!(span_rank(&reversed, &tol).unwrap(), r);
    }

    #[test]
    fn weyl_projection_is_idempotent_and_keeps_magnitudes(
        h in proptest::collection::vec(-3.0f64..3.0, 4),
    ) {
        let x = CartanElement::new(shape(4, 5), h.clone()).unwrap();
        let w = weyl_project(&x);
        prop_assert_eq!(weyl_project(&w), w.clone());
        let mut mags: Vec<f64> = h.iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        prop_assert_eq!(w.values(), &mags[..]);
    }

    #[test]
    fn projection_is_k_bi_invariant(
        f in field(),
        hx in proptest::collection::vec(-1.5f64..1.5, 3),
        hy in proptest::collection::vec(-1.5f64..1.5, 3),
        seed in any::<u64>(),
    ) {
        let s = shape(3, 4);
        let tol = Tolerance::default();
        let x = CartanElement::new(s, hx).unwrap();
        let y = CartanElement::new(s, hy).unwrap();
        let g = &(&exp_cartan(&x).lift(f) * &sample_compact(s, f, seed, 0)) * &exp_cartan(&y).lift(f);
        let moved = &(&sample_compact(s, f, seed, 1) * &g) * &sample_compact(s, f, seed, 2);
        let a = cartan_projection(&g, s, &tol).unwrap();
        let b = cartan_projection(&moved, s, &tol).unwrap();
        for (u, v) in a.values().iter().zip(b.values()) {
            prop_assert!((u - v).abs() <= 1e-8);
        }
        let back = cartan_projection(&exp_cartan(&weyl_project(&x)), s, &tol).unwrap();
        for (u, v) in back.values().iter().zip(weyl_project(&x).values()) {
            prop_assert!((u - v).abs() <= 1e-8);
        }
    }

    #[test]
    fn support_points_are_chamber_points(
        f in field(),
        hx in proptest::collection::vec(-1.5f64..1.5, 3),
        hy in proptest::collection::vec(-1.5f64..1.5, 3),
        seed in any::<u64>(),
    ) {
        let s = shape(3, 5);
        let x = CartanElement::new(s, hx).unwrap();
        let y = CartanElement::new(s, hy).unwrap();
        let sample = support_sample(&x, &y, f, 8, seed, &Tolerance::default()).unwrap();
        for pt in &sample.points {
            prop_assert_eq!(&weyl_project(pt), pt);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdicts_are_weyl_invariant(
        a in 0usize..10,
        b in 0usize..10,
        w1 in any::<u64>(),
        w2 in any::<u64>(),
        seed in 0u64..1000,
    ) {
        let s = shape(3, 4);
        let confs = Configuration::all(3);
        let (cx, cy) = (&confs[a % confs.len()], &confs[b % confs.len()]);
        let (x, y) = (cx.representative(s).unwrap(), cy.representative(s).unwrap());
        let (xw, yw) = (signed_permutation(&x, w1), signed_permutation(&y, w2));
        let tol = Tolerance::default();
        prop_assert_eq!(configuration_of(&xw, &tol), cx.clone());
        let v = decide(&x, &y, FieldTag::Real, 20, 20, seed, &tol).unwrap();
        let vw = decide(&xw, &yw, FieldTag::Real, 20, 20, seed, &tol).unwrap();
        prop_assert_eq!(v.status, vw.status);
    }
}

#[test]
fn decide_is_deterministic() {
    let s = shape(3, 4);
    let tol = Tolerance::default();
    for (cx, cy) in [("2,1;0", "1;2"), ("1;2", "1;2"), ("2;1", "1,1;1")] {
        let x = cx
            .parse::<Configuration>()
            .unwrap()
            .representative(s)
            .unwrap();
        let y = cy
            .parse::<Configuration>()
            .unwrap()
            .representative(s)
            .unwrap();
        for f in FieldTag::ALL {
            let a = decide(&x, &y, f, 20, 50, 11, &tol).unwrap();
            let b = decide(&x, &y, f, 20, 50, 11, &tol).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn full_v_rank_implies_full_u_rank_across_shapes() {
    let tol = Tolerance::default();
    for (p, q) in [(2, 3), (2, 4), (3, 4)] {
        let s = shape(p, q);
        for a in Configuration::all(p) {
            for b in Configuration::all(p) {
                let (x, y) = (a.representative(s).unwrap(), b.representative(s).unwrap());
                for seed in 0..2 {
                    let k = orbital_core::density::witness_k(s, seed);
                    let v = orbital_core::v_span_rank(&x, &y, &k, &tol).unwrap();
                    let u = orbital_core::u_span_rank(&x, &y, &k, &tol).unwrap();
                    assert!(v < s.dim_p() || u == s.dim_g(), "{s} [{a}] [{b}]");
                }
            }
        }
    }
}

#[test]
fn oracle_equivalence_beyond_the_desk_shapes() {
    let tol = Tolerance::default();
    for (p, q) in [(2, 4), (3, 5)] {
        let s = shape(p, q);
        for a in Configuration::all_nonzero(p) {
            for b in Configuration::all_nonzero(p) {
                let (x, y) = (a.representative(s).unwrap(), b.representative(s).unwrap());
                let eligible = is_eligible(&a, &b, p).unwrap().eligible;
                let found = search_certificate(&x, &y, 20, 3, &tol)
                    .unwrap()
                    .witness_seed
                    .is_some();
                assert_eq!(eligible, found, "{s} [{a}] [{b}]");
            }
        }
    }
}

#[test]
fn one_short_of_p_forces_zeros_below_p() {
    let tol = Tolerance::default();
    for p in 2..=4 {
        let s = shape(p, p + 1);
        let conf = Configuration::new(vec![1], p - 1).unwrap();
        let x = conf.representative(s).unwrap();
        for l in 1..p {
            let cloud = sample_power(&x, l, FieldTag::Real, 60, 5, &tol).unwrap();
            assert_eq!(forced_zero_count(&conf, l, p), p - l);
            for pt in &cloud.points {
                let zeros = pt.values().iter().filter(|v| v.abs() <= 1e-6).count();
                assert!(zeros >= p - l, "p={p} l={l} {:?}", pt.values());
            }
        }
    }
}

#[test]
fn min_power_bounds_and_squares() {
    let tol = Tolerance::default();
    for p in 2..=3 {
        let s = shape(p, p + 1);
        let confs = Configuration::all_nonzero(p);
        let powers: Vec<usize> = confs
            .iter()
            .map(|c| {
                let mp = min_power(
                    &c.representative(s).unwrap(),
                    FieldTag::Real,
                    20,
                    120,
                    2,
                    &tol,
                )
                .unwrap();
                mp.min_power.unwrap_or(usize::MAX)
            })
            .collect();
        for (c, &m) in confs.iter().zip(&powers) {
            assert!(m <= p, "[{c}] at p={p}: {m}");
            let expected = if c.blocks() == [1] && c.zeros() == p - 1 {
                p
            } else {
                2
            };
            assert_eq!(m, expected, "[{c}]");
        }
        for (a, &ma) in confs.iter().zip(&powers) {
            for (b, &mb) in confs.iter().zip(&powers) {
                if ma <= 2 && mb <= 2 {
                    let v = decide(
                        &a.representative(s).unwrap(),
                        &b.representative(s).unwrap(),
                        FieldTag::Real,
                        20,
                        0,
                        2,
                        &tol,
                    )
                    .unwrap();
                    assert_eq!(v.status, DensityStatus::AcCertified, "[{a}] [{b}]");
                }
            }
        }
    }
}

#[test]
fn one_three_needs_the_fourth_power() {
    let tol = Tolerance::default();
    let s = shape(4, 5);
    let x = Configuration::new(vec![1], 3)
        .unwrap()
        .representative(s)
        .unwrap();
    let mp = min_power(&x, FieldTag::Real, 20, 150, 4, &tol).unwrap();
    assert_eq!(mp.min_power, Some(4));
}

#[test]
fn affine_dimension_grows_with_the_power() {
    let tol = Tolerance::default();
    let s = shape(3, 4);
    for c in ["1;2", "2;1", "3;0"] {
        let x = c
            .parse::<Configuration>()
            .unwrap()
            .representative(s)
            .unwrap();
        let dims: Vec<usize> = (1..=4)
            .map(|l| {
                affine_dimension(
                    &sample_power(&x, l, FieldTag::Complex, 80, 9, &tol).unwrap(),
                    &tol,
                )
                .unwrap()
            })
            .collect();
        assert!(dims.windows(2).all(|w| w[0] <= w[1]), "[{c}] {dims:?}");
    }
}
