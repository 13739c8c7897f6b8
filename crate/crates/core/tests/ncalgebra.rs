mod common;

use approx::assert_abs_diff_eq;
use common::{c, singular_values_2x2, C};
use nalgebra::DMatrix;
use ncml::error::Error;
use ncml::ncalgebra::{
    abs_power, amplify, block, dual_pairing, from_blocks, kernel_compose, lp_of_values, mazur_map, norming_element,
    polar_decompose, schatten_norm, singular_values, KernelOperator, SchattenExponent,
};
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exp(s: &str) -> SchattenExponent {
    s.parse().unwrap()
}

fn weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.1..3.0)).collect()
}

fn ginibre(rng: &mut ChaCha8Rng, m: usize, n: usize) -> KernelOperator<f64> {
    let (r, cw) = (weights(rng, m), weights(rng, n));
    KernelOperator::ginibre(rng, r, cw).unwrap()
}

#[test]
fn exponent_parsing_and_conjugates() {
    assert_eq!(exp("4/3").conjugate(), exp("4"));
    assert_eq!(exp("1").conjugate(), SchattenExponent::Infinity);
    assert_eq!(exp("inf").conjugate(), exp("1"));
    assert_eq!(exp("2").conjugate(), exp("2"));
    assert_eq!(exp("1.5"), exp("3/2"));
    assert_eq!(exp("4/3").to_string(), "4/3");
    assert!(matches!("0.5".parse::<SchattenExponent>(), Err(Error::BadExponent(_))));
    assert!(matches!("abc".parse::<SchattenExponent>(), Err(Error::BadExponent(_))));
    assert!(matches!("1/0".parse::<SchattenExponent>(), Err(Error::BadExponent(_))));
}

#[test]
fn rank_deficient_complex_matrix_has_exact_singular_values() {
    let data = [
        Complex::new(0.43722454726283755, 0.5557289764541766),
        Complex::new(0.4170525252830968, 0.5710229340008963),
        Complex::new(0.6255374012578404, 0.3297013188138432),
        Complex::new(0.6133351714415299, 0.3518806153694589),
    ];
    let m = DMatrix::from_column_slice(2, 2, &data);
    let (s1, s2) = singular_values_2x2(&m);
    let s = singular_values(&KernelOperator::from_matrix(m)).unwrap();
    assert_abs_diff_eq!(s[0], s1, epsilon = 1e-12);
    assert_abs_diff_eq!(s[1], s2, epsilon = 1e-7);
    assert_abs_diff_eq!(s[0], 2f64.sqrt(), epsilon = 1e-6);
}

#[test]
fn diagonal_operators_have_lp_norms_of_their_entries() {
    let d = [3.0, -1.5, 0.25, 0.0, 2.0];
    let op = KernelOperator::from_matrix(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(5, d.iter().map(|&x| c(x)))));
    for (p, expect) in [
        ("1", 6.75),
        ("2", (9.0f64 + 2.25 + 0.0625 + 4.0).sqrt()),
        ("3", (27.0f64 + 3.375 + 0.015625 + 8.0).cbrt()),
        ("inf", 3.0),
    ] {
        assert_abs_diff_eq!(schatten_norm(&op, exp(p)).unwrap(), expect, epsilon = 1e-12);
    }
}

#[test]
fn two_by_two_norms_match_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let m = DMatrix::from_fn(2, 2, |_, _| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let (s1, s2) = singular_values_2x2(&m);
        let op = KernelOperator::from_matrix(m);
        assert_abs_diff_eq!(schatten_norm(&op, exp("inf")).unwrap(), s1, epsilon = 1e-10);
        assert_abs_diff_eq!(schatten_norm(&op, exp("1")).unwrap(), s1 + s2, epsilon = 1e-10);
        let p4 = (s1.powi(4) + s2.powi(4)).powf(0.25);
        assert_abs_diff_eq!(schatten_norm(&op, exp("4")).unwrap(), p4, epsilon = 1e-10);
    }
}

#[test]
fn weighted_kernels_materialize_with_square_root_weights() {
    let k = DMatrix::from_row_slice(1, 2, &[c(1.0), c(2.0)]);
    let op = KernelOperator::new(k, vec![4.0], vec![1.0, 9.0]).unwrap();
    let m = op.materialize();
    assert_abs_diff_eq!(m[(0, 0)].re, 2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(m[(0, 1)].re, 12.0, epsilon = 1e-15);
    let back = KernelOperator::from_materialized(m, vec![4.0], vec![1.0, 9.0]).unwrap();
    assert_abs_diff_eq!((back.kernel() - op.kernel()).norm(), 0.0, epsilon = 1e-14);
}

#[test]
fn identity_kernel_is_the_identity_operator() {
    let w = vec![0.5, 2.0, 3.0];
    let id = KernelOperator::<f64>::identity(w.clone()).unwrap();
    assert_abs_diff_eq!((id.materialize() - DMatrix::identity(3, 3)).norm(), 0.0, epsilon = 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = KernelOperator::ginibre(&mut rng, w.clone(), w).unwrap();
    let y = kernel_compose(&id, &x).unwrap();
    assert_abs_diff_eq!((y.kernel() - x.kernel()).norm(), 0.0, epsilon = 1e-13);
}

#[test]
fn construction_rejects_bad_shapes_and_weights() {
    let k = DMatrix::<C>::zeros(2, 2);
    assert!(matches!(KernelOperator::new(k.clone(), vec![1.0], vec![1.0, 1.0]), Err(Error::ShapeMismatch(_))));
    assert!(matches!(KernelOperator::new(k, vec![1.0, 0.0], vec![1.0, 1.0]), Err(Error::ShapeMismatch(_))));
    let a = KernelOperator::<f64>::zeros(vec![1.0, 1.0], vec![1.0]).unwrap();
    assert!(matches!(dual_pairing(&a, &a), Err(Error::ShapeMismatch(_))));
    assert!(matches!(kernel_compose(&a, &a), Err(Error::ShapeMismatch(_))));
    assert!(matches!(norming_element(&a, exp("2")), Err(Error::ZeroOperator)));
    assert!(matches!(mazur_map(&a, exp("2"), exp("inf")), Err(Error::InfiniteExponent)));
}

#[test]
fn composition_and_pairing_match_materialized_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (r, m, cw) = (weights(&mut rng, 3), weights(&mut rng, 4), weights(&mut rng, 2));
    let a = KernelOperator::ginibre(&mut rng, r.clone(), m.clone()).unwrap();
    let b = KernelOperator::ginibre(&mut rng, m.clone(), cw).unwrap();
    let ab = kernel_compose(&a, &b).unwrap();
    assert_abs_diff_eq!((ab.materialize() - a.materialize() * b.materialize()).norm(), 0.0, epsilon = 1e-12);
    let bt = KernelOperator::ginibre(&mut rng, m, r).unwrap();
    let trace = (a.materialize() * bt.materialize()).trace();
    assert_abs_diff_eq!((dual_pairing(&a, &bt).unwrap() - trace).norm(), 0.0, epsilon = 1e-12);
}

#[test]
fn polar_parts_recompose_and_are_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = ginibre(&mut rng, 4, 3);
    let (u, h) = polar_decompose(&a).unwrap();
    let back = kernel_compose(&u, &h).unwrap();
    assert_abs_diff_eq!((back.kernel() - a.kernel()).norm(), 0.0, epsilon = 1e-11);
    let hm = h.materialize();
    assert_abs_diff_eq!((&hm - hm.adjoint()).norm(), 0.0, epsilon = 1e-12);
    assert!(hm.symmetric_eigenvalues().iter().all(|&e| e > -1e-12));
    let s_u = singular_values(&u).unwrap();
    assert!(s_u.iter().all(|&s| (s - 1.0).abs() < 1e-10));
    let h_half = abs_power(&a, 0.5).unwrap();
    let sq = kernel_compose(&h_half, &h_half).unwrap();
    assert_abs_diff_eq!((sq.kernel() - h.kernel()).norm(), 0.0, epsilon = 1e-10);
}

#[test]
fn mazur_map_norm_identity_on_random_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let two = exp("2");
    for k in 0..100 {
        let a = ginibre(&mut rng, 2 + k % 5, 2 + (k / 5) % 4);
        let p = [exp("1"), exp("4/3"), exp("3"), exp("4")][k % 4];
        let lhs = schatten_norm(&mazur_map(&a, two, p).unwrap(), p).unwrap();
        let rhs = schatten_norm(&a, two).unwrap().powf(2.0 / p.value_f64());
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0), "trial {k}: {lhs} vs {rhs}");
    }
}

#[test]
fn mazur_maps_compose_and_invert() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = ginibre(&mut rng, 3, 3);
    let (p, q, r) = (exp("2"), exp("3"), exp("5/4"));
    let pq_qr = mazur_map(&mazur_map(&a, p, q).unwrap(), q, r).unwrap();
    let pr = mazur_map(&a, p, r).unwrap();
    assert_abs_diff_eq!((pq_qr.kernel() - pr.kernel()).norm(), 0.0, epsilon = 1e-10);
    let round = mazur_map(&mazur_map(&a, p, q).unwrap(), q, p).unwrap();
    assert_abs_diff_eq!((round.kernel() - a.kernel()).norm(), 0.0, epsilon = 1e-10);
}

#[test]
fn lp_of_values_handles_zero_lists() {
    assert_eq!(lp_of_values::<f64>(&[0.0, 0.0], exp("3")), 0.0);
    assert_eq!(lp_of_values::<f64>(&[], exp("inf")), 0.0);
}

#[test]
fn amplification_blocks_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = ginibre(&mut rng, 2, 3);
    let alpha = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), C::new(0.0, 1.0), c(-1.0)]);
    let big = amplify(&alpha, &a);
    for i in 0..2 {
        for j in 0..2 {
            let b = block(&big, i, j, 2, 3);
            let expect = a.scale(alpha[(i, j)]);
            assert_abs_diff_eq!((b.kernel() - expect.kernel()).norm(), 0.0, epsilon = 1e-14);
        }
    }
    let blocks: Vec<_> = (0..4).map(|k| block(&big, k / 2, k % 2, 2, 3)).collect();
    let again = from_blocks(&blocks, 2, 2).unwrap();
    assert_eq!(again, big);
    let s_big = schatten_norm(&big, exp("3")).unwrap();
    let expect = schatten_norm(&KernelOperator::from_matrix(alpha), exp("3")).unwrap() * schatten_norm(&a, exp("3")).unwrap();
    assert_abs_diff_eq!(s_big, expect, epsilon = 1e-10);
}

#[test]
fn single_precision_alias_agrees_with_double() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = ginibre(&mut rng, 3, 3);
    let a32 = ncml::KernelOperator32::from_matrix(a.materialize().map(|z| Complex::new(z.re as f32, z.im as f32)));
    let n64 = schatten_norm(&KernelOperator::from_matrix(a.materialize()), exp("3")).unwrap();
    let n32 = schatten_norm(&a32, exp("3")).unwrap();
    assert!((n32 as f64 - n64).abs() < 1e-4 * n64);
}

fn exponent_strategy() -> impl Strategy<Value = SchattenExponent> {
    prop_oneof![
        Just(SchattenExponent::Infinity),
        (1i64..8, 1i64..4).prop_filter_map("p >= 1", |(a, b)| SchattenExponent::ratio(a.max(b), b).ok()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn holder_inequality_for_the_pairing(seed in any::<u64>(), p in exponent_strategy(), m in 1usize..5, n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ginibre(&mut rng, m, n);
        let b = KernelOperator::ginibre(&mut rng, a.col_weights().to_vec(), a.row_weights().to_vec()).unwrap();
        let lhs = dual_pairing(&a, &b).unwrap().norm();
        let rhs = schatten_norm(&a, p).unwrap() * schatten_norm(&b, p.conjugate()).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn norming_element_attains_the_norm(seed in any::<u64>(), p in exponent_strategy(), m in 1usize..5, n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ginibre(&mut rng, m, n);
        let nrm = schatten_norm(&a, p).unwrap();
        let e = norming_element(&a, p).unwrap();
        let pairing = dual_pairing(&a, &e).unwrap();
        prop_assert!((pairing.re - nrm).abs() <= 1e-9 * nrm.max(1.0));
        prop_assert!(pairing.im.abs() <= 1e-9 * nrm.max(1.0));
        prop_assert!((schatten_norm(&e, p.conjugate()).unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn schatten_norms_are_monotone_in_p(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ginibre(&mut rng, m, n);
        let ps = ["1", "4/3", "2", "3", "8", "inf"];
        let norms: Vec<f64> = ps.iter().map(|p| schatten_norm(&a, exp(p)).unwrap()).collect();
        for w in norms.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn adjoint_and_scaling_preserve_singular_values(seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ginibre(&mut rng, 3, 4);
        let z = C::new(re, im);
        let s = singular_values(&a).unwrap();
        let sa = singular_values(&a.adjoint()).unwrap();
        let sz = singular_values(&a.scale(z)).unwrap();
        for k in 0..s.len() {
            prop_assert!((s[k] - sa[k]).abs() <= 1e-10 * (1.0 + s[0]));
            prop_assert!((s[k] * z.norm() - sz[k]).abs() <= 1e-10 * (1.0 + s[0] * z.norm()));
        }
    }

    #[test]
    fn triangle_inequality(seed in any::<u64>(), p in exponent_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ginibre(&mut rng, 3, 3);
        let b = KernelOperator::ginibre(&mut rng, a.row_weights().to_vec(), a.col_weights().to_vec()).unwrap();
        let sum = a.axpy(C::new(1.0, 0.0), &b).unwrap();
        let lhs = schatten_norm(&sum, p).unwrap();
        let rhs = schatten_norm(&a, p).unwrap() + schatten_norm(&b, p).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }
}
