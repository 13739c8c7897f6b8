use std::sync::Arc;

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use ncml::error::Error;
use ncml::group_model::FiniteGroup;
use ncml::ncalgebra::{dual_pairing, kernel_compose, KernelOperator};
use ncml::schur::{
    lift_symbol, schur_apply, schur_apply_amplified, schur_apply_dense, schur_slot_adjoint, truncate_symbol, DenseSymbol,
    PairFn, SchurSymbol,
};
use ncml::symbol::Symbol;
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn cx(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_dense(rng: &mut ChaCha8Rng, arity: usize, size: usize) -> DenseSymbol<f64> {
    let data = (0..size.pow(arity as u32)).map(|_| cx(rng)).collect();
    DenseSymbol::new(arity, size, data).unwrap()
}

fn random_ops(rng: &mut ChaCha8Rng, n: usize, w: &[f64]) -> Vec<KernelOperator<f64>> {
    (0..n).map(|_| KernelOperator::ginibre(rng, w.to_vec(), w.to_vec()).unwrap()).collect()
}

fn weights(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(0.2..2.0)).collect()
}

/// Direct summation over every index chain.
fn brute_force(phi: &DenseSymbol<f64>, ops: &[KernelOperator<f64>]) -> DMatrix<C> {
    let n = ops.len();
    let m = phi.size();
    let w = ops[0].col_weights().to_vec();
    let mut out = DMatrix::zeros(m, m);
    let inner = m.pow(n.saturating_sub(1) as u32);
    for t0 in 0..m {
        for tn in 0..m {
            let mut acc = C::new(0.0, 0.0);
            for flat in 0..inner {
                let mut idx = vec![t0];
                let mut rest = flat;
                let mut mids = vec![0; n.saturating_sub(1)];
                for j in (0..mids.len()).rev() {
                    mids[j] = rest % m;
                    rest /= m;
                }
                idx.extend(&mids);
                idx.push(tn);
                let mut term = phi.get(&idx);
                for (j, a) in ops.iter().enumerate() {
                    term *= a.kernel()[(idx[j], idx[j + 1])];
                }
                for &t in &mids {
                    term *= w[t];
                }
                acc += term;
            }
            out[(t0, tn)] = acc;
        }
    }
    out
}

#[test]
fn unary_schur_multiplier_is_the_hadamard_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = weights(&mut rng, 4);
    let phi = random_dense(&mut rng, 2, 4);
    let a = &random_ops(&mut rng, 1, &w)[0];
    let out = schur_apply_dense(&phi, &[a]).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert_abs_diff_eq!((out.kernel()[(i, j)] - phi.get(&[i, j]) * a.kernel()[(i, j)]).norm(), 0.0, epsilon = 1e-14);
        }
    }
}

#[test]
fn dense_multipliers_match_brute_force_summation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 1..=3 {
        let w = weights(&mut rng, 3);
        let phi = random_dense(&mut rng, n + 1, 3);
        let ops = random_ops(&mut rng, n, &w);
        let refs: Vec<_> = ops.iter().collect();
        let out = schur_apply_dense(&phi, &refs).unwrap();
        assert_abs_diff_eq!((out.kernel() - brute_force(&phi, &ops)).norm(), 0.0, epsilon = 1e-12);
    }
}

#[test]
fn constant_symbol_gives_the_operator_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = weights(&mut rng, 5);
    let ops = random_ops(&mut rng, 3, &w);
    let one = DenseSymbol::new(4, 5, vec![C::new(1.0, 0.0); 625]).unwrap();
    let out = schur_apply_dense(&one, &[&ops[0], &ops[1], &ops[2]]).unwrap();
    let prod = kernel_compose(&kernel_compose(&ops[0], &ops[1]).unwrap(), &ops[2]).unwrap();
    assert_abs_diff_eq!((out.kernel() - prod.kernel()).norm(), 0.0, epsilon = 1e-12);
}

#[test]
fn chain_and_generic_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pts: Vec<f64> = (0..6).map(|k| k as f64 * 0.3).collect();
    let w = weights(&mut rng, 6);
    let (c1, c2) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
    let f: PairFn<f64, f64> = Arc::new(move |s, t| C::from_polar(1.0, c1 * (s - t)));
    let g: PairFn<f64, f64> = Arc::new(move |s, t| C::new((c2 * s * t).cos(), 0.0));
    let phi = SchurSymbol::from_chain(vec![f, g]);
    let ops = random_ops(&mut rng, 2, &w);
    let fast = schur_apply(&phi, &pts, &[&ops[0], &ops[1]]).unwrap();
    let slow = schur_apply(&phi.without_chain(), &pts, &[&ops[0], &ops[1]]).unwrap();
    assert_abs_diff_eq!((fast.kernel() - slow.kernel()).norm(), 0.0, epsilon = 1e-12);
    let dense = schur_apply_dense(&truncate_symbol(&phi, &pts), &[&ops[0], &ops[1]]).unwrap();
    assert_abs_diff_eq!((fast.kernel() - dense.kernel()).norm(), 0.0, epsilon = 1e-12);
}

#[test]
fn concatenated_symbols_split_into_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<f64> = (0..5).map(|k| k as f64).collect();
    let w = weights(&mut rng, 5);
    let (a, b) = (rng.random_range(0.1..1.0), rng.random_range(0.1..1.0));
    let phi = SchurSymbol::new(3, move |t: &[f64]| C::from_polar(1.0, a * t[0] * t[1] - t[2]));
    let psi = SchurSymbol::new(2, move |t: &[f64]| C::new((b * (t[0] + 2.0 * t[1])).sin(), 0.5));
    let ops = random_ops(&mut rng, 3, &w);
    let joint = schur_apply(&phi.concat(&psi), &pts, &[&ops[0], &ops[1], &ops[2]]).unwrap();
    let left = schur_apply(&phi, &pts, &[&ops[0], &ops[1]]).unwrap();
    let right = schur_apply(&psi, &pts, &[&ops[2]]).unwrap();
    let split = kernel_compose(&left, &right).unwrap();
    assert_abs_diff_eq!((joint.kernel() - split.kernel()).norm(), 0.0, epsilon = 1e-12);
}

#[test]
fn amplification_at_level_one_is_the_plain_multiplier() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let phi = random_dense(&mut rng, 3, 4);
    let ops = random_ops(&mut rng, 2, &[1.0; 4]);
    let a = schur_apply_amplified(&phi, 1, &[&ops[0], &ops[1]]).unwrap();
    let b = schur_apply_dense(&phi, &[&ops[0], &ops[1]]).unwrap();
    assert_eq!(a, b);
}

#[test]
fn amplified_multiplier_acts_blockwise_on_elementary_tensors() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = 3;
    let phi = random_dense(&mut rng, 3, m);
    let ops = random_ops(&mut rng, 2, &[1.0; 3]);
    let alpha = DMatrix::from_fn(2, 2, |_, _| cx(&mut rng));
    let beta = DMatrix::from_fn(2, 2, |_, _| cx(&mut rng));
    let big_a = ncml::ncalgebra::amplify(&alpha, &ops[0]);
    let big_b = ncml::ncalgebra::amplify(&beta, &ops[1]);
    let out = schur_apply_amplified(&phi, 2, &[&big_a, &big_b]).unwrap();
    let plain = schur_apply_dense(&phi, &[&ops[0], &ops[1]]).unwrap();
    let expect = ncml::ncalgebra::amplify(&(&alpha * &beta), &plain);
    assert_abs_diff_eq!((out.kernel() - expect.kernel()).norm(), 0.0, epsilon = 1e-12);
}

#[test]
fn slot_adjoints_satisfy_the_duality_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let level = 2;
    let m = 3;
    let phi = random_dense(&mut rng, 4, m);
    let w = vec![1.0; m * level];
    let ops = random_ops(&mut rng, 3, &w);
    let y = random_ops(&mut rng, 1, &w).remove(0);
    let refs: Vec<_> = ops.iter().collect();
    for slot in 0..3 {
        let z = schur_slot_adjoint(&phi, level, &refs, slot, &y).unwrap();
        let probe = random_ops(&mut rng, 1, &w).remove(0);
        let mut with_probe = refs.clone();
        with_probe[slot] = &probe;
        let lhs = dual_pairing(&schur_apply_amplified(&phi, level, &with_probe).unwrap(), &y).unwrap();
        let rhs = dual_pairing(&probe, &z).unwrap();
        assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-11);
    }
}

#[test]
fn lifted_symbols_depend_on_differences_only() {
    let g = Arc::new(FiniteGroup::make_symmetric(3));
    let phi = Symbol::<usize, f64>::new(2, |s: &[usize]| C::new(s[0] as f64, (s[1] * s[1]) as f64));
    let lifted = lift_symbol(&phi, g.clone());
    assert_eq!(lifted.arity(), 3);
    for r in 0..6 {
        for s in 0..6 {
            for t in 0..6 {
                let expect = phi.eval(&[g.mul(r, g.inv(s)), g.mul(s, g.inv(t))]);
                assert_eq!(lifted.eval(&[r, s, t]), expect);
                // Right translation invariance of the lifted symbol.
                let u = (r + s + t) % 6;
                assert_eq!(lifted.eval(&[g.mul(r, u), g.mul(s, u), g.mul(t, u)]), expect);
            }
        }
    }
    let product = Symbol::<usize, f64>::product_of(vec![
        Arc::new(|s: usize| C::new(1.0 + s as f64, 0.0)),
        Arc::new(|s: usize| C::new(0.0, 2.0 - s as f64)),
    ]);
    let chained = lift_symbol(&product, g.clone());
    assert!(chained.chain().is_some());
    let pts: Vec<usize> = (0..6).collect();
    assert_eq!(truncate_symbol(&chained, &pts), truncate_symbol(&chained.without_chain(), &pts));
}

#[test]
fn arity_and_shape_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let phi = random_dense(&mut rng, 3, 3);
    let ops = random_ops(&mut rng, 2, &[1.0; 3]);
    assert!(matches!(schur_apply_dense(&phi, &[&ops[0]]), Err(Error::ArityMismatch { .. })));
    let wrong = random_ops(&mut rng, 1, &[1.0; 4]).remove(0);
    assert!(matches!(schur_apply_dense(&phi, &[&ops[0], &wrong]), Err(Error::ShapeMismatch(_))));
    assert!(matches!(DenseSymbol::<f64>::new(2, 3, vec![C::new(0.0, 0.0); 8]), Err(Error::LengthMismatch { expected: 9, got: 8 })));
    assert!(matches!(schur_slot_adjoint(&phi, 1, &[&ops[0], &ops[1]], 2, &ops[0]), Err(Error::ArityMismatch { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multipliers_are_multilinear(seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = weights(&mut rng, 3);
        let phi = random_dense(&mut rng, 3, 3);
        let ops = random_ops(&mut rng, 3, &w);
        let z = C::new(re, im);
        let mixed = ops[0].axpy(z, &ops[2]).unwrap();
        let lhs = schur_apply_dense(&phi, &[&mixed, &ops[1]]).unwrap();
        let a = schur_apply_dense(&phi, &[&ops[0], &ops[1]]).unwrap();
        let b = schur_apply_dense(&phi, &[&ops[2], &ops[1]]).unwrap();
        let rhs = a.axpy(z, &b).unwrap();
        prop_assert!((lhs.kernel() - rhs.kernel()).norm() <= 1e-11 * (1.0 + rhs.kernel().norm()));
    }

    #[test]
    fn sup_norm_bounds_unary_multipliers_on_hilbert_schmidt(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = weights(&mut rng, 4);
        let phi = random_dense(&mut rng, 2, 4);
        let a = random_ops(&mut rng, 1, &w).remove(0);
        let two = ncml::SchattenExponent::int(2).unwrap();
        let out = ncml::ncalgebra::schatten_norm(&schur_apply_dense(&phi, &[&a]).unwrap(), two).unwrap();
        let bound = phi.sup_norm() * ncml::ncalgebra::schatten_norm(&a, two).unwrap();
        prop_assert!(out <= bound * (1.0 + 1e-12));
    }
}
