#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex;

pub type C = Complex<f64>;

pub fn c(re: f64) -> C {
    Complex::new(re, 0.0)
}

pub fn singular_values_2x2(m: &DMatrix<C>) -> (f64, f64) {
    let h = m.adjoint() * m;
    let (a, d) = (h[(0, 0)].re, h[(1, 1)].re);
    let b = h[(0, 1)].norm_sqr();
    let disc = ((a - d) * (a - d) / 4.0 + b).sqrt();
    let l1 = ((a + d) / 2.0 + disc).max(0.0);
    let l2 = ((a + d) / 2.0 - disc).max(0.0);
    (l1.sqrt(), l2.sqrt())
}

/// Maximizes `g` over an interval by grid search followed by golden-ratio
/// shrinking around the best grid cell.
fn refine_1d(g: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize) -> f64 {
    let h = (hi - lo) / grid as f64;
    let best = (0..=grid).map(|i| lo + h * i as f64).fold((f64::MIN, lo), |acc, x| {
        let v = g(x);
        if v > acc.0 { (v, x) } else { acc }
    });
    let (mut a, mut b) = ((best.1 - h).max(lo), (best.1 + h).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if g(x1) >= g(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    best.0.max(g(0.5 * (a + b)))
}

/// Norm of the Hadamard multiplier by `m` on 2x2 matrices with the operator
/// norm. Modulo diagonal unitaries every 2x2 unitary is the reflection
/// `[[c, s], [s, -c]]`, and the supremum over the unit ball is attained at
/// a unitary.
pub fn hadamard_oracle_inf(m: &DMatrix<C>) -> f64 {
    refine_1d(
        |t| {
            let (c0, s0) = (t.cos(), t.sin());
            let x = DMatrix::from_row_slice(2, 2, &[m[(0, 0)] * c0, m[(0, 1)] * s0, m[(1, 0)] * s0, -m[(1, 1)] * c0]);
            singular_values_2x2(&x).0
        },
        0.0,
        std::f64::consts::PI,
        2000,
    )
}

/// Norm on 2x2 matrices with the trace norm, searched over the extreme
/// points `u v^*` with nonnegative unit vectors.
pub fn hadamard_oracle_one(m: &DMatrix<C>) -> f64 {
    let half = std::f64::consts::FRAC_PI_2;
    let inner = |a: f64| {
        refine_1d(
            |b| {
                let u = [a.cos(), a.sin()];
                let v = [b.cos(), b.sin()];
                let x = DMatrix::from_fn(2, 2, |i, j| m[(i, j)] * (u[i] * v[j]));
                let (s1, s2) = singular_values_2x2(&x);
                s1 + s2
            },
            0.0,
            half,
            200,
        )
    };
    refine_1d(inner, 0.0, half, 200)
}

pub fn hadamard_oracle_two(m: &DMatrix<C>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// All 81 matrices with entries in {-1, 0, 1}.
pub fn sign_matrices() -> Vec<DMatrix<C>> {
    (0..81)
        .map(|mut k| {
            let mut e = [0.0; 4];
            for slot in &mut e {
                *slot = (k % 3) as f64 - 1.0;
                k /= 3;
            }
            DMatrix::from_row_slice(2, 2, &[c(e[0]), c(e[1]), c(e[2]), c(e[3])])
        })
        .collect()
}
