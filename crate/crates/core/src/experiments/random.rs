//! Seeding and random inputs shared by the experiments.

use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::config::SymbolSpec;
use crate::error::{Error, Result};
use crate::fourier::{lambda_of, FiniteAlgebraElement};
use crate::group_model::FiniteGroup;
use crate::symbol::Symbol;

/// Seed for the stream named `tag` with index `index` under `base`.
pub fn derive_seed(base: u64, tag: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    h.update((tag.len() as u64).to_le_bytes());
    h.update(tag.as_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub(crate) fn rng_for(base: u64, tag: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, tag, index))
}

/// Uniform point of the closed unit disk.
pub(crate) fn disk(rng: &mut impl Rng) -> Complex<f64> {
    let r = rng.random::<f64>().sqrt();
    let a = rng.random::<f64>() * std::f64::consts::TAU;
    Complex::from_polar(r, a)
}

/// Uniform point of the square `[-1, 1]^2`.
pub(crate) fn square(rng: &mut impl Rng) -> Complex<f64> {
    Complex::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

pub(crate) fn random_element(group: &Arc<FiniteGroup>, rng: &mut impl Rng) -> FiniteAlgebraElement<f64> {
    let coeffs = (0..group.order()).map(|_| square(rng)).collect();
    lambda_of(group, coeffs).expect("length matches order")
}

fn unflatten(mut flat: usize, m: usize, n: usize) -> Vec<usize> {
    let mut s = vec![0; n];
    for j in (0..n).rev() {
        s[j] = flat % m;
        flat /= m;
    }
    s
}

fn flatten(s: &[usize], m: usize) -> usize {
    s.iter().fold(0, |acc, &x| acc * m + x)
}

/// Symbol values on `G^n`, row-major.
pub(crate) fn symbol_table(spec: &SymbolSpec, group: &FiniteGroup, n: usize, rng: &mut impl Rng) -> Result<Vec<Complex<f64>>> {
    let m = group.order();
    let total = m.pow(n as u32);
    Ok(match spec {
        SymbolSpec::Random => (0..total).map(|_| disk(rng)).collect(),
        SymbolSpec::Product => {
            let factors: Vec<Vec<Complex<f64>>> = (0..n).map(|_| (0..m).map(|_| disk(rng)).collect()).collect();
            (0..total)
                .map(|flat| unflatten(flat, m, n).iter().zip(&factors).map(|(&s, f)| f[s]).product())
                .collect()
        }
        SymbolSpec::PositiveDefinite => {
            let g: Vec<Complex<f64>> = (0..total).map(|_| square(rng)).collect();
            let value = |s: &[usize]| -> Complex<f64> {
                (0..total)
                    .map(|flat| {
                        let t = unflatten(flat, m, n);
                        let st: Vec<usize> = s.iter().zip(&t).map(|(&a, &b)| group.mul(a, b)).collect();
                        g[flatten(&st, m)] * g[flat].conj()
                    })
                    .sum()
            };
            let e = vec![group.identity(); n];
            let norm = value(&e).re;
            (0..total).map(|flat| value(&unflatten(flat, m, n)) / norm).collect()
        }
        SymbolSpec::Table(values) => {
            if values.len() != total {
                return Err(Error::LengthMismatch { expected: total, got: values.len() });
            }
            values.iter().map(|&[re, im]| Complex::new(re, im)).collect()
        }
    })
}

/// Symbol reading a row-major table on `G^n`.
pub(crate) fn table_symbol(m: usize, n: usize, table: Arc<Vec<Complex<f64>>>) -> Symbol<usize, f64> {
    Symbol::new(n, move |s: &[usize]| table[flatten(s, m)])
}

/// Restriction of a table on `G^n` to `H^n` through an embedding.
pub(crate) fn restrict_table(table: &[Complex<f64>], m: usize, n: usize, embedding: &[usize]) -> Vec<Complex<f64>> {
    let k = embedding.len();
    (0..k.pow(n as u32))
        .map(|flat| {
            let h = unflatten(flat, k, n);
            let s: Vec<usize> = h.iter().map(|&i| embedding[i]).collect();
            table[flatten(&s, m)]
        })
        .collect()
}

pub(crate) fn random_tuple(m: usize, n: usize, rng: &mut impl Rng) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..m)).collect()
}
