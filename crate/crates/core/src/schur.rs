//! Multilinear Schur multipliers acting on kernel operators.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group_model::GroupLaw;
use crate::ncalgebra::{kernel_compose, weights_match, KernelOperator};
use crate::scalar::Real;
use crate::symbol::{Symbol, SymbolFn};

pub type PairFn<E, R> = Arc<dyn Fn(E, E) -> Complex<R> + Send + Sync>;

/// Function of `n + 1` points, optionally known to be a product
/// `prod_i f_i(t_{i-1}, t_i)` of nearest-neighbour factors.
#[derive(Clone)]
pub struct SchurSymbol<E, R: Real> {
    arity: usize,
    eval: SymbolFn<E, R>,
    chain: Option<Vec<PairFn<E, R>>>,
}

impl<E, R: Real> fmt::Debug for SchurSymbol<E, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchurSymbol").field("arity", &self.arity).field("chain", &self.chain.is_some()).finish()
    }
}

impl<E: Copy + Send + Sync + 'static, R: Real> SchurSymbol<E, R> {
    /// Symbol of `arity = n + 1` variables acting on `n` operators.
    pub fn new(arity: usize, eval: impl Fn(&[E]) -> Complex<R> + Send + Sync + 'static) -> Self {
        assert!(arity >= 2, "a Schur symbol needs at least two variables");
        Self { arity, eval: Arc::new(eval), chain: None }
    }

    /// Product of nearest-neighbour factors, evaluated as a chain of products.
    pub fn from_chain(factors: Vec<PairFn<E, R>>) -> Self {
        assert!(!factors.is_empty(), "chain needs a factor");
        let fs = factors.clone();
        Self {
            arity: factors.len() + 1,
            eval: Arc::new(move |t: &[E]| fs.iter().enumerate().fold(Complex::one(), |acc, (i, f)| acc * f(t[i], t[i + 1]))),
            chain: Some(factors),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of operator slots.
    pub fn n(&self) -> usize {
        self.arity - 1
    }

    pub fn eval(&self, t: &[E]) -> Complex<R> {
        (self.eval)(t)
    }

    pub fn chain(&self) -> Option<&[PairFn<E, R>]> {
        self.chain.as_deref()
    }

    /// `(t_0..t_{m+n}) -> self(t_0..t_m) other(t_m..t_{m+n})`.
    pub fn concat(&self, other: &Self) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let m = self.arity - 1;
        let chain = match (&self.chain, &other.chain) {
            (Some(f), Some(g)) => Some(f.iter().chain(g).cloned().collect()),
            _ => None,
        };
        Self { arity: m + other.arity, eval: Arc::new(move |t: &[E]| a(&t[..=m]) * b(&t[m..])), chain }
    }

    /// Drops the product-form hint, forcing the generic summation path.
    pub fn without_chain(&self) -> Self {
        Self { chain: None, ..self.clone() }
    }
}

/// `phi~(s_0..s_n) = phi(s_0 s_1^{-1}, ..., s_{n-1} s_n^{-1})`.
pub fn lift_symbol<G: GroupLaw + 'static, R: Real>(phi: &Symbol<G::Elem, R>, g: Arc<G>) -> SchurSymbol<G::Elem, R> {
    if let Some(factors) = phi.factors() {
        let chain = factors
            .iter()
            .map(|f| {
                let (f, g) = (f.clone(), g.clone());
                Arc::new(move |s: G::Elem, t: G::Elem| f(g.mul(s, g.inv(t)))) as PairFn<G::Elem, R>
            })
            .collect();
        return SchurSymbol::from_chain(chain);
    }
    let eval = phi.eval_fn();
    let n = phi.arity();
    SchurSymbol::new(n + 1, move |s: &[G::Elem]| {
        let diffs: Vec<G::Elem> = (0..n).map(|i| g.mul(s[i], g.inv(s[i + 1]))).collect();
        eval(&diffs)
    })
}

/// Tabulated symbol on `size^arity` index tuples, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSymbol<R: Real> {
    arity: usize,
    size: usize,
    data: Vec<Complex<R>>,
}

impl<R: Real> DenseSymbol<R> {
    pub fn new(arity: usize, size: usize, data: Vec<Complex<R>>) -> Result<Self> {
        let expected = size.checked_pow(arity as u32).ok_or(Error::DimensionCap { dim: usize::MAX, cap: usize::MAX })?;
        if data.len() != expected {
            return Err(Error::LengthMismatch { expected, got: data.len() });
        }
        Ok(Self { arity, size, data })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn data(&self) -> &[Complex<R>] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> Complex<R> {
        self.data[idx.iter().fold(0, |acc, &i| acc * self.size + i)]
    }

    pub fn sup_norm(&self) -> R {
        self.data.iter().fold(R::zero(), |m, z| m.max(nalgebra::ComplexField::modulus(*z)))
    }
}

/// Tabulates `phi` on all tuples drawn from `points`.
pub fn truncate_symbol<E: Copy + Send + Sync + 'static, R: Real>(phi: &SchurSymbol<E, R>, points: &[E]) -> DenseSymbol<R> {
    let m = points.len();
    let arity = phi.arity();
    let total = m.pow(arity as u32);
    let data = (0..total)
        .into_par_iter()
        .map(|mut flat| {
            let mut t = vec![points[0]; arity];
            for j in (0..arity).rev() {
                t[j] = points[flat % m];
                flat /= m;
            }
            phi.eval(&t)
        })
        .collect();
    DenseSymbol { arity, size: m, data }
}

fn check_chain<R: Real>(ops: &[&KernelOperator<R>], size: usize) -> Result<()> {
    for (i, a) in ops.iter().enumerate() {
        if a.nrows() != size || a.ncols() != size {
            return Err(Error::ShapeMismatch(format!("operator {i} is {}x{}, expected {size}x{size}", a.nrows(), a.ncols())));
        }
        if i + 1 < ops.len() && !weights_match(a.col_weights(), ops[i + 1].row_weights()) {
            return Err(Error::ShapeMismatch(format!("weights of operators {i} and {} disagree", i + 1)));
        }
    }
    Ok(())
}

/// Sum over chains `t_0 -> .. -> t_n` of `phi(t) prod_j A_j(t_{j-1}, t_j)`,
/// with inner points weighted and exact zeros of the factors skipped.
fn chain_sum<R: Real>(
    ops: &[&KernelOperator<R>],
    phi: &(dyn Fn(&[usize]) -> Complex<R> + Sync),
) -> KernelOperator<R> {
    let n = ops.len();
    let m = ops[0].nrows();
    let support: Vec<Vec<Vec<usize>>> = ops
        .iter()
        .map(|a| (0..m).map(|s| (0..m).filter(|&t| !a.kernel()[(s, t)].is_zero()).collect()).collect())
        .collect();
    let rows: Vec<Vec<Complex<R>>> = (0..m)
        .into_par_iter()
        .map(|t0| {
            let mut row = vec![Complex::zero(); m];
            let mut idx = vec![0usize; n + 1];
            idx[0] = t0;
            descend(ops, &support, phi, 1, Complex::one(), &mut idx, &mut row);
            row
        })
        .collect();
    let kernel = DMatrix::from_fn(m, m, |i, j| rows[i][j]);
    KernelOperator::new(kernel, ops[0].row_weights().to_vec(), ops[n - 1].col_weights().to_vec())
        .expect("shapes checked")
}

fn descend<R: Real>(
    ops: &[&KernelOperator<R>],
    support: &[Vec<Vec<usize>>],
    phi: &(dyn Fn(&[usize]) -> Complex<R> + Sync),
    level: usize,
    acc: Complex<R>,
    idx: &mut [usize],
    row: &mut [Complex<R>],
) {
    let n = ops.len();
    let a = ops[level - 1];
    let prev = idx[level - 1];
    for &t in &support[level - 1][prev] {
        idx[level] = t;
        let val = acc * a.kernel()[(prev, t)];
        if level == n {
            row[t] += val * phi(idx);
        } else {
            descend(ops, support, phi, level + 1, val * a.col_weights()[t].cx(), idx, row);
        }
    }
}

/// `M_phi(A_1..A_n)(t_0, t_n)`, summing the inner points against the
/// operator weights. All operators act on `L2(points)`.
pub fn schur_apply<E: Copy + Send + Sync + 'static, R: Real>(
    phi: &SchurSymbol<E, R>,
    points: &[E],
    ops: &[&KernelOperator<R>],
) -> Result<KernelOperator<R>> {
    if ops.len() != phi.n() {
        return Err(Error::ArityMismatch { expected: phi.n(), got: ops.len() });
    }
    check_chain(ops, points.len())?;
    if let Some(chain) = phi.chain() {
        let mut acc: Option<KernelOperator<R>> = None;
        for (f, a) in chain.iter().zip(ops) {
            let mut b = (*a).clone();
            let k = b.kernel_mut();
            for j in 0..points.len() {
                for i in 0..points.len() {
                    if !k[(i, j)].is_zero() {
                        k[(i, j)] *= f(points[i], points[j]);
                    }
                }
            }
            acc = Some(match acc {
                None => b,
                Some(c) => kernel_compose(&c, &b)?,
            });
        }
        return Ok(acc.expect("non-empty chain"));
    }
    let eval = |idx: &[usize]| {
        let t: Vec<E> = idx.iter().map(|&i| points[i]).collect();
        phi.eval(&t)
    };
    Ok(chain_sum(ops, &eval))
}

/// `M_phi` for a tabulated symbol on the index set of the operators.
pub fn schur_apply_dense<R: Real>(phi: &DenseSymbol<R>, ops: &[&KernelOperator<R>]) -> Result<KernelOperator<R>> {
    if ops.len() + 1 != phi.arity() {
        return Err(Error::ArityMismatch { expected: phi.arity() - 1, got: ops.len() });
    }
    check_chain(ops, phi.size())?;
    Ok(chain_sum(ops, &|idx: &[usize]| phi.get(idx)))
}

/// `M_phi` on `M_K (x) L2(F)` for a tabulated symbol on `F`, with block
/// index `a` and point index `s` combined as `a * |F| + s`.
pub fn schur_apply_amplified<R: Real>(phi: &DenseSymbol<R>, level: usize, ops: &[&KernelOperator<R>]) -> Result<KernelOperator<R>> {
    if ops.len() + 1 != phi.arity() {
        return Err(Error::ArityMismatch { expected: phi.arity() - 1, got: ops.len() });
    }
    let m = phi.size();
    check_chain(ops, m * level)?;
    let size = m;
    Ok(chain_sum(ops, &|idx: &[usize]| {
        let flat = idx.iter().fold(0, |acc, &i| acc * size + i % size);
        phi.data()[flat]
    }))
}

/// Slot adjoint of an amplified tabulated Schur multiplier: the operator
/// `Z` with `<M(A_1..Y_k..A_n), Y> = <Y_k, Z>` for every `Y_k`, where `slot`
/// is zero-based.
pub fn schur_slot_adjoint<R: Real>(
    phi: &DenseSymbol<R>,
    level: usize,
    ops: &[&KernelOperator<R>],
    slot: usize,
    y: &KernelOperator<R>,
) -> Result<KernelOperator<R>> {
    let n = ops.len();
    if n + 1 != phi.arity() || slot >= n {
        return Err(Error::ArityMismatch { expected: phi.arity() - 1, got: n });
    }
    let mut rotated: Vec<&KernelOperator<R>> = Vec::with_capacity(n);
    rotated.extend(ops[slot + 1..].iter().copied());
    rotated.push(y);
    rotated.extend(ops[..slot].iter().copied());
    let m = phi.size();
    check_chain(&rotated, m * level)?;
    let arity = n + 1;
    Ok(chain_sum(&rotated, &|u: &[usize]| {
        let mut flat = 0;
        for j in 0..arity {
            flat = flat * m + u[(j + arity - slot - 1) % arity] % m;
        }
        phi.data()[flat]
    }))
}
