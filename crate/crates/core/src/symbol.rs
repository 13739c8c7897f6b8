//! Multivariable symbols on groups.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::One;

use crate::scalar::Real;

pub type SymbolFn<E, R> = Arc<dyn Fn(&[E]) -> Complex<R> + Send + Sync>;
pub type UnaryFn<E, R> = Arc<dyn Fn(E) -> Complex<R> + Send + Sync>;

/// Bounded function of `arity` group variables.
#[derive(Clone)]
pub struct Symbol<E, R: Real> {
    arity: usize,
    eval: SymbolFn<E, R>,
    factors: Option<Vec<UnaryFn<E, R>>>,
}

impl<E, R: Real> fmt::Debug for Symbol<E, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol").field("arity", &self.arity).field("product_form", &self.factors.is_some()).finish()
    }
}

impl<E: Copy + Send + Sync + 'static, R: Real> Symbol<E, R> {
    pub fn new(arity: usize, eval: impl Fn(&[E]) -> Complex<R> + Send + Sync + 'static) -> Self {
        Self { arity, eval: Arc::new(eval), factors: None }
    }

    /// `phi(s_1..s_n) = prod_i f_i(s_i)`, remembered as a product.
    pub fn product_of(factors: Vec<UnaryFn<E, R>>) -> Self {
        let fs = factors.clone();
        Self {
            arity: factors.len(),
            eval: Arc::new(move |s: &[E]| fs.iter().zip(s).fold(Complex::one(), |acc, (f, &x)| acc * f(x))),
            factors: Some(factors),
        }
    }

    pub fn constant(arity: usize, c: Complex<R>) -> Self {
        Self::new(arity, move |_| c)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, s: &[E]) -> Complex<R> {
        (self.eval)(s)
    }

    pub fn factors(&self) -> Option<&[UnaryFn<E, R>]> {
        self.factors.as_deref()
    }

    pub fn eval_fn(&self) -> SymbolFn<E, R> {
        self.eval.clone()
    }

    /// `(s_1..s_{m+n}) -> self(s_1..s_m) other(s_{m+1}..s_{m+n})`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let m = self.arity;
        let factors = match (&self.factors, &other.factors) {
            (Some(f), Some(g)) => Some(f.iter().chain(g).cloned().collect()),
            _ => None,
        };
        Self { arity: m + other.arity, eval: Arc::new(move |s: &[E]| a(&s[..m]) * b(&s[m..])), factors }
    }

    /// Pointwise product of two symbols of equal arity.
    pub fn pointwise(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "pointwise product needs equal arity");
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Self::new(self.arity, move |s: &[E]| a(s) * b(s))
    }
}
