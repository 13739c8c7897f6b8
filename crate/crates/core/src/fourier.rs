//! Fourier multipliers on group von Neumann algebras.
//!
//! Finite groups are handled exactly through left-regular matrices.
//! Quadrature models represent `x = Delta^a lambda(f) Delta^b` by the
//! function `f` and the exponents, and are only ever realized through
//! compressed kernels on windows.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group_model::{Chart, FiniteGroup, GroupPoint, Law, QuadratureGroup, Window};
use crate::ncalgebra::{abs_power, schatten_norm, KernelOperator, SchattenExponent};
use crate::scalar::Real;
use crate::symbol::Symbol;

/// `lambda(f) = sum_s f(s) lambda_s` on a finite group.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteAlgebraElement<R: Real> {
    group: Arc<FiniteGroup>,
    coeffs: Vec<Complex<R>>,
}

/// Builds `lambda(f)` from coefficients indexed by group elements.
pub fn lambda_of<R: Real>(group: &Arc<FiniteGroup>, coeffs: Vec<Complex<R>>) -> Result<FiniteAlgebraElement<R>> {
    if coeffs.len() != group.order() {
        return Err(Error::LengthMismatch { expected: group.order(), got: coeffs.len() });
    }
    Ok(FiniteAlgebraElement { group: group.clone(), coeffs })
}

impl<R: Real> FiniteAlgebraElement<R> {
    /// The translation `lambda_s`.
    pub fn generator(group: &Arc<FiniteGroup>, s: usize) -> Self {
        let mut coeffs = vec![Complex::zero(); group.order()];
        coeffs[s] = Complex::one();
        Self { group: group.clone(), coeffs }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[Complex<R>] {
        &self.coeffs
    }

    /// Matrix with entries `lambda(f)[u, t] = f(u t^{-1})`.
    pub fn matrix(&self) -> DMatrix<Complex<R>> {
        let g = &self.group;
        DMatrix::from_fn(g.order(), g.order(), |u, t| self.coeffs[g.mul(u, g.inv(t))])
    }

    /// Kernel operator on the group with counting measure.
    pub fn as_operator(&self) -> KernelOperator<R> {
        KernelOperator::from_matrix(self.matrix())
    }

    /// Norm in `L_p` of the group algebra with the Plancherel trace
    /// `tau(lambda(f)) = f(e)`.
    pub fn lp_norm(&self, p: SchattenExponent) -> Result<R> {
        let sp = schatten_norm(&self.as_operator(), p)?;
        let n = R::lit(self.group.order() as f64);
        Ok(sp * n.powf(-R::lit(p.recip_f64())))
    }

    /// `tau(x) = f(e)`.
    pub fn trace(&self) -> Complex<R> {
        self.coeffs[self.group.identity()]
    }

    /// Convolution product `lambda(f) lambda(g) = lambda(f * g)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let g = &self.group;
        let mut coeffs = vec![Complex::zero(); g.order()];
        for s in 0..g.order() {
            if self.coeffs[s].is_zero() {
                continue;
            }
            for t in 0..g.order() {
                coeffs[g.mul(s, t)] += self.coeffs[s] * other.coeffs[t];
            }
        }
        Ok(Self { group: g.clone(), coeffs })
    }

    /// `lambda(f)^* = lambda(s -> conj f(s^{-1}))`.
    pub fn adjoint(&self) -> Self {
        let g = &self.group;
        Self { group: g.clone(), coeffs: (0..g.order()).map(|s| self.coeffs[g.inv(s)].conj()).collect() }
    }

    pub fn scale(&self, z: Complex<R>) -> Self {
        Self { group: self.group.clone(), coeffs: self.coeffs.iter().map(|&c| c * z).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        Ok(Self { group: self.group.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a - b).collect() })
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> R {
        self.coeffs.iter().fold(R::zero(), |m, z| m.max(nalgebra::ComplexField::modulus(*z)))
    }

    /// Plancherel pairing `tau(xy)`.
    pub fn pairing(&self, other: &Self) -> Result<Complex<R>> {
        self.same_group(other)?;
        let g = &self.group;
        Ok((0..g.order()).map(|s| self.coeffs[s] * other.coeffs[g.inv(s)]).fold(Complex::<R>::zero(), |a, b| a + b))
    }

    /// Recovers `lambda(f)` from a matrix through the trace-preserving
    /// conditional expectation onto the group algebra.
    pub fn from_matrix(group: &Arc<FiniteGroup>, m: &DMatrix<Complex<R>>) -> Result<Self> {
        let n = group.order();
        if m.shape() != (n, n) {
            return Err(Error::ShapeMismatch(format!("expected {n}x{n} matrix")));
        }
        let scale = R::lit(1.0 / n as f64).cx();
        let coeffs = (0..n)
            .map(|s| (0..n).map(|t| m[(group.mul(s, t), t)]).fold(Complex::<R>::zero(), |a, b| a + b) * scale)
            .collect();
        Ok(Self { group: group.clone(), coeffs })
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) || *self.group == *other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }
}

/// Tabulates an `n`-variable symbol on `G^n`, row-major.
pub fn tabulate_finite<R: Real>(phi: &Symbol<usize, R>, group: &FiniteGroup) -> Vec<Complex<R>> {
    let n = phi.arity();
    let m = group.order();
    let total = m.pow(n as u32);
    (0..total)
        .map(|mut flat| {
            let mut s = vec![0; n];
            for j in (0..n).rev() {
                s[j] = flat % m;
                flat /= m;
            }
            phi.eval(&s)
        })
        .collect()
}

fn for_each_tuple(n: usize, m: usize, mut f: impl FnMut(usize, &[usize])) {
    let mut s = vec![0usize; n];
    let total = m.pow(n as u32);
    for flat in 0..total {
        let mut rest = flat;
        for j in (0..n).rev() {
            s[j] = rest % m;
            rest /= m;
        }
        f(flat, &s);
    }
}

/// `T_phi(lambda(f_1), .., lambda(f_n)) = lambda(h)` with
/// `h(u) = sum_{s_1..s_n = u} phi(s) prod f_i(s_i)`.
pub fn fourier_apply_finite<R: Real>(phi: &Symbol<usize, R>, xs: &[&FiniteAlgebraElement<R>]) -> Result<FiniteAlgebraElement<R>> {
    if xs.len() != phi.arity() || xs.is_empty() {
        return Err(Error::ArityMismatch { expected: phi.arity(), got: xs.len() });
    }
    let g = xs[0].group.clone();
    if xs.iter().any(|x| x.group != g) {
        return Err(Error::GroupMismatch);
    }
    let n = xs.len();
    let mut coeffs = vec![Complex::zero(); g.order()];
    for_each_tuple(n, g.order(), |_, s| {
        let mut c = Complex::<R>::one();
        for (x, &si) in xs.iter().zip(s) {
            c *= x.coeffs[si];
            if c.is_zero() {
                return;
            }
        }
        coeffs[g.product(s)] += c * phi.eval(s);
    });
    Ok(FiniteAlgebraElement { group: g, coeffs })
}

/// `|F|^{-1/p} P_F x P_F` on a finite group.
pub fn compress_finite<R: Real>(x: &FiniteAlgebraElement<R>, window: &[usize], p: SchattenExponent) -> Result<KernelOperator<R>> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let m = x.matrix();
    let scale = R::lit((window.len() as f64).powf(-p.recip_f64()));
    let k = DMatrix::from_fn(window.len(), window.len(), |i, j| m[(window[i], window[j])] * scale.cx());
    Ok(KernelOperator::from_matrix(k))
}

/// `h_V^{2/p}` on a finite group, where `h_V = |k_V|` and
/// `k_V = |V|^{-1/2} lambda(1_V)` for a symmetric set `V`.
pub fn h_v_finite<R: Real>(group: &Arc<FiniteGroup>, v: &[usize], p: SchattenExponent) -> Result<FiniteAlgebraElement<R>> {
    let mut inside = vec![false; group.order()];
    for &s in v {
        inside[s] = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    if size == 0 {
        return Err(Error::EmptyWindow);
    }
    if (0..group.order()).any(|s| inside[s] != inside[group.inv(s)]) {
        return Err(Error::AsymmetricWindow);
    }
    let c = R::lit((size as f64).powf(-0.5));
    let coeffs = inside.iter().map(|&b| if b { c.cx() } else { Complex::zero() }).collect();
    let k = lambda_of(group, coeffs)?;
    let h = abs_power(&k.as_operator(), R::lit(2.0 * p.recip_f64()))?;
    FiniteAlgebraElement::from_matrix(group, h.kernel())
}

/// Element of `M_K (x) L(G)` written as `sum_s alpha_s (x) lambda_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplifiedElement<R: Real> {
    group: Arc<FiniteGroup>,
    level: usize,
    blocks: Vec<DMatrix<Complex<R>>>,
}

impl<R: Real> AmplifiedElement<R> {
    pub fn new(group: &Arc<FiniteGroup>, blocks: Vec<DMatrix<Complex<R>>>) -> Result<Self> {
        if blocks.len() != group.order() {
            return Err(Error::LengthMismatch { expected: group.order(), got: blocks.len() });
        }
        let level = blocks[0].nrows();
        if blocks.iter().any(|b| b.shape() != (level, level)) {
            return Err(Error::ShapeMismatch("coefficient blocks must be square of equal size".into()));
        }
        Ok(Self { group: group.clone(), level, blocks })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn blocks(&self) -> &[DMatrix<Complex<R>>] {
        &self.blocks
    }

    /// Operator on `C^K (x) l2(G)` with index `a * |G| + u`.
    pub fn to_operator(&self) -> KernelOperator<R> {
        let g = &self.group;
        let n = g.order();
        let k = self.level;
        let mat = DMatrix::from_fn(k * n, k * n, |i, j| {
            let (a, u) = (i / n, i % n);
            let (b, t) = (j / n, j % n);
            self.blocks[g.mul(u, g.inv(t))][(a, b)]
        });
        KernelOperator::from_matrix(mat)
    }

    /// Conditional expectation of an operator on `C^K (x) l2(G)`.
    pub fn from_operator(group: &Arc<FiniteGroup>, level: usize, op: &KernelOperator<R>) -> Result<Self> {
        let n = group.order();
        if op.nrows() != level * n || op.ncols() != level * n {
            return Err(Error::ShapeMismatch(format!("expected {0}x{0} operator", level * n)));
        }
        let mat = op.materialize();
        let scale = R::lit(1.0 / n as f64).cx();
        let blocks = (0..n)
            .map(|s| {
                DMatrix::from_fn(level, level, |a, b| {
                    (0..n).map(|t| mat[(a * n + group.mul(s, t), b * n + t)]).fold(Complex::<R>::zero(), |x, y| x + y) * scale
                })
            })
            .collect();
        Ok(Self { group: group.clone(), level, blocks })
    }
}

/// `T_phi^{(K)}` on `M_K (x) L(G)`: coefficient
/// `h(u) = sum_{s_1..s_n = u} phi(s) alpha_1(s_1) .. alpha_n(s_n)`.
pub fn fourier_apply_amplified<R: Real>(
    table: &[Complex<R>],
    group: &Arc<FiniteGroup>,
    xs: &[&AmplifiedElement<R>],
) -> Result<AmplifiedElement<R>> {
    let n = xs.len();
    let m = group.order();
    if n == 0 || table.len() != m.pow(n as u32) {
        return Err(Error::ArityMismatch { expected: n, got: xs.len() });
    }
    let k = xs[0].level;
    let mut blocks = vec![DMatrix::zeros(k, k); m];
    for_each_tuple(n, m, |flat, s| {
        let c = table[flat];
        if c.is_zero() {
            return;
        }
        let mut prod = xs[0].blocks[s[0]].clone();
        for j in 1..n {
            prod = prod * &xs[j].blocks[s[j]];
        }
        blocks[group.product(s)] += prod * c;
    });
    Ok(AmplifiedElement { group: group.clone(), level: k, blocks })
}

/// Element `Z` with `<T(X_1..W..X_n), Y> = <W, Z>` for the trace pairing
/// on `C^K (x) l2(G)`, where `W` sits in the zero-based `slot`.
pub fn fourier_slot_adjoint<R: Real>(
    table: &[Complex<R>],
    group: &Arc<FiniteGroup>,
    xs: &[&AmplifiedElement<R>],
    slot: usize,
    y: &AmplifiedElement<R>,
) -> Result<AmplifiedElement<R>> {
    let n = xs.len();
    let m = group.order();
    if slot >= n || table.len() != m.pow(n as u32) {
        return Err(Error::ArityMismatch { expected: n, got: slot });
    }
    let k = y.level;
    let mut blocks = vec![DMatrix::<Complex<R>>::zeros(k, k); m];
    for_each_tuple(n, m, |flat, s| {
        let c = table[flat];
        if c.is_zero() {
            return;
        }
        let v = group.inv(group.product(s));
        let mut prod = DMatrix::<Complex<R>>::identity(k, k);
        for j in slot + 1..n {
            prod = prod * &xs[j].blocks[s[j]];
        }
        prod = prod * &y.blocks[v];
        for j in 0..slot {
            prod = prod * &xs[j].blocks[s[j]];
        }
        blocks[group.inv(s[slot])] += prod * c;
    });
    Ok(AmplifiedElement { group: group.clone(), level: k, blocks })
}

pub type PointFn = Arc<dyn Fn(GroupPoint) -> Complex<f64> + Send + Sync>;

/// `x = Delta^a lambda(f) Delta^b` in `L_p` of the group algebra of a
/// quadrature model, with `a + b = 1/p`.
#[derive(Clone)]
pub struct QuadratureAlgebraElement {
    pub group: Arc<QuadratureGroup>,
    pub f: PointFn,
    pub a: f64,
    pub b: f64,
    pub p: SchattenExponent,
    /// Box containing the support of `f`, when known.
    pub support: Option<Window>,
}

impl std::fmt::Debug for QuadratureAlgebraElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadratureAlgebraElement")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("p", &self.p)
            .field("support", &self.support)
            .finish()
    }
}

impl QuadratureAlgebraElement {
    pub fn new(
        group: Arc<QuadratureGroup>,
        f: PointFn,
        a: f64,
        b: f64,
        p: SchattenExponent,
        support: Option<Window>,
    ) -> Result<Self> {
        if (a + b - p.recip_f64()).abs() > 1e-12 {
            return Err(Error::BadExponent(format!("a + b = {} but 1/p = {}", a + b, p.recip_f64())));
        }
        Ok(Self { group, f, a, b, p, support })
    }

    /// Same operator presented with interpolation parameter `theta`:
    /// `Delta^a lambda(f) Delta^b = Delta^{a'} lambda(Delta^{b'-b} f) Delta^{b'}`.
    pub fn represent(&self, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::BadTheta(theta));
        }
        let r = self.p.recip_f64();
        let (a2, b2) = ((1.0 - theta) * r, theta * r);
        let shift = b2 - self.b;
        let (f, law) = (self.f.clone(), self.group.law());
        let g: PointFn = if shift == 0.0 { f } else { Arc::new(move |s| f(s) * law.modular(s).powf(shift)) };
        Self::new(self.group.clone(), g, a2, b2, self.p, self.support)
    }

    /// `Delta^z f`.
    pub fn modular_weighted(f: PointFn, law: Law, z: f64) -> PointFn {
        Arc::new(move |s| f(s) * law.modular(s).powf(z))
    }
}

/// `kappa_p^theta(lambda(f)) = Delta^{(1-theta)/p} lambda(f) Delta^{theta/p}`.
pub fn kappa_embed(
    group: Arc<QuadratureGroup>,
    f: PointFn,
    theta: f64,
    p: SchattenExponent,
    support: Option<Window>,
) -> Result<QuadratureAlgebraElement> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::BadTheta(theta));
    }
    let r = p.recip_f64();
    QuadratureAlgebraElement::new(group, f, (1.0 - theta) * r, theta * r, p, support)
}

fn support_corners(w: &Window, law: Law) -> Vec<GroupPoint> {
    let mut out = Vec::new();
    let dims = if w.chart == Chart::Line { 1 } else { 2 };
    for i in 0..3 {
        for j in 0..if dims == 2 { 3 } else { 1 } {
            let c0 = w.lo[0] + (w.hi[0] - w.lo[0]) * i as f64 / 2.0;
            let c1 = w.lo[1] + (w.hi[1] - w.lo[1]) * j as f64 / 2.0;
            out.push(law.from_chart(w.chart, [c0, c1]));
        }
    }
    out
}

fn check_coverage(group: &QuadratureGroup, window: &Window, xs: &[&QuadratureAlgebraElement]) -> Result<()> {
    let law = group.law();
    let mut frontier = support_corners(window, law);
    for (i, x) in xs.iter().enumerate().take(xs.len().saturating_sub(1)) {
        let Some(sup) = &x.support else { return Ok(()) };
        let ks = support_corners(sup, law);
        let mut next = Vec::with_capacity(frontier.len() * ks.len());
        for &t in &frontier {
            for &k in &ks {
                let s = law.mul(law.inv(k), t);
                if !group.covers(s) {
                    return Err(Error::SupportEscape(format!(
                        "integration variable t_{} reaches {:?} outside the grid",
                        i + 1,
                        s.0
                    )));
                }
                next.push(s);
            }
        }
        frontier = next;
    }
    Ok(())
}

/// Kernel of `P_F T_phi(x_1..x_n) P_F` on the grid points of `window`:
/// `(t_0, t_n) -> int phi(t_0 t_1^{-1}, ..) prod f_i(t_{i-1} t_i^{-1})
/// Delta^{a_1}(t_0) Delta^{b_1 + a_2 - 1}(t_1) .. Delta^{b_n - 1}(t_n)`
/// with the inner points integrated over the whole grid.
pub fn compressed_fourier_kernel(
    phi: &Symbol<GroupPoint, f64>,
    xs: &[&QuadratureAlgebraElement],
    window: &Window,
) -> Result<KernelOperator<f64>> {
    let n = xs.len();
    if n == 0 || phi.arity() != n {
        return Err(Error::ArityMismatch { expected: phi.arity(), got: n });
    }
    let group = xs[0].group.clone();
    if xs.iter().any(|x| !Arc::ptr_eq(&x.group, &group)) {
        return Err(Error::GroupMismatch);
    }
    let total: f64 = xs.iter().map(|x| x.p.recip_f64()).sum();
    if total > 1.0 + 1e-12 {
        return Err(Error::HolderViolation(format!("sum of 1/p_i = {total} exceeds 1")));
    }
    let f_idx = group.window_indices(window);
    if f_idx.is_empty() {
        return Err(Error::EmptyWindow);
    }
    check_coverage(&group, window, xs)?;
    let law = group.law();
    let pts = group.points();
    let wts = group.weights();
    let all: Vec<usize> = (0..pts.len()).collect();
    let mut f_pos = vec![usize::MAX; pts.len()];
    for (k, &i) in f_idx.iter().enumerate() {
        f_pos[i] = k;
    }
    let delta: Vec<f64> = pts.iter().map(|&s| law.modular(s)).collect();
    let mut exps = vec![0.0; n + 1];
    exps[0] = xs[0].a;
    for i in 1..n {
        exps[i] = xs[i - 1].b + xs[i].a - 1.0;
    }
    exps[n] = xs[n - 1].b - 1.0;

    // Transition lists: level i maps t_{i-1} to (t_i, f_i(t_{i-1} t_i^{-1})).
    let mut steps: Vec<Vec<Vec<(usize, Complex<f64>)>>> = Vec::with_capacity(n);
    for i in 0..n {
        let targets: &[usize] = if i + 1 == n { &f_idx } else { &all };
        let f = xs[i].f.clone();
        let list: Vec<Vec<(usize, Complex<f64>)>> = (0..pts.len())
            .into_par_iter()
            .map(|src| {
                if i == 0 && f_pos[src] == usize::MAX {
                    return Vec::new();
                }
                let s = pts[src];
                targets
                    .iter()
                    .filter_map(|&t| {
                        let v = f(law.mul(s, law.inv(pts[t])));
                        (v != Complex::zero()).then_some((t, v))
                    })
                    .collect()
            })
            .collect();
        steps.push(list);
    }

    let m = f_idx.len();
    let rows: Vec<Vec<Complex<f64>>> = f_idx
        .par_iter()
        .map(|&t0| {
            let mut row = vec![Complex::zero(); m];
            let mut chain = vec![t0; n + 1];
            let mut diffs = vec![GroupPoint([0.0, 0.0]); n];
            let start = Complex::new(delta[t0].powf(exps[0]), 0.0);
            walk(1, start, &mut chain, &mut diffs, &steps, phi, pts, wts, &delta, &exps, law, &f_pos, &mut row);
            row
        })
        .collect();
    let kernel = DMatrix::from_fn(m, m, |i, j| rows[i][j]);
    let w: Vec<f64> = f_idx.iter().map(|&i| wts[i]).collect();
    KernelOperator::new(kernel, w.clone(), w)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    level: usize,
    acc: Complex<f64>,
    chain: &mut [usize],
    diffs: &mut [GroupPoint],
    steps: &[Vec<Vec<(usize, Complex<f64>)>>],
    phi: &Symbol<GroupPoint, f64>,
    pts: &[GroupPoint],
    wts: &[f64],
    delta: &[f64],
    exps: &[f64],
    law: Law,
    f_pos: &[usize],
    row: &mut [Complex<f64>],
) {
    let n = steps.len();
    let prev = chain[level - 1];
    for &(t, v) in &steps[level - 1][prev] {
        chain[level] = t;
        diffs[level - 1] = law.mul(pts[prev], law.inv(pts[t]));
        let val = acc * v * delta[t].powf(exps[level]);
        if level == n {
            row[f_pos[t]] += val * phi.eval(diffs);
        } else {
            walk(level + 1, val * wts[t], chain, diffs, steps, phi, pts, wts, delta, exps, law, f_pos, row);
        }
    }
}

/// `i_p(x) = mu(F)^{-1/p} P_F x P_F` for a quadrature element.
pub fn compress(x: &QuadratureAlgebraElement, window: &Window) -> Result<KernelOperator<f64>> {
    let k = compressed_fourier_kernel(&Symbol::constant(1, Complex::one()), &[x], window)?;
    compress_operator(&k, x.p)
}

/// Scales a compressed kernel on `F` by `mu(F)^{-1/p}`, with `mu(F)` the
/// total row weight.
pub fn compress_operator<R: Real>(k: &KernelOperator<R>, p: SchattenExponent) -> Result<KernelOperator<R>> {
    let mu = k.row_weights().iter().fold(R::zero(), |a, &b| a + b);
    if !(mu > R::zero()) {
        return Err(Error::EmptyWindow);
    }
    Ok(k.scale(mu.powf(-R::lit(p.recip_f64())).cx()))
}

/// `|i_2(k_V)|^{2/p}` on the window `F` of a real segment model, where
/// `k_V = |V|^{-1/2} lambda(1_V)` and `V = [-v, v]`.
pub fn h_v_segment(group: &Arc<QuadratureGroup>, v: &Window, window: &Window, p: SchattenExponent) -> Result<KernelOperator<f64>> {
    if !group.law().is_unimodular() {
        return Err(Error::Config("h_v_segment needs a unimodular model".into()));
    }
    if !v.is_symmetric(group.law()) {
        return Err(Error::AsymmetricWindow);
    }
    let len = v.hi[0] - v.lo[0];
    if !(len > 0.0) {
        return Err(Error::EmptyWindow);
    }
    let (vv, law) = (*v, group.law());
    let c = len.powf(-0.5);
    let f: PointFn = Arc::new(move |s| if vv.contains(law, s) { Complex::new(c, 0.0) } else { Complex::zero() });
    let two = SchattenExponent::int(2)?;
    let k = QuadratureAlgebraElement::new(group.clone(), f, 0.5, 0.0, two, Some(*v))?;
    abs_power(&compress(&k, window)?, 2.0 * p.recip_f64())
}

/// Non-unimodular variant on the `ax+b` group:
/// `k_V = ||1_V Delta^{-1/4}||_2^{-1} lambda(1_V Delta^{-1/4}) Delta^{1/2}`
/// with `V = B cap B^{-1}` for the box `B`, compressed to `F` and raised to
/// `|.|^{2/p}`.
pub fn h_v_axb(group: &Arc<QuadratureGroup>, b: &Window, window: &Window, p: SchattenExponent) -> Result<KernelOperator<f64>> {
    let law = group.law();
    let bb = *b;
    let in_v = move |s: GroupPoint| bb.contains(law, s) && bb.contains(law, law.inv(s));
    let norm2 = group.haar_integral_real(|s| if in_v(s) { law.modular(s).powf(-0.5) } else { 0.0 });
    if !(norm2 > 0.0) {
        return Err(Error::EmptyWindow);
    }
    let c = norm2.powf(-0.5);
    let f: PointFn = Arc::new(move |s| if in_v(s) { Complex::new(c * law.modular(s).powf(-0.25), 0.0) } else { Complex::zero() });
    let two = SchattenExponent::int(2)?;
    let k = QuadratureAlgebraElement::new(group.clone(), f, 0.0, 0.5, two, Some(*b))?;
    abs_power(&compress(&k, window)?, 2.0 * p.recip_f64())
}
