//! Norm estimation for multilinear maps between Schatten classes.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_rational::Ratio;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{fourier_apply_amplified, fourier_slot_adjoint, AmplifiedElement};
use crate::group_model::FiniteGroup;
use crate::ncalgebra::{block, dual_pairing, from_blocks, norming_element, schatten_norm, KernelOperator, SchattenExponent};
use crate::scalar::Real;
use crate::schur::{schur_apply_amplified, schur_slot_adjoint, DenseSymbol};

/// Exponents `(p_1, .., p_n; p)` with `sum 1/p_i = 1/p`, checked exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct HolderTuple {
    inputs: Vec<SchattenExponent>,
    output: SchattenExponent,
}

impl HolderTuple {
    pub fn new(inputs: Vec<SchattenExponent>, output: SchattenExponent) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::HolderViolation("no input exponents".into()));
        }
        let sum = inputs.iter().fold(Ratio::zero(), |acc, p| acc + p.recip());
        if sum != output.recip() {
            return Err(Error::HolderViolation(format!("sum of 1/p_i = {sum}, but 1/p = {}", output.recip())));
        }
        Ok(Self { inputs, output })
    }

    /// Tuple for `n` inputs all at exponent `n p`, output `p`.
    pub fn uniform(n: usize, p: SchattenExponent) -> Result<Self> {
        let r = p.recip() / Ratio::from_integer(n as i64);
        Self::new(vec![SchattenExponent::from_recip(r)?; n], p)
    }

    pub fn inputs(&self) -> &[SchattenExponent] {
        &self.inputs
    }

    pub fn output(&self) -> SchattenExponent {
        self.output
    }

    pub fn n(&self) -> usize {
        self.inputs.len()
    }
}

impl fmt::Display for HolderTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.inputs.iter().map(|p| p.to_string()).collect();
        write!(f, "({};{})", ins.join(","), self.output)
    }
}

impl FromStr for HolderTuple {
    type Err = Error;

    /// Parses `(p_1,..,p_n;p)`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (ins, out) = body
            .split_once(';')
            .ok_or_else(|| Error::HolderViolation(format!("expected `(p_1,..,p_n;p)`, got `{s}`")))?;
        let inputs = ins.split(',').map(str::parse).collect::<Result<Vec<_>>>()?;
        Self::new(inputs, out.parse()?)
    }
}

impl TryFrom<String> for HolderTuple {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<HolderTuple> for String {
    fn from(h: HolderTuple) -> String {
        h.to_string()
    }
}

/// Multilinear map between spaces of kernel operators.
pub trait MultilinearMap<R: Real>: Send + Sync {
    fn arity(&self) -> usize;

    /// Row and column weights of the operators accepted in `slot`.
    fn input_space(&self, slot: usize) -> (Vec<R>, Vec<R>);

    fn apply(&self, xs: &[&KernelOperator<R>]) -> Result<KernelOperator<R>>;

    /// Projection onto the domain of `slot` when it is a proper subspace.
    fn project(&self, _slot: usize, x: &KernelOperator<R>) -> Result<KernelOperator<R>> {
        Ok(x.clone())
    }

    /// Closed-form slot adjoint `Z` with `<T(.., W, ..), y> = <W, Z>`.
    fn slot_adjoint(&self, _slot: usize, _xs: &[&KernelOperator<R>], _y: &KernelOperator<R>) -> Option<Result<KernelOperator<R>>> {
        None
    }

    /// Native amplification `T^{(N)}`, when cheaper than the block form.
    fn amplified(&self, _level: usize) -> Option<Box<dyn MultilinearMap<R>>> {
        None
    }
}

/// Slot adjoint materialized by evaluating the map on matrix units.
pub struct AdjointMap<R: Real> {
    matrix: DMatrix<Complex<R>>,
    in_rows: Vec<R>,
    in_cols: Vec<R>,
    out_shape: (usize, usize),
}

impl<R: Real> AdjointMap<R> {
    /// `Z` with `<T(.., W, ..), y> = <W, Z>` for all `W` in the slot.
    pub fn apply(&self, y: &KernelOperator<R>) -> Result<KernelOperator<R>> {
        let (mo, no) = self.out_shape;
        if y.nrows() != no || y.ncols() != mo {
            return Err(Error::ShapeMismatch("adjoint applied to wrongly shaped operator".into()));
        }
        let yh = y.materialize();
        let v = DVector::from_fn(mo * no, |idx, _| yh[(idx % no, idx / no)]);
        let z = &self.matrix * v;
        let (m, n) = (self.in_rows.len(), self.in_cols.len());
        let zh = DMatrix::from_fn(n, m, |k, j| z[j * n + k]);
        KernelOperator::from_materialized(zh, self.in_cols.clone(), self.in_rows.clone())
    }
}

/// Builds the slot adjoint of `map` at the given inputs by evaluation on a
/// basis of the slot space.
pub fn adjoint_slot_map<R: Real, T: MultilinearMap<R> + ?Sized>(
    map: &T,
    slot: usize,
    xs: &[&KernelOperator<R>],
    cap: usize,
) -> Result<AdjointMap<R>> {
    if slot >= map.arity() || xs.len() != map.arity() {
        return Err(Error::ArityMismatch { expected: map.arity(), got: xs.len() });
    }
    let (rows, cols) = map.input_space(slot);
    let (m, n) = (rows.len(), cols.len());
    if m * n > cap {
        return Err(Error::DimensionCap { dim: m * n, cap });
    }
    let images: Vec<DMatrix<Complex<R>>> = (0..m * n)
        .into_par_iter()
        .map(|idx| {
            let (j, k) = (idx % m, idx / m);
            let mut unit = DMatrix::zeros(m, n);
            unit[(j, k)] = R::one().cx();
            let e = KernelOperator::from_materialized(unit, rows.clone(), cols.clone())?;
            let mut args: Vec<&KernelOperator<R>> = xs.to_vec();
            args[slot] = &e;
            Ok(map.apply(&args)?.materialize())
        })
        .collect::<Result<_>>()?;
    let (mo, no) = images[0].shape();
    let mut matrix = DMatrix::zeros(m * n, mo * no);
    for (idx, img) in images.iter().enumerate() {
        let (j, k) = (idx % m, idx / m);
        for a in 0..mo {
            for b in 0..no {
                matrix[(j * n + k, a * no + b)] = img[(a, b)];
            }
        }
    }
    Ok(AdjointMap { matrix, in_rows: rows, in_cols: cols, out_shape: (mo, no) })
}

/// Options for the alternating ascent estimator.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    pub damping: f64,
    pub dimension_cap: usize,
    pub require_convergence: bool,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self { restarts: 16, max_iters: 200, tol: 1e-10, seed: 0, damping: 1.0, dimension_cap: 1024, require_convergence: false }
    }
}

/// Lower bound for a multilinear norm together with its maximizer.
#[derive(Clone, Debug)]
pub struct NormEstimate<R: Real> {
    pub value: R,
    pub certificate: Vec<KernelOperator<R>>,
    pub iterations: usize,
    pub restarts: usize,
    pub best_restart: usize,
    pub converged: bool,
}

/// `||T(x)||_p / prod ||x_i||_{p_i}`.
pub fn evaluate_ratio<R: Real, T: MultilinearMap<R> + ?Sized>(map: &T, ht: &HolderTuple, xs: &[KernelOperator<R>]) -> Result<R> {
    let refs: Vec<&KernelOperator<R>> = xs.iter().collect();
    let num = schatten_norm(&map.apply(&refs)?, ht.output())?;
    let mut den = R::one();
    for (x, &p) in xs.iter().zip(ht.inputs()) {
        den *= schatten_norm(x, p)?;
    }
    if den <= R::zero() {
        return Err(Error::ZeroOperator);
    }
    Ok(num / den)
}

fn normalized<R: Real>(x: KernelOperator<R>, p: SchattenExponent) -> Result<Option<KernelOperator<R>>> {
    let nrm = schatten_norm(&x, p)?;
    Ok((nrm > R::zero() && nrm.is_finite()).then(|| x.scale((R::one() / nrm).cx())))
}

fn slot_adjoint_of<R: Real, T: MultilinearMap<R> + ?Sized>(
    map: &T,
    slot: usize,
    xs: &[&KernelOperator<R>],
    y: &KernelOperator<R>,
    cap: usize,
) -> Result<KernelOperator<R>> {
    match map.slot_adjoint(slot, xs, y) {
        Some(z) => z,
        None => adjoint_slot_map(map, slot, xs, cap)?.apply(y),
    }
}

struct RestartResult<R: Real> {
    value: R,
    xs: Vec<KernelOperator<R>>,
    iterations: usize,
    converged: bool,
}

fn ascend<R: Real, T: MultilinearMap<R> + ?Sized>(map: &T, ht: &HolderTuple, opts: &EstimatorOptions, restart: usize) -> Result<RestartResult<R>> {
    let n = map.arity();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(restart as u64));
    let mut xs = Vec::with_capacity(n);
    for slot in 0..n {
        let (r, c) = map.input_space(slot);
        let g = map.project(slot, &KernelOperator::ginibre(&mut rng, r, c)?)?;
        xs.push(normalized(g, ht.inputs()[slot])?.ok_or_else(|| Error::DegenerateMap(format!("slot {slot} has a zero domain")))?);
    }
    let objective = |xs: &[KernelOperator<R>]| -> Result<(R, KernelOperator<R>)> {
        let refs: Vec<&KernelOperator<R>> = xs.iter().collect();
        let out = map.apply(&refs)?;
        Ok((schatten_norm(&out, ht.output())?, out))
    };
    let (mut value, mut out) = objective(&xs)?;
    let mut iterations = 0;
    let mut converged = false;
    let tol = R::lit(opts.tol);
    while iterations < opts.max_iters {
        iterations += 1;
        let start = value;
        for slot in 0..n {
            if value <= R::zero() {
                break;
            }
            let refs: Vec<&KernelOperator<R>> = xs.iter().collect();
            let z = norming_element(&out, ht.output())?;
            let w = map.project(slot, &slot_adjoint_of(map, slot, &refs, &z, opts.dimension_cap)?)?;
            let pk = ht.inputs()[slot];
            let cand = match norming_element(&w, pk.conjugate()) {
                Ok(c) => map.project(slot, &c)?,
                Err(Error::ZeroOperator) => continue,
                Err(e) => return Err(e),
            };
            let mut eta = R::lit(opts.damping);
            for _ in 0..12 {
                let mixed = if eta >= R::one() { cand.clone() } else { xs[slot].axpy(eta.cx(), &cand.sub(&xs[slot])?)? };
                let Some(trial) = normalized(mixed, pk)? else {
                    eta *= R::lit(0.5);
                    continue;
                };
                let old = std::mem::replace(&mut xs[slot], trial);
                let (v, trial_out) = objective(&xs)?;
                if v >= value * (R::one() - R::lit(1e-13)) {
                    value = v;
                    out = trial_out;
                    break;
                }
                xs[slot] = old;
                eta *= R::lit(0.5);
            }
        }
        if value <= R::zero() || value - start <= tol * start.max(R::lit(1e-300)) {
            converged = true;
            break;
        }
    }
    Ok(RestartResult { value, xs, iterations, converged })
}

/// Alternating ascent with seeded Ginibre restarts. The value is a lower
/// bound for the norm of `map` under the Hölder tuple `ht`.
pub fn multilinear_norm_estimate<R: Real, T: MultilinearMap<R> + ?Sized>(
    map: &T,
    ht: &HolderTuple,
    opts: &EstimatorOptions,
) -> Result<NormEstimate<R>> {
    if ht.n() != map.arity() {
        return Err(Error::ArityMismatch { expected: map.arity(), got: ht.n() });
    }
    if map.arity() == 0 || opts.restarts == 0 {
        return Err(Error::DegenerateMap("nothing to estimate".into()));
    }
    let results: Vec<RestartResult<R>> = (0..opts.restarts).into_par_iter().map(|r| ascend(map, ht, opts, r)).collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.value > results[best].value {
            best = i;
        }
    }
    let converged = results[best].converged;
    if opts.require_convergence && !converged {
        return Err(Error::NoConvergence);
    }
    let iterations = results.iter().map(|r| r.iterations).sum();
    let b = &results[best];
    let value = evaluate_ratio(map, ht, &b.xs)?;
    Ok(NormEstimate { value, certificate: b.xs.clone(), iterations, restarts: opts.restarts, best_restart: best, converged })
}

/// Block amplification `T^{(N)}` of an arbitrary map, evaluated by
/// linearity over elementary tensors.
pub struct BlockAmplified<'a, R: Real> {
    inner: &'a dyn MultilinearMap<R>,
    level: usize,
    shapes: Vec<(usize, usize)>,
}

impl<'a, R: Real> BlockAmplified<'a, R> {
    pub fn new(inner: &'a dyn MultilinearMap<R>, level: usize) -> Self {
        let shapes = (0..inner.arity())
            .map(|k| {
                let (r, c) = inner.input_space(k);
                (r.len(), c.len())
            })
            .collect();
        Self { inner, level, shapes }
    }

    fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let n = self.inner.arity();
        let lv = self.level;
        (0..lv.pow(n as u32 + 1)).map(move |mut flat| {
            let mut a = vec![0; n + 1];
            for j in (0..=n).rev() {
                a[j] = flat % lv;
                flat /= lv;
            }
            a
        })
    }

    fn blocks_of(&self, xs: &[&KernelOperator<R>], a: &[usize]) -> Vec<KernelOperator<R>> {
        xs.iter()
            .enumerate()
            .map(|(k, x)| {
                let (m, n) = self.shapes[k];
                block(x, a[k], a[k + 1], m, n)
            })
            .collect()
    }
}

impl<R: Real> MultilinearMap<R> for BlockAmplified<'_, R> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn input_space(&self, slot: usize) -> (Vec<R>, Vec<R>) {
        let (r, c) = self.inner.input_space(slot);
        let rep = |w: &Vec<R>| (0..self.level).flat_map(|_| w.iter().copied()).collect();
        (rep(&r), rep(&c))
    }

    fn apply(&self, xs: &[&KernelOperator<R>]) -> Result<KernelOperator<R>> {
        let n = self.arity();
        let lv = self.level;
        let mut out: Vec<Option<KernelOperator<R>>> = vec![None; lv * lv];
        for a in self.tuples() {
            let blocks = self.blocks_of(xs, &a);
            let refs: Vec<&KernelOperator<R>> = blocks.iter().collect();
            let img = self.inner.apply(&refs)?;
            let slot = &mut out[a[0] * lv + a[n]];
            *slot = Some(match slot.take() {
                None => img,
                Some(acc) => acc.axpy(R::one().cx(), &img)?,
            });
        }
        let blocks: Vec<KernelOperator<R>> = out.into_iter().map(|b| b.expect("every block visited")).collect();
        from_blocks(&blocks, lv, lv)
    }

    fn project(&self, slot: usize, x: &KernelOperator<R>) -> Result<KernelOperator<R>> {
        let lv = self.level;
        let (m, n) = self.shapes[slot];
        let mut blocks = Vec::with_capacity(lv * lv);
        for i in 0..lv {
            for j in 0..lv {
                blocks.push(self.inner.project(slot, &block(x, i, j, m, n))?);
            }
        }
        from_blocks(&blocks, lv, lv)
    }

    fn slot_adjoint(&self, slot: usize, xs: &[&KernelOperator<R>], y: &KernelOperator<R>) -> Option<Result<KernelOperator<R>>> {
        let n = self.arity();
        let lv = self.level;
        let probe_blocks = self.blocks_of(xs, &vec![0; n + 1]);
        let probe_refs: Vec<&KernelOperator<R>> = probe_blocks.iter().collect();
        let (my, ny) = (y.nrows() / lv, y.ncols() / lv);
        let probe = self.inner.slot_adjoint(slot, &probe_refs, &block(y, 0, 0, my, ny))?;
        let run = || -> Result<KernelOperator<R>> {
            probe?;
            let (m, nn) = self.shapes[slot];
            let mut acc: Vec<Option<KernelOperator<R>>> = vec![None; lv * lv];
            for a in self.tuples() {
                let blocks = self.blocks_of(xs, &a);
                let refs: Vec<&KernelOperator<R>> = blocks.iter().collect();
                let yb = block(y, a[n], a[0], my, ny);
                let z = self.inner.slot_adjoint(slot, &refs, &yb).expect("closed form available")?;
                let cell = &mut acc[a[slot + 1] * lv + a[slot]];
                *cell = Some(match cell.take() {
                    None => z,
                    Some(s) => s.axpy(R::one().cx(), &z)?,
                });
            }
            let (rows, cols) = self.inner.input_space(slot);
            let blocks: Vec<KernelOperator<R>> = acc
                .into_iter()
                .map(|b| b.map_or_else(|| KernelOperator::zeros(cols.clone(), rows.clone()), Ok))
                .collect::<Result<_>>()?;
            debug_assert!(blocks.iter().all(|b| b.nrows() == nn && b.ncols() == m));
            from_blocks(&blocks, lv, lv)
        };
        Some(run())
    }
}

/// Lower bound for the norm of `T^{(N)}` on `S_{p_i}^N[S_{p_i}]`.
pub fn mb_norm_lower_bound<R: Real>(
    map: &dyn MultilinearMap<R>,
    ht: &HolderTuple,
    level: usize,
    opts: &EstimatorOptions,
) -> Result<NormEstimate<R>> {
    if level == 0 {
        return Err(Error::DegenerateMap("amplification level must be positive".into()));
    }
    if level == 1 {
        return multilinear_norm_estimate(map, ht, opts);
    }
    match map.amplified(level) {
        Some(native) => multilinear_norm_estimate(native.as_ref(), ht, opts),
        None => multilinear_norm_estimate(&BlockAmplified::new(map, level), ht, opts),
    }
}

/// Schur multiplier with a tabulated symbol on a weighted point set,
/// amplified to `M_K (x) L2(points)`.
#[derive(Clone, Debug)]
pub struct SchurMultiplierMap<R: Real> {
    symbol: Arc<DenseSymbol<R>>,
    weights: Vec<R>,
    level: usize,
}

impl<R: Real> SchurMultiplierMap<R> {
    pub fn new(symbol: DenseSymbol<R>, weights: Vec<R>) -> Result<Self> {
        if weights.len() != symbol.size() {
            return Err(Error::LengthMismatch { expected: symbol.size(), got: weights.len() });
        }
        Ok(Self { symbol: Arc::new(symbol), weights, level: 1 })
    }

    pub fn level(&self) -> usize {
        self.level
    }
}

impl<R: Real> MultilinearMap<R> for SchurMultiplierMap<R> {
    fn arity(&self) -> usize {
        self.symbol.arity() - 1
    }

    fn input_space(&self, _slot: usize) -> (Vec<R>, Vec<R>) {
        let w: Vec<R> = (0..self.level).flat_map(|_| self.weights.iter().copied()).collect();
        (w.clone(), w)
    }

    fn apply(&self, xs: &[&KernelOperator<R>]) -> Result<KernelOperator<R>> {
        schur_apply_amplified(&self.symbol, self.level, xs)
    }

    fn slot_adjoint(&self, slot: usize, xs: &[&KernelOperator<R>], y: &KernelOperator<R>) -> Option<Result<KernelOperator<R>>> {
        Some(schur_slot_adjoint(&self.symbol, self.level, xs, slot, y))
    }

    fn amplified(&self, level: usize) -> Option<Box<dyn MultilinearMap<R>>> {
        Some(Box::new(Self { level: self.level * level, ..self.clone() }))
    }
}

/// Fourier multiplier on a finite group, amplified to `M_K (x) L(G)` and
/// acting on operators on `C^K (x) l2(G)`. Norms are Schatten norms of
/// these operators; the trace normalization cancels in every ratio
/// allowed by a Hölder tuple.
#[derive(Clone, Debug)]
pub struct FourierMultiplierMap<R: Real> {
    group: Arc<FiniteGroup>,
    table: Arc<Vec<Complex<R>>>,
    arity: usize,
    level: usize,
}

impl<R: Real> FourierMultiplierMap<R> {
    /// `table` holds the symbol on `G^n`, row-major.
    pub fn new(group: Arc<FiniteGroup>, table: Vec<Complex<R>>, arity: usize) -> Result<Self> {
        let expected = group.order().pow(arity as u32);
        if table.len() != expected {
            return Err(Error::LengthMismatch { expected, got: table.len() });
        }
        Ok(Self { group, table: Arc::new(table), arity, level: 1 })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    fn elements(&self, xs: &[&KernelOperator<R>]) -> Result<Vec<AmplifiedElement<R>>> {
        xs.iter().map(|x| AmplifiedElement::from_operator(&self.group, self.level, x)).collect()
    }
}

impl<R: Real> MultilinearMap<R> for FourierMultiplierMap<R> {
    fn arity(&self) -> usize {
        self.arity
    }

    fn input_space(&self, _slot: usize) -> (Vec<R>, Vec<R>) {
        let d = self.level * self.group.order();
        (vec![R::one(); d], vec![R::one(); d])
    }

    fn apply(&self, xs: &[&KernelOperator<R>]) -> Result<KernelOperator<R>> {
        let els = self.elements(xs)?;
        let refs: Vec<&AmplifiedElement<R>> = els.iter().collect();
        Ok(fourier_apply_amplified(&self.table, &self.group, &refs)?.to_operator())
    }

    fn project(&self, _slot: usize, x: &KernelOperator<R>) -> Result<KernelOperator<R>> {
        Ok(AmplifiedElement::from_operator(&self.group, self.level, x)?.to_operator())
    }

    fn slot_adjoint(&self, slot: usize, xs: &[&KernelOperator<R>], y: &KernelOperator<R>) -> Option<Result<KernelOperator<R>>> {
        let run = || -> Result<KernelOperator<R>> {
            let els = self.elements(xs)?;
            let refs: Vec<&AmplifiedElement<R>> = els.iter().collect();
            let ye = AmplifiedElement::from_operator(&self.group, self.level, y)?;
            Ok(fourier_slot_adjoint(&self.table, &self.group, &refs, slot, &ye)?.to_operator())
        };
        Some(run())
    }

    fn amplified(&self, level: usize) -> Option<Box<dyn MultilinearMap<R>>> {
        Some(Box::new(Self { level: self.level * level, ..self.clone() }))
    }
}

type ApplyFn<R> = Arc<dyn Fn(&[&KernelOperator<R>]) -> Result<KernelOperator<R>> + Send + Sync>;

/// Map given by a closure, with full matrix spaces as domains.
#[derive(Clone)]
pub struct ClosureMap<R: Real> {
    spaces: Vec<(Vec<R>, Vec<R>)>,
    f: ApplyFn<R>,
}

impl<R: Real> ClosureMap<R> {
    pub fn new(
        spaces: Vec<(Vec<R>, Vec<R>)>,
        f: impl Fn(&[&KernelOperator<R>]) -> Result<KernelOperator<R>> + Send + Sync + 'static,
    ) -> Self {
        Self { spaces, f: Arc::new(f) }
    }
}

impl<R: Real> MultilinearMap<R> for ClosureMap<R> {
    fn arity(&self) -> usize {
        self.spaces.len()
    }

    fn input_space(&self, slot: usize) -> (Vec<R>, Vec<R>) {
        self.spaces[slot].clone()
    }

    fn apply(&self, xs: &[&KernelOperator<R>]) -> Result<KernelOperator<R>> {
        (self.f)(xs)
    }
}

/// `<T(x), y>` computed through the trace pairing; used to check adjoints.
pub fn pairing_with_output<R: Real, T: MultilinearMap<R> + ?Sized>(
    map: &T,
    xs: &[&KernelOperator<R>],
    y: &KernelOperator<R>,
) -> Result<Complex<R>> {
    dual_pairing(&map.apply(xs)?, y)
}
