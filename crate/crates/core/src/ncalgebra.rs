//! Kernel operators on weighted point sets, Schatten norms, duality,
//! polar decomposition, Mazur maps and norming elements.
//!
//! A kernel `A` on row weights `r` and column weights `c` acts by
//! `(A xi)(s) = sum_t A(s,t) c_t xi(t)`. Its matrix in orthonormal
//! coordinates is `diag(r)^{1/2} A diag(c)^{1/2}`, and every spectral
//! quantity is computed from that materialized matrix.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Schatten exponent `p` in `[1, inf]`, stored exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchattenExponent {
    Finite(Ratio<i64>),
    Infinity,
}

impl SchattenExponent {
    pub fn finite(p: Ratio<i64>) -> Result<Self> {
        if p < Ratio::one() {
            return Err(Error::BadExponent(format!("p = {p} < 1")));
        }
        Ok(SchattenExponent::Finite(p))
    }

    pub fn int(p: i64) -> Result<Self> {
        Self::finite(Ratio::from_integer(p))
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::BadExponent("zero denominator".into()));
        }
        Self::finite(Ratio::new(num, den))
    }

    /// Builds `p` from `1/p` in `[0, 1]`; `0` gives infinity.
    pub fn from_recip(r: Ratio<i64>) -> Result<Self> {
        if r.is_negative() || r > Ratio::one() {
            return Err(Error::BadExponent(format!("1/p = {r} outside [0, 1]")));
        }
        if r.is_zero() {
            Ok(SchattenExponent::Infinity)
        } else {
            Ok(SchattenExponent::Finite(r.recip()))
        }
    }

    pub fn recip(&self) -> Ratio<i64> {
        match self {
            SchattenExponent::Finite(p) => p.recip(),
            SchattenExponent::Infinity => Ratio::zero(),
        }
    }

    /// Conjugate exponent `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(&self) -> Self {
        Self::from_recip(Ratio::one() - self.recip()).expect("conjugate stays in range")
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SchattenExponent::Infinity)
    }

    pub fn value_f64(&self) -> f64 {
        match self {
            SchattenExponent::Finite(p) => p.to_f64().unwrap_or(f64::NAN),
            SchattenExponent::Infinity => f64::INFINITY,
        }
    }

    pub fn recip_f64(&self) -> f64 {
        self.recip().to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for SchattenExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchattenExponent::Finite(p) => write!(f, "{p}"),
            SchattenExponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for SchattenExponent {
    type Err = Error;

    /// Accepts `inf`, integers, fractions `a/b` and finite decimals.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::BadExponent(format!("cannot parse `{s}`"));
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(SchattenExponent::Infinity),
            _ => {}
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            return Self::ratio(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let den = 10i64.pow(frac.len() as u32);
            let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let frac: i64 = frac.parse().map_err(|_| bad())?;
            return Self::ratio(int * den + frac, den);
        }
        Self::int(s.parse().map_err(|_| bad())?)
    }
}

impl Serialize for SchattenExponent {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SchattenExponent {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Int(p) => Self::int(p),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Complex kernel on weighted row and column point sets.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelOperator<R: Real> {
    kernel: DMatrix<Complex<R>>,
    row_weights: Vec<R>,
    col_weights: Vec<R>,
}

impl<R: Real> KernelOperator<R> {
    pub fn new(kernel: DMatrix<Complex<R>>, row_weights: Vec<R>, col_weights: Vec<R>) -> Result<Self> {
        if kernel.nrows() != row_weights.len() || kernel.ncols() != col_weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "kernel {}x{} with {} row and {} column weights",
                kernel.nrows(),
                kernel.ncols(),
                row_weights.len(),
                col_weights.len()
            )));
        }
        if row_weights.iter().chain(&col_weights).any(|&w| !(w > R::zero())) {
            return Err(Error::ShapeMismatch("weights must be positive".into()));
        }
        Ok(Self { kernel, row_weights, col_weights })
    }

    /// Kernel with unit weights.
    pub fn from_matrix(kernel: DMatrix<Complex<R>>) -> Self {
        let (m, n) = kernel.shape();
        Self { kernel, row_weights: vec![R::one(); m], col_weights: vec![R::one(); n] }
    }

    /// Recovers the kernel whose materialized matrix is `mat`.
    pub fn from_materialized(mat: DMatrix<Complex<R>>, row_weights: Vec<R>, col_weights: Vec<R>) -> Result<Self> {
        let mut op = Self::new(mat, row_weights, col_weights)?;
        let (rs, cs) = op.sqrt_weights();
        for j in 0..op.kernel.ncols() {
            for i in 0..op.kernel.nrows() {
                op.kernel[(i, j)] = op.kernel[(i, j)] / (rs[i] * cs[j]).cx();
            }
        }
        Ok(op)
    }

    pub fn zeros(row_weights: Vec<R>, col_weights: Vec<R>) -> Result<Self> {
        Self::new(DMatrix::zeros(row_weights.len(), col_weights.len()), row_weights, col_weights)
    }

    /// Identity operator on `L2(weights)`, whose kernel is `1/w` on the diagonal.
    pub fn identity(weights: Vec<R>) -> Result<Self> {
        let n = weights.len();
        let kernel = DMatrix::from_fn(n, n, |i, j| if i == j { (R::one() / weights[i]).cx() } else { Complex::zero() });
        Self::new(kernel, weights.clone(), weights)
    }

    pub fn kernel(&self) -> &DMatrix<Complex<R>> {
        &self.kernel
    }

    pub fn kernel_mut(&mut self) -> &mut DMatrix<Complex<R>> {
        &mut self.kernel
    }

    pub fn row_weights(&self) -> &[R] {
        &self.row_weights
    }

    pub fn col_weights(&self) -> &[R] {
        &self.col_weights
    }

    pub fn nrows(&self) -> usize {
        self.kernel.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.kernel.ncols()
    }

    fn sqrt_weights(&self) -> (Vec<R>, Vec<R>) {
        (
            self.row_weights.iter().map(|w| w.sqrt()).collect(),
            self.col_weights.iter().map(|w| w.sqrt()).collect(),
        )
    }

    /// `diag(r)^{1/2} A diag(c)^{1/2}`.
    pub fn materialize(&self) -> DMatrix<Complex<R>> {
        let (rs, cs) = self.sqrt_weights();
        DMatrix::from_fn(self.nrows(), self.ncols(), |i, j| self.kernel[(i, j)] * (rs[i] * cs[j]).cx())
    }

    /// Hilbert-space adjoint.
    pub fn adjoint(&self) -> Self {
        Self {
            kernel: self.kernel.adjoint(),
            row_weights: self.col_weights.clone(),
            col_weights: self.row_weights.clone(),
        }
    }

    pub fn scale(&self, z: Complex<R>) -> Self {
        Self { kernel: self.kernel.map(|x| x * z), ..self.clone() }
    }

    pub fn same_space(&self, other: &Self) -> bool {
        weights_match(&self.row_weights, &other.row_weights) && weights_match(&self.col_weights, &other.col_weights)
    }

    /// `self + z * other` on the same weighted spaces.
    pub fn axpy(&self, z: Complex<R>, other: &Self) -> Result<Self> {
        if !self.same_space(other) {
            return Err(Error::ShapeMismatch("operators act between different spaces".into()));
        }
        Ok(Self { kernel: &self.kernel + other.kernel.map(|x| x * z), ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-Complex::one(), other)
    }

    pub fn is_finite(&self) -> bool {
        self.kernel.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest kernel entry modulus.
    pub fn max_abs_entry(&self) -> R {
        self.kernel.iter().fold(R::zero(), |m, z| m.max(nalgebra::ComplexField::modulus(*z)))
    }

    /// Complex Ginibre sample in materialized coordinates.
    pub fn ginibre(rng: &mut impl Rng, row_weights: Vec<R>, col_weights: Vec<R>) -> Result<Self> {
        let (m, n) = (row_weights.len(), col_weights.len());
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let mat = DMatrix::from_fn(m, n, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(R::lit(re * half), R::lit(im * half))
        });
        Self::from_materialized(mat, row_weights, col_weights)
    }
}

pub(crate) fn weights_match<R: Real>(a: &[R], b: &[R]) -> bool {
    let tol = R::lit(1e-9);
    a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| (x - y).abs() <= tol * (R::one() + x.abs()))
}

/// Relative threshold below which singular values count as zero.
pub fn rank_tolerance<R: Real>() -> R {
    R::lit(1e-12).max(R::default_epsilon() * R::lit(16.0))
}

/// Singular value decomposition `M = U diag(s) V^*` of a materialized
/// matrix, sorted in decreasing order with ties kept in index order.
pub struct SortedSvd<R: Real> {
    pub u: DMatrix<Complex<R>>,
    pub s: Vec<R>,
    pub v_t: DMatrix<Complex<R>>,
}

impl<R: Real> SortedSvd<R> {
    pub fn new(mat: &DMatrix<Complex<R>>) -> Result<Self> {
        if mat.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFiniteEntry);
        }
        let (m, n) = mat.shape();
        if m == 0 || n == 0 {
            return Ok(Self { u: DMatrix::zeros(m, 0), s: vec![], v_t: DMatrix::zeros(0, n) });
        }
        let (u, raw, v_t) = match Self::bidiagonal(mat) {
            Some(parts) => parts,
            None => Self::dilation(mat)?,
        };
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&i, &j| raw[j].partial_cmp(&raw[i]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
        let k = order.len();
        Ok(Self {
            u: DMatrix::from_fn(m, k, |i, j| u[(i, order[j])]),
            s: order.iter().map(|&i| raw[i]).collect(),
            v_t: DMatrix::from_fn(k, n, |i, j| v_t[(order[i], j)]),
        })
    }

    fn bidiagonal(mat: &DMatrix<Complex<R>>) -> Option<(DMatrix<Complex<R>>, Vec<R>, DMatrix<Complex<R>>)> {
        let svd = mat.clone().try_svd(true, true, R::default_epsilon() * R::lit(5.0), 0)?;
        let (u, v_t) = (svd.u?, svd.v_t?);
        let s: Vec<R> = svd.singular_values.iter().copied().collect();
        Self::verified(mat, u, s, v_t)
    }

    /// Singular triples from the Hermitian dilation `[[0, M], [M^*, 0]]`,
    /// whose eigenpairs are `(+-s, (u, +-v) / sqrt 2)`.
    fn dilation(mat: &DMatrix<Complex<R>>) -> Result<(DMatrix<Complex<R>>, Vec<R>, DMatrix<Complex<R>>)> {
        let (m, n) = mat.shape();
        let k = m.min(n);
        let mut h = DMatrix::zeros(m + n, m + n);
        h.view_mut((0, m), (m, n)).copy_from(mat);
        h.view_mut((m, 0), (n, m)).copy_from(&mat.adjoint());
        let eig = h.try_symmetric_eigen(R::default_epsilon(), 0).ok_or(Error::SvdFailed)?;
        let mut order: Vec<usize> = (0..m + n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap_or(std::cmp::Ordering::Equal));
        let root2 = R::lit(std::f64::consts::SQRT_2).cx();
        let mut u = DMatrix::zeros(m, k);
        let mut v = DMatrix::zeros(n, k);
        let mut s = Vec::with_capacity(k);
        for (l, &idx) in order.iter().take(k).enumerate() {
            let vec = eig.eigenvectors.column(idx);
            s.push(eig.eigenvalues[idx].max(R::zero()));
            u.set_column(l, &(vec.rows(0, m) * root2));
            v.set_column(l, &(vec.rows(m, n) * root2));
        }
        // Vectors of vanishing singular values are not determined by the
        // dilation; re-orthonormalize so that the factors stay isometric.
        let u = orthonormalize(u);
        let v = orthonormalize(v);
        let v_t = v.adjoint();
        Self::verified(mat, u, s, v_t).ok_or(Error::SvdFailed)
    }

    fn verified(
        mat: &DMatrix<Complex<R>>,
        u: DMatrix<Complex<R>>,
        s: Vec<R>,
        v_t: DMatrix<Complex<R>>,
    ) -> Option<(DMatrix<Complex<R>>, Vec<R>, DMatrix<Complex<R>>)> {
        let (m, n) = mat.shape();
        let scale = mat.norm();
        let tol = R::lit(1e4) * R::default_epsilon() * R::lit(m.max(n) as f64);
        let mut us = u.clone();
        for (j, &x) in s.iter().enumerate() {
            us.column_mut(j).scale_mut(x);
        }
        let residual = (us * &v_t - mat).norm();
        let k = s.len();
        let ortho_u = (u.adjoint() * &u - DMatrix::identity(k, k)).norm();
        let ortho_v = (&v_t * v_t.adjoint() - DMatrix::identity(k, k)).norm();
        let ok = residual <= tol * scale && ortho_u <= tol && ortho_v <= tol && s.iter().all(|x| x.is_finite());
        ok.then_some((u, s, v_t))
    }

    /// Number of singular values above the relative rank tolerance.
    pub fn rank(&self) -> usize {
        let top = self.s.first().copied().unwrap_or(R::zero());
        if top <= R::zero() {
            return 0;
        }
        let cut = top * rank_tolerance::<R>();
        self.s.iter().take_while(|&&x| x > cut).count()
    }

    /// `U_+ diag(g(s)) V_+^*` over the numerical support.
    pub fn recombine(&self, g: impl Fn(R) -> R) -> DMatrix<Complex<R>> {
        let k = self.rank();
        let (m, n) = (self.u.nrows(), self.v_t.ncols());
        let mut out = DMatrix::zeros(m, n);
        for l in 0..k {
            let w = g(self.s[l]).cx();
            let col = self.u.column(l) * w;
            out += col * self.v_t.row(l);
        }
        out
    }

    /// `V_+ diag(g(s)) U_+^*` over the numerical support.
    pub fn recombine_adjoint(&self, g: impl Fn(R) -> R) -> DMatrix<Complex<R>> {
        self.recombine(g).adjoint()
    }
}

/// Modified Gram-Schmidt on the columns, replacing dependent columns by
/// unit vectors orthogonal to the previous ones.
fn orthonormalize<R: Real>(mut q: DMatrix<Complex<R>>) -> DMatrix<Complex<R>> {
    let (rows, cols) = q.shape();
    let tiny = R::lit(1e-8);
    for j in 0..cols {
        for _ in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dotc(&q.column(j));
                let ci = q.column(i).clone_owned();
                q.column_mut(j).axpy(-proj, &ci, Complex::one());
            }
        }
        let mut nrm = q.column(j).norm();
        let mut probe = 0;
        while nrm <= tiny && probe < rows {
            q.column_mut(j).fill(Complex::zero());
            q[(probe, j)] = Complex::one();
            for _ in 0..2 {
                for i in 0..j {
                    let proj = q.column(i).dotc(&q.column(j));
                    let ci = q.column(i).clone_owned();
                    q.column_mut(j).axpy(-proj, &ci, Complex::one());
                }
            }
            nrm = q.column(j).norm();
            probe += 1;
        }
        let inv = R::one() / nrm;
        q.column_mut(j).scale_mut(inv);
    }
    q
}

/// Singular values of the materialized operator, in decreasing order.
///
/// Values are computed without singular vectors and accepted when their
/// squares add up to the squared Frobenius norm; otherwise the verified
/// decomposition of [`SortedSvd`] is used.
pub fn singular_values<R: Real>(a: &KernelOperator<R>) -> Result<Vec<R>> {
    let mat = a.materialize();
    if mat.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFiniteEntry);
    }
    if mat.is_empty() {
        return Ok(vec![]);
    }
    if let Some(svd) = mat.clone().try_svd(false, false, R::default_epsilon() * R::lit(5.0), 0) {
        let mut s: Vec<R> = svd.singular_values.iter().copied().collect();
        let frob = mat.norm_squared();
        let sum = s.iter().fold(R::zero(), |acc, &x| acc + x * x);
        let tol = R::lit(1e4) * R::default_epsilon() * R::lit(mat.nrows().max(mat.ncols()) as f64);
        if s.iter().all(|x| x.is_finite() && *x >= R::zero()) && (sum - frob).abs() <= tol * frob {
            s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
            return Ok(s);
        }
    }
    Ok(SortedSvd::new(&mat)?.s)
}

/// `l_p` norm of a non-increasing list of non-negative numbers.
pub fn lp_of_values<R: Real>(s: &[R], p: SchattenExponent) -> R {
    let top = s.iter().fold(R::zero(), |m, &x| m.max(x));
    if top <= R::zero() {
        return R::zero();
    }
    match p {
        SchattenExponent::Infinity => top,
        SchattenExponent::Finite(_) => {
            let pe = R::lit(p.value_f64());
            let sum = s.iter().fold(R::zero(), |acc, &x| acc + (x / top).powf(pe));
            top * sum.powf(R::one() / pe)
        }
    }
}

/// Schatten `p`-norm of the materialized operator.
pub fn schatten_norm<R: Real>(a: &KernelOperator<R>, p: SchattenExponent) -> Result<R> {
    if !a.is_finite() {
        return Err(Error::NonFiniteEntry);
    }
    Ok(lp_of_values(&singular_values(a)?, p))
}

/// Bilinear pairing `<A, B> = sum r_s c_t A(s,t) B(t,s)`, the trace of the
/// product of the materialized matrices.
pub fn dual_pairing<R: Real>(a: &KernelOperator<R>, b: &KernelOperator<R>) -> Result<Complex<R>> {
    if a.nrows() != b.ncols()
        || a.ncols() != b.nrows()
        || !weights_match(&a.row_weights, &b.col_weights)
        || !weights_match(&a.col_weights, &b.row_weights)
    {
        return Err(Error::ShapeMismatch(format!(
            "cannot pair {}x{} with {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let mut acc: Complex<R> = Complex::zero();
    for s in 0..a.nrows() {
        let mut row: Complex<R> = Complex::zero();
        for t in 0..a.ncols() {
            row += a.kernel[(s, t)] * b.kernel[(t, s)] * a.col_weights[t].cx();
        }
        acc += row * a.row_weights[s].cx();
    }
    Ok(acc)
}

/// Polar decomposition `A = u h` with `h = (A^*A)^{1/2}` and `u` the
/// partial isometry on the numerical support.
pub fn polar_decompose<R: Real>(a: &KernelOperator<R>) -> Result<(KernelOperator<R>, KernelOperator<R>)> {
    let svd = SortedSvd::new(&a.materialize())?;
    let u = svd.recombine(|_| R::one());
    let k = svd.rank();
    let n = a.ncols();
    let mut h = DMatrix::zeros(n, n);
    for l in 0..k {
        let row = svd.v_t.row(l);
        h += row.adjoint() * svd.s[l].cx() * row;
    }
    Ok((
        KernelOperator::from_materialized(u, a.row_weights.clone(), a.col_weights.clone())?,
        KernelOperator::from_materialized(h, a.col_weights.clone(), a.col_weights.clone())?,
    ))
}

/// Mazur map `M_{p,q}(A) = u h^{p/q}`.
pub fn mazur_map<R: Real>(a: &KernelOperator<R>, p: SchattenExponent, q: SchattenExponent) -> Result<KernelOperator<R>> {
    if p.is_infinite() || q.is_infinite() {
        return Err(Error::InfiniteExponent);
    }
    let ratio = R::lit((q.recip() / p.recip()).to_f64().unwrap_or(f64::NAN));
    let svd = SortedSvd::new(&a.materialize())?;
    let mat = svd.recombine(|x| x.powf(ratio));
    KernelOperator::from_materialized(mat, a.row_weights.clone(), a.col_weights.clone())
}

/// `|A|^z` with `z > 0`, on the column space.
pub fn abs_power<R: Real>(a: &KernelOperator<R>, z: R) -> Result<KernelOperator<R>> {
    let svd = SortedSvd::new(&a.materialize())?;
    let k = svd.rank();
    let n = a.ncols();
    let mut h = DMatrix::zeros(n, n);
    for l in 0..k {
        let row = svd.v_t.row(l);
        h += row.adjoint() * svd.s[l].powf(z).cx() * row;
    }
    KernelOperator::from_materialized(h, a.col_weights.clone(), a.col_weights.clone())
}

/// Element `N` of the unit sphere of `S_{p'}` with `<A, N> = ||A||_p`.
///
/// The result acts in the reverse direction of `A`. It is the adjoint of
/// `u h^{p-1} / ||A||_p^{p-1}` for `1 < p < inf`, the adjoint of the polar
/// isometry for `p = 1`, and the rank-one top singular projection for
/// `p = inf`.
pub fn norming_element<R: Real>(a: &KernelOperator<R>, p: SchattenExponent) -> Result<KernelOperator<R>> {
    let svd = SortedSvd::new(&a.materialize())?;
    if svd.rank() == 0 {
        return Err(Error::ZeroOperator);
    }
    let mat = match p {
        SchattenExponent::Infinity => {
            let u0 = svd.u.column(0);
            let v0 = svd.v_t.row(0);
            (u0 * v0).adjoint()
        }
        SchattenExponent::Finite(_) if p.recip().is_one() => svd.recombine_adjoint(|_| R::one()),
        SchattenExponent::Finite(_) => {
            let pe = R::lit(p.value_f64());
            let top = svd.s[0];
            let norm = lp_of_values(&svd.s, p) / top;
            svd.recombine_adjoint(|x| (x / top).powf(pe - R::one()) / norm.powf(pe - R::one()))
        }
    };
    KernelOperator::from_materialized(mat, a.col_weights.clone(), a.row_weights.clone())
}

/// Composition `C(s,u) = sum_t c_t A(s,t) B(t,u)`.
pub fn kernel_compose<R: Real>(a: &KernelOperator<R>, b: &KernelOperator<R>) -> Result<KernelOperator<R>> {
    if a.ncols() != b.nrows() || !weights_match(&a.col_weights, &b.row_weights) {
        return Err(Error::ShapeMismatch(format!(
            "cannot compose {}x{} with {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let mut scaled = a.kernel.clone();
    for (t, mut col) in scaled.column_iter_mut().enumerate() {
        col *= a.col_weights[t].cx();
    }
    KernelOperator::new(scaled * &b.kernel, a.row_weights.clone(), b.col_weights.clone())
}

/// `alpha (x) A` on `C^N (x) L2`, indices ordered as `a * m + s`.
pub fn amplify<R: Real>(alpha: &DMatrix<Complex<R>>, a: &KernelOperator<R>) -> KernelOperator<R> {
    let (na, nb) = alpha.shape();
    KernelOperator {
        kernel: alpha.kronecker(&a.kernel),
        row_weights: (0..na).flat_map(|_| a.row_weights.iter().copied()).collect(),
        col_weights: (0..nb).flat_map(|_| a.col_weights.iter().copied()).collect(),
    }
}

/// Block `(i, j)` of an operator on `C^N (x) L2` with blocks of size `m x n`.
pub fn block<R: Real>(x: &KernelOperator<R>, i: usize, j: usize, m: usize, n: usize) -> KernelOperator<R> {
    KernelOperator {
        kernel: x.kernel.view((i * m, j * n), (m, n)).into_owned(),
        row_weights: x.row_weights[i * m..(i + 1) * m].to_vec(),
        col_weights: x.col_weights[j * n..(j + 1) * n].to_vec(),
    }
}

/// Assembles an `N x N'` block operator from blocks given in row-major order.
pub fn from_blocks<R: Real>(blocks: &[KernelOperator<R>], nb_rows: usize, nb_cols: usize) -> Result<KernelOperator<R>> {
    if blocks.len() != nb_rows * nb_cols || blocks.is_empty() {
        return Err(Error::ShapeMismatch("wrong number of blocks".into()));
    }
    let (m, n) = (blocks[0].nrows(), blocks[0].ncols());
    let mut kernel = DMatrix::zeros(nb_rows * m, nb_cols * n);
    for i in 0..nb_rows {
        for j in 0..nb_cols {
            let b = &blocks[i * nb_cols + j];
            if b.nrows() != m || b.ncols() != n {
                return Err(Error::ShapeMismatch("blocks of unequal size".into()));
            }
            kernel.view_mut((i * m, j * n), (m, n)).copy_from(&b.kernel);
        }
    }
    let row_weights = (0..nb_rows).flat_map(|i| blocks[i * nb_cols].row_weights.iter().copied()).collect();
    let col_weights = (0..nb_cols).flat_map(|j| blocks[j].col_weights.iter().copied()).collect();
    KernelOperator::new(kernel, row_weights, col_weights)
}
