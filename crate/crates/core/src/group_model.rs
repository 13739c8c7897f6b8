//! Group models: exact finite groups and quadrature models of locally
//! compact groups (the `ax+b` group, real and integer segments).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};

/// Group law shared by every model.
pub trait GroupLaw: Send + Sync {
    type Elem: Copy + Send + Sync + fmt::Debug + 'static;

    fn mul(&self, s: Self::Elem, t: Self::Elem) -> Self::Elem;
    fn inv(&self, s: Self::Elem) -> Self::Elem;
    fn identity(&self) -> Self::Elem;
    fn modular(&self, s: Self::Elem) -> f64;
}

/// Finite group given by its Cayley table. Elements are indices `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    identity: usize,
}

/// A subgroup relabelled as a standalone group, with its embedding.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: FiniteGroup,
    /// `embedding[h]` is the parent index of subgroup element `h`.
    pub embedding: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a Cayley table (row-major, `table[i * order + j] = i * j`).
    pub fn make_from_table(name: &str, order: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 {
            return Err(Error::TableNotAGroup("empty table".into()));
        }
        if table.len() != order * order {
            return Err(Error::TableNotAGroup(format!(
                "table has {} entries, expected {}",
                table.len(),
                order * order
            )));
        }
        if table.iter().any(|&x| x >= order) {
            return Err(Error::TableNotAGroup("entry out of range".into()));
        }
        let m = |i: usize, j: usize| table[i * order + j];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| m(e, x) == x && m(x, e) == x))
            .ok_or_else(|| Error::TableNotAGroup("no identity".into()))?;
        let mut inverse = vec![usize::MAX; order];
        for x in 0..order {
            let y = (0..order)
                .find(|&y| m(x, y) == identity && m(y, x) == identity)
                .ok_or_else(|| Error::TableNotAGroup(format!("element {x} has no inverse")))?;
            inverse[x] = y;
        }
        for a in 0..order {
            for b in 0..order {
                let ab = m(a, b);
                for c in 0..order {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(Error::TableNotAGroup(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(Self { name: name.to_string(), order, table, inverse, identity })
    }

    /// Cyclic group of order `n`, element `k` standing for `k mod n`.
    pub fn make_cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group needs positive order");
        let table = (0..n * n).map(|idx| (idx / n + idx % n) % n).collect();
        Self::make_from_table(&format!("Z{n}"), n, table).expect("cyclic table is a group")
    }

    /// Dihedral group of order `2m`. Index `e * m + k` stands for `r^k s^e`.
    pub fn make_dihedral(m: usize) -> Self {
        assert!(m >= 1, "dihedral group needs m >= 1");
        let order = 2 * m;
        let mut table = vec![0; order * order];
        for x in 0..order {
            let (ex, kx) = (x / m, x % m);
            for y in 0..order {
                let (ey, ky) = (y / m, y % m);
                let k = if ex == 0 { (kx + ky) % m } else { (kx + m - ky) % m };
                table[x * order + y] = ((ex + ey) % 2) * m + k;
            }
        }
        Self::make_from_table(&format!("D{m}"), order, table).expect("dihedral table is a group")
    }

    /// Symmetric group on `k` letters, permutations in lexicographic order.
    /// Composition is `(p q)(i) = p(q(i))`.
    pub fn make_symmetric(k: usize) -> Self {
        assert!((1..=6).contains(&k), "symmetric group supported for 1 <= k <= 6");
        let perms = permutations(k);
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        let order = perms.len();
        let mut table = vec![0; order * order];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let pq: Vec<usize> = (0..k).map(|x| p[q[x]]).collect();
                table[i * order + j] = index(&pq);
            }
        }
        Self::make_from_table(&format!("S{k}"), order, table).expect("symmetric table is a group")
    }

    /// Parses names such as `Z4`, `D3`, `S3`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        let (head, tail) = name.split_at(name.chars().next().map_or(0, |c| c.len_utf8()));
        let n: usize = tail
            .parse()
            .map_err(|_| Error::Config(format!("unknown group `{name}`")))?;
        match head {
            "Z" | "C" if n >= 1 => Ok(Self::make_cyclic(n)),
            "D" if n >= 1 => Ok(Self::make_dihedral(n)),
            "S" if (1..=6).contains(&n) => Ok(Self::make_symmetric(n)),
            _ => Err(Error::Config(format!("unknown group `{name}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, s: usize, t: usize) -> usize {
        self.table[s * self.order + t]
    }

    pub fn inv(&self, s: usize) -> usize {
        self.inverse[s]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// Product of a word, left to right.
    pub fn product(&self, word: &[usize]) -> usize {
        word.iter().fold(self.identity, |acc, &x| self.mul(acc, x))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Restricts the group law to `elems`, failing if they are not closed.
    pub fn subgroup(&self, elems: &[usize]) -> Result<Subgroup> {
        let mut embedding: Vec<usize> = elems.to_vec();
        embedding.sort_unstable();
        embedding.dedup();
        if embedding.is_empty() || embedding.iter().any(|&x| x >= self.order) {
            return Err(Error::NotASubgroup);
        }
        let k = embedding.len();
        let mut table = vec![0; k * k];
        for (i, &a) in embedding.iter().enumerate() {
            for (j, &b) in embedding.iter().enumerate() {
                let ab = self.mul(a, b);
                table[i * k + j] = embedding.binary_search(&ab).map_err(|_| Error::NotASubgroup)?;
            }
        }
        let group = Self::make_from_table(&format!("{}<{}>", self.name, k), k, table)
            .map_err(|_| Error::NotASubgroup)?;
        Ok(Subgroup { group, embedding })
    }

    /// Følner ratio `[|sF \ F| + |F \ sF|] / |F|` with counting measure.
    pub fn folner_ratio(&self, s: usize, window: &[usize]) -> Result<f64> {
        let mut inside = vec![false; self.order];
        for &x in window {
            inside[x] = true;
        }
        let size = inside.iter().filter(|&&b| b).count();
        if size == 0 {
            return Err(Error::EmptyWindow);
        }
        let moved_out = (0..self.order)
            .filter(|&x| inside[x] && !inside[self.mul(s, x)])
            .count();
        Ok(2.0 * moved_out as f64 / size as f64)
    }
}

impl GroupLaw for FiniteGroup {
    type Elem = usize;

    fn mul(&self, s: usize, t: usize) -> usize {
        FiniteGroup::mul(self, s, t)
    }

    fn inv(&self, s: usize) -> usize {
        FiniteGroup::inv(self, s)
    }

    fn identity(&self) -> usize {
        self.identity
    }

    fn modular(&self, _s: usize) -> f64 {
        1.0
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Element of a quadrature model. One-dimensional laws use the first slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupPoint(pub [f64; 2]);

impl GroupPoint {
    /// The `ax+b` element `(a, b)`.
    pub fn axb(a: f64, b: f64) -> Self {
        GroupPoint([a, b])
    }

    /// Element of a one-dimensional law.
    pub fn scalar(x: f64) -> Self {
        GroupPoint([x, 0.0])
    }

    pub fn a(&self) -> f64 {
        self.0[0]
    }

    pub fn b(&self) -> f64 {
        self.0[1]
    }
}

/// Closed-form group laws available to quadrature models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Law {
    /// `(a,b)(a',b') = (aa', ab' + b)` with `a > 0`, left Haar `a^-2 da db`.
    AxPlusB,
    /// Additive reals with Lebesgue measure.
    RealLine,
    /// Additive integers with counting measure.
    Integers,
}

impl Law {
    pub fn mul(self, s: GroupPoint, t: GroupPoint) -> GroupPoint {
        match self {
            Law::AxPlusB => GroupPoint([s.0[0] * t.0[0], s.0[0] * t.0[1] + s.0[1]]),
            Law::RealLine | Law::Integers => GroupPoint([s.0[0] + t.0[0], 0.0]),
        }
    }

    pub fn inv(self, s: GroupPoint) -> GroupPoint {
        match self {
            Law::AxPlusB => GroupPoint([1.0 / s.0[0], -s.0[1] / s.0[0]]),
            Law::RealLine | Law::Integers => GroupPoint([-s.0[0], 0.0]),
        }
    }

    pub fn identity(self) -> GroupPoint {
        match self {
            Law::AxPlusB => GroupPoint([1.0, 0.0]),
            Law::RealLine | Law::Integers => GroupPoint([0.0, 0.0]),
        }
    }

    pub fn modular(self, s: GroupPoint) -> f64 {
        match self {
            Law::AxPlusB => 1.0 / s.0[0],
            Law::RealLine | Law::Integers => 1.0,
        }
    }

    pub fn is_unimodular(self) -> bool {
        !matches!(self, Law::AxPlusB)
    }

    /// Coordinates of `s` in the given chart.
    pub fn chart_coords(self, chart: Chart, s: GroupPoint) -> [f64; 2] {
        match chart {
            Chart::LogAB => [s.0[0].ln(), s.0[1]],
            Chart::LogAShear => [s.0[0].ln(), s.0[1] / s.0[0]],
            Chart::Line => [s.0[0], 0.0],
        }
    }

    /// Inverse of [`Law::chart_coords`].
    pub fn from_chart(self, chart: Chart, c: [f64; 2]) -> GroupPoint {
        match chart {
            Chart::LogAB => GroupPoint([c[0].exp(), c[1]]),
            Chart::LogAShear => {
                let a = c[0].exp();
                GroupPoint([a, c[1] * a])
            }
            Chart::Line => GroupPoint([c[0], 0.0]),
        }
    }
}

/// Coordinate charts in which grids and windows are axis-aligned boxes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    /// `(log a, b)` on the `ax+b` group; left Haar measure is `e^-u du db`.
    LogAB,
    /// `(log a, b/a)` on the `ax+b` group; left Haar measure is `du dv`.
    LogAShear,
    /// The coordinate itself on a one-dimensional law.
    Line,
}

/// Axis-aligned box in a chart, closed on both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub chart: Chart,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Window {
    /// `{(a, b) : a in [a_lo, a_hi], b in [b_lo, b_hi]}`.
    pub fn axb_box(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> Self {
        Window { chart: Chart::LogAB, lo: [a_lo.ln(), b_lo], hi: [a_hi.ln(), b_hi] }
    }

    /// `{(a, b) : log a in [u_lo, u_hi], |b| <= v a}`.
    pub fn axb_wedge(u_lo: f64, u_hi: f64, v: f64) -> Self {
        Window { chart: Chart::LogAShear, lo: [u_lo, -v], hi: [u_hi, v] }
    }

    /// `[lo, hi]` on a one-dimensional law.
    pub fn interval(lo: f64, hi: f64) -> Self {
        Window { chart: Chart::Line, lo: [lo, 0.0], hi: [hi, 0.0] }
    }

    /// Whether the window is invariant under `x -> x^{-1}`.
    pub fn is_symmetric(&self, law: Law) -> bool {
        match (law, self.chart) {
            (Law::RealLine | Law::Integers, Chart::Line) => (self.lo[0] + self.hi[0]).abs() < 1e-12,
            _ => false,
        }
    }

    pub fn contains(&self, law: Law, s: GroupPoint) -> bool {
        let c = law.chart_coords(self.chart, s);
        let tol = 1e-9;
        let dims = if self.chart == Chart::Line { 1 } else { 2 };
        (0..dims).all(|i| c[i] >= self.lo[i] - tol && c[i] <= self.hi[i] + tol)
    }
}

/// Quadrature model: closed-form law plus a weighted point set.
#[derive(Clone, Debug)]
pub struct QuadratureGroup {
    name: String,
    law: Law,
    chart: Chart,
    lo: [f64; 2],
    hi: [f64; 2],
    shape: [usize; 2],
    points: Vec<GroupPoint>,
    weights: Vec<f64>,
}

impl QuadratureGroup {
    /// Midpoint grid on the `ax+b` group, log-uniform in `a` over `[1/r, r]`
    /// and uniform in `b` over `[-s, s]`.
    pub fn make_axb(r: f64, s: f64, n_a: usize, n_b: usize) -> Result<Self> {
        if !(r > 1.0) || !(s > 0.0) || n_a < 2 || n_b < 2 {
            return Err(Error::BadGridParams(format!(
                "need R > 1, S > 0, n >= 2 (got R={r}, S={s}, n_a={n_a}, n_b={n_b})"
            )));
        }
        Self::make_axb_chart(Chart::LogAB, [-r.ln(), -s], [r.ln(), s], [n_a, n_b])
    }

    /// Midpoint grid on the `ax+b` group over an arbitrary chart box.
    pub fn make_axb_chart(chart: Chart, lo: [f64; 2], hi: [f64; 2], shape: [usize; 2]) -> Result<Self> {
        if chart == Chart::Line {
            return Err(Error::BadGridParams("ax+b needs a two-dimensional chart".into()));
        }
        if shape[0] < 2 || shape[1] < 2 || !(hi[0] > lo[0]) || !(hi[1] > lo[1]) {
            return Err(Error::BadGridParams(format!("degenerate box {lo:?}..{hi:?} / {shape:?}")));
        }
        let du = (hi[0] - lo[0]) / shape[0] as f64;
        let dv = (hi[1] - lo[1]) / shape[1] as f64;
        let mut points = Vec::with_capacity(shape[0] * shape[1]);
        let mut weights = Vec::with_capacity(shape[0] * shape[1]);
        for i in 0..shape[0] {
            let u = lo[0] + (i as f64 + 0.5) * du;
            for j in 0..shape[1] {
                let v = lo[1] + (j as f64 + 0.5) * dv;
                points.push(Law::AxPlusB.from_chart(chart, [u, v]));
                weights.push(match chart {
                    Chart::LogAB => (-u).exp() * du * dv,
                    _ => du * dv,
                });
            }
        }
        Ok(Self { name: "axb".into(), law: Law::AxPlusB, chart, lo, hi, shape, points, weights })
    }

    /// Midpoint grid with `n` cells on `[-l, l]` of the real line.
    pub fn make_real_segment(l: f64, n: usize) -> Result<Self> {
        if !(l > 0.0) || n < 2 {
            return Err(Error::BadGridParams(format!("need L > 0, n >= 2 (got L={l}, n={n})")));
        }
        let h = 2.0 * l / n as f64;
        let points = (0..n).map(|i| GroupPoint::scalar(-l + (i as f64 + 0.5) * h)).collect();
        Ok(Self {
            name: "R".into(),
            law: Law::RealLine,
            chart: Chart::Line,
            lo: [-l, 0.0],
            hi: [l, 0.0],
            shape: [n, 1],
            points,
            weights: vec![h; n],
        })
    }

    /// The integers `-l..=l` with counting measure.
    pub fn make_integer_segment(l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::BadGridParams("integer segment needs l >= 1".into()));
        }
        let n = 2 * l + 1;
        let points = (0..n).map(|i| GroupPoint::scalar(i as f64 - l as f64)).collect();
        Ok(Self {
            name: "Z".into(),
            law: Law::Integers,
            chart: Chart::Line,
            lo: [-(l as f64) - 0.5, 0.0],
            hi: [l as f64 + 0.5, 0.0],
            shape: [n, 1],
            points,
            weights: vec![1.0; n],
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn law(&self) -> Law {
        self.law
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[GroupPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    /// Grid box in chart coordinates.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        (self.lo, self.hi)
    }

    /// Whether `s` lies in the region tiled by the grid cells.
    pub fn covers(&self, s: GroupPoint) -> bool {
        let c = self.law.chart_coords(self.chart, s);
        let dims = if self.chart == Chart::Line { 1 } else { 2 };
        (0..dims).all(|i| c[i] >= self.lo[i] - 1e-9 && c[i] <= self.hi[i] + 1e-9)
    }

    pub fn haar_integral(&self, f: impl Fn(GroupPoint) -> Complex<f64>) -> Complex<f64> {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| f(p) * w).sum()
    }

    pub fn haar_integral_real(&self, f: impl Fn(GroupPoint) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| f(p) * w).sum()
    }

    /// Grid indices whose points lie in `window`.
    pub fn window_indices(&self, window: &Window) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| window.contains(self.law, self.points[i])).collect()
    }

    /// Quadrature measure of the grid points inside `window`.
    pub fn window_measure(&self, window: &Window) -> f64 {
        self.window_indices(window).iter().map(|&i| self.weights[i]).sum()
    }

    /// Følner ratio `[mu(sF \ F) + mu(F \ sF)] / mu(F)`, using
    /// `mu(sF) = mu(F)` and quadrature over the grid points of `F`.
    pub fn folner_ratio(&self, s: GroupPoint, window: &Window) -> Result<f64> {
        let idx = self.window_indices(window);
        let total: f64 = idx.iter().map(|&i| self.weights[i]).sum();
        if idx.is_empty() || total <= 0.0 {
            return Err(Error::EmptyWindow);
        }
        let s_inv = self.law.inv(s);
        let overlap: f64 = idx
            .iter()
            .filter(|&&i| window.contains(self.law, self.law.mul(s_inv, self.points[i])))
            .map(|&i| self.weights[i])
            .sum();
        Ok((2.0 * (1.0 - overlap / total)).clamp(0.0, 2.0))
    }
}

impl GroupLaw for QuadratureGroup {
    type Elem = GroupPoint;

    fn mul(&self, s: GroupPoint, t: GroupPoint) -> GroupPoint {
        self.law.mul(s, t)
    }

    fn inv(&self, s: GroupPoint) -> GroupPoint {
        self.law.inv(s)
    }

    fn identity(&self) -> GroupPoint {
        self.law.identity()
    }

    fn modular(&self, s: GroupPoint) -> f64 {
        self.law.modular(s)
    }
}

/// Nested windows on a fixed quadrature model.
#[derive(Clone, Debug)]
pub struct FolnerSequence {
    pub group: Arc<QuadratureGroup>,
    pub windows: Vec<Window>,
    indices: Vec<Vec<usize>>,
}

impl FolnerSequence {
    /// Checks that the windows are non-empty and nested on the grid.
    pub fn new(group: Arc<QuadratureGroup>, windows: Vec<Window>) -> Result<Self> {
        let indices: Vec<Vec<usize>> = windows.iter().map(|w| group.window_indices(w)).collect();
        if indices.iter().any(|ix| ix.is_empty()) {
            return Err(Error::EmptyWindow);
        }
        for pair in indices.windows(2) {
            let outer: std::collections::HashSet<usize> = pair[1].iter().copied().collect();
            if !pair[0].iter().all(|i| outer.contains(i)) {
                return Err(Error::BadGridParams("windows are not nested".into()));
            }
        }
        Ok(Self { group, windows, indices })
    }

    pub fn indices(&self, k: usize) -> &[usize] {
        &self.indices[k]
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Følner ratios of `s` along the sequence.
    pub fn ratios(&self, s: GroupPoint) -> Result<Vec<f64>> {
        self.windows.iter().map(|w| self.group.folner_ratio(s, w)).collect()
    }
}

/// Either kind of group model.
#[derive(Clone, Debug)]
pub enum GroupModel {
    Finite(Arc<FiniteGroup>),
    Quadrature(Arc<QuadratureGroup>),
}

impl GroupModel {
    pub fn name(&self) -> &str {
        match self {
            GroupModel::Finite(g) => g.name(),
            GroupModel::Quadrature(g) => g.name(),
        }
    }
}
