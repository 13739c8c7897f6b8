//! Continuity of the Mazur map `M_{2,p}` along trace-preserving unital
//! completely positive maps on matrix algebras.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand_chacha::ChaCha8Rng;

use super::config::{MazurConfig, MazurMapKind};
use super::random::rng_for;
use super::{Row, RowCtx};
use crate::error::{Error, Result};
use crate::ncalgebra::{mazur_map, schatten_norm, KernelOperator, SchattenExponent};

type Mat = DMatrix<Complex<f64>>;

fn ginibre(rng: &mut ChaCha8Rng, d: usize) -> Mat {
    KernelOperator::<f64>::ginibre(rng, vec![1.0; d], vec![1.0; d]).expect("unit weights").kernel().clone()
}

/// A trace-preserving UCP map on `M_d` given by its action.
pub(crate) enum UcpMap {
    Schur(Mat),
    Average(Mat),
}

impl UcpMap {
    pub fn random(kind: MazurMapKind, d: usize, rng: &mut ChaCha8Rng) -> Self {
        match kind {
            MazurMapKind::SchurGram => {
                let v = ginibre(rng, d).columns(0, 2).clone_owned();
                let rows: Vec<_> = v.row_iter().map(|r| r.clone_owned() / Complex::new(r.norm(), 0.0)).collect();
                let gram = Mat::from_fn(d, d, |i, j| rows[i].dotc(&rows[j]).conj());
                UcpMap::Schur(gram)
            }
            MazurMapKind::Z2Average => {
                let q = ginibre(rng, d).qr().q();
                let signs = Mat::from_fn(d, d, |i, j| {
                    if i != j {
                        Complex::new(0.0, 0.0)
                    } else if i % 2 == 0 {
                        Complex::new(1.0, 0.0)
                    } else {
                        Complex::new(-1.0, 0.0)
                    }
                });
                UcpMap::Average(&q * signs * q.adjoint())
            }
        }
    }

    pub fn apply(&self, x: &Mat) -> Mat {
        match self {
            UcpMap::Schur(g) => g.component_mul(x),
            UcpMap::Average(u) => (x + u * x * u.adjoint()) * Complex::new(0.5, 0.0),
        }
    }

    /// A fixed point built from `x`.
    pub fn fixed_point(&self, x: &Mat) -> Mat {
        match self {
            UcpMap::Schur(_) => Mat::from_diagonal(&x.diagonal()),
            UcpMap::Average(_) => self.apply(x),
        }
    }

    /// Unitality, trace preservation and positivity on random rank-one
    /// projections.
    pub fn spot_check(&self, d: usize, rng: &mut ChaCha8Rng) -> Result<()> {
        let tol = 1e-10;
        let one = Mat::identity(d, d);
        if (self.apply(&one) - &one).norm() > tol * d as f64 {
            return Err(Error::NotUCP("map is not unital".into()));
        }
        for _ in 0..3 {
            let z = ginibre(rng, d).column(0).clone_owned();
            let proj = &z * z.adjoint();
            let img = self.apply(&proj);
            if (img.trace() - proj.trace()).norm() > tol * proj.trace().norm() {
                return Err(Error::NotUCP("map is not trace preserving".into()));
            }
            let herm = (&img + img.adjoint()) * Complex::new(0.5, 0.0);
            let min = herm.symmetric_eigenvalues().iter().fold(f64::INFINITY, |m, &e| m.min(e));
            if min < -tol * proj.trace().norm() {
                return Err(Error::NotUCP(format!("image of a projection has eigenvalue {min}")));
            }
        }
        Ok(())
    }
}

fn norm(x: &Mat, p: SchattenExponent) -> Result<f64> {
    schatten_norm(&KernelOperator::from_matrix(x.clone()), p)
}

/// `||T(M(x)) - M(x)||_p / (||T(x) - x||_2^theta ||x||_2^(1 - theta))` with
/// `M = M_{2,p}`; `None` when `x` is a fixed point.
pub(crate) fn continuity_ratio(t: &UcpMap, x: &Mat, p: SchattenExponent) -> Result<Option<f64>> {
    let two = SchattenExponent::int(2)?;
    let theta = 0.25 * (p.value_f64() / 2.0).min(2.0 / p.value_f64());
    let mx = mazur_map(&KernelOperator::from_matrix(x.clone()), two, p)?.kernel().clone();
    let num = norm(&(t.apply(&mx) - &mx), p)?;
    let dist = norm(&(t.apply(x) - x), two)?;
    if dist <= 1e-14 * norm(x, two)? {
        return Ok(None);
    }
    Ok(Some(num / (dist.powf(theta) * norm(x, two)?.powf(1.0 - theta))))
}

const EPSILONS: [f64; 4] = [1.0, 1e-1, 1e-2, 1e-3];

pub(super) fn run(id: &str, cfg: &MazurConfig, seed: u64) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &kind in &cfg.maps {
        let label = match kind {
            MazurMapKind::SchurGram => "schur_gram",
            MazurMapKind::Z2Average => "z2_average",
        };
        for &p in &cfg.exponents {
            let ctx = RowCtx::new(id, &format!("M_d/{label}"), 1, format!("(2;{p})"));
            let mut worst = Vec::new();
            for &d in &cfg.dims {
                let mut best: f64 = 0.0;
                for trial in 0..cfg.trials {
                    let mut rng = rng_for(seed, &format!("{label}/{p}/{d}"), trial as u64);
                    let t = UcpMap::random(kind, d, &mut rng);
                    t.spot_check(d, &mut rng)?;
                    let eps = EPSILONS[trial % EPSILONS.len()];
                    let x = t.fixed_point(&ginibre(&mut rng, d)) + ginibre(&mut rng, d) * Complex::new(eps, 0.0);
                    let x = &x / Complex::new(norm(&x, SchattenExponent::int(2)?)?, 0.0);
                    if let Some(r) = continuity_ratio(&t, &x, p)? {
                        best = best.max(r);
                    }
                }
                rows.push(ctx.record(format!("quantity=max_ratio;dim={d}"), best, 0.0));
                worst.push((d, best));
            }
            let find = |d: usize| worst.iter().find(|(k, _)| *k == d).map(|&(_, v)| v);
            if let (Some(small), Some(large)) = (find(cfg.compare.0), find(cfg.compare.1)) {
                rows.push(ctx.check(
                    format!("quantity=max_ratio;check=growth;dims={}..{}", cfg.compare.0, cfg.compare.1),
                    large,
                    cfg.growth * small,
                    0.0,
                ));
            }
        }
    }
    Ok(rows)
}
