//! Compressed Fourier multipliers against Schur multipliers of the
//! compressed inputs, along growing windows.

use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::{IntertwiningConfig, IntertwiningModel};
use super::identities::smooth_symbol;
use super::quadrature::Bump;
use super::random::{rng_for, square};
use super::{Row, RowCtx};
use crate::error::Result;
use crate::fourier::{compress, compress_operator, compressed_fourier_kernel, kappa_embed, PointFn, QuadratureAlgebraElement};
use crate::group_model::{Chart, GroupPoint, Law, QuadratureGroup, Window};
use crate::ncalgebra::{dual_pairing, KernelOperator, SchattenExponent};
use crate::schur::{lift_symbol, schur_apply};
use crate::symbol::Symbol;

/// Everything needed to evaluate both sides on one window.
struct Setup {
    grid: Arc<QuadratureGroup>,
    phi: Symbol<GroupPoint, f64>,
    xs: Vec<QuadratureAlgebraElement>,
    y: QuadratureAlgebraElement,
    output: SchattenExponent,
}

struct Sides {
    lhs: f64,
    /// `|<i_p(T x), i_p'(y)> - <T x, y>|`, only for unimodular models.
    gap: Option<f64>,
}

impl Setup {
    fn evaluate(&self, window: &Window, exact_pairing: Option<Complex<f64>>) -> Result<Sides> {
        let refs: Vec<&QuadratureAlgebraElement> = self.xs.iter().collect();
        let fourier = compress_operator(&compressed_fourier_kernel(&self.phi, &refs, window)?, self.output)?;
        let y = compress(&self.y, window)?;
        let idx = self.grid.window_indices(window);
        let pts: Vec<GroupPoint> = idx.iter().map(|&i| self.grid.points()[i]).collect();
        let lifted = lift_symbol(&self.phi, self.grid.clone()).without_chain();
        let ops: Vec<KernelOperator<f64>> = self.xs.iter().map(|x| compress(x, window)).collect::<Result<_>>()?;
        let op_refs: Vec<&KernelOperator<f64>> = ops.iter().collect();
        let schur = schur_apply(&lifted, &pts, &op_refs)?;
        let pf = dual_pairing(&fourier, &y)?;
        let ps = dual_pairing(&schur, &y)?;
        Ok(Sides { lhs: (pf - ps).norm(), gap: exact_pairing.map(|e| (pf - e).norm()) })
    }
}

fn integer_fn(values: Vec<Complex<f64>>, radius: i64) -> PointFn {
    Arc::new(move |s: GroupPoint| {
        let k = s.a().round() as i64;
        if k.abs() <= radius {
            values[(k + radius) as usize]
        } else {
            Complex::new(0.0, 0.0)
        }
    })
}

fn integer_symbol(rng: &mut ChaCha8Rng, n: usize) -> Symbol<GroupPoint, f64> {
    let alpha: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let beta: f64 = rng.random_range(0.1..0.7);
    Symbol::new(n, move |s: &[GroupPoint]| {
        let phase: f64 = alpha.iter().zip(s).map(|(a, p)| a * p.a()).sum();
        let total: f64 = s.iter().map(|p| p.a()).sum();
        Complex::from_polar((1.0 + 0.5 * (beta * total).cos()) / 1.5, phase)
    })
}

fn exponents(n: usize) -> Result<(Vec<SchattenExponent>, SchattenExponent, &'static str)> {
    Ok(match n {
        1 => (vec![SchattenExponent::int(2)?], SchattenExponent::int(2)?, "(2;2)"),
        _ => (vec![SchattenExponent::int(4)?; 2], SchattenExponent::int(2)?, "(4,4;2)"),
    })
}

fn integer_setup(cfg: &IntertwiningConfig, rng: &mut ChaCha8Rng) -> Result<(Setup, Option<Complex<f64>>, f64)> {
    let n = cfg.arity;
    let kappa = cfg.support.round().max(1.0) as i64;
    let k_max = cfg.windows.iter().fold(0.0f64, |a, &b| a.max(b)).round() as usize;
    let grid = Arc::new(QuadratureGroup::make_integer_segment(k_max + n * kappa as usize + 1)?);
    let (inputs, output, _) = exponents(n)?;
    let support = Window::interval(-(kappa as f64) - 0.5, kappa as f64 + 0.5);
    let tables: Vec<Vec<Complex<f64>>> = (0..=n).map(|_| (0..2 * kappa + 1).map(|_| square(rng)).collect()).collect();
    let phi = integer_symbol(rng, n);
    let xs: Vec<QuadratureAlgebraElement> = (0..n)
        .map(|i| kappa_embed(grid.clone(), integer_fn(tables[i].clone(), kappa), 0.5, inputs[i], Some(support)))
        .collect::<Result<_>>()?;
    let y = kappa_embed(grid.clone(), integer_fn(tables[n].clone(), kappa), 0.5, output.conjugate(), Some(support))?;

    // Sup of the integrand: |phi| <= 1 and the functions are bounded by their tables.
    let sup = |t: &Vec<Complex<f64>>| t.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let m_const: f64 = tables.iter().map(sup).product();
    let bound_scale = m_const * ((2 * kappa + 1) as f64).powi(n as i32) * kappa as f64;

    // tau(T(x) y) for n = 1: sum_k phi(k) f(k) g(-k).
    let exact = (n == 1).then(|| {
        (-kappa..=kappa)
            .map(|k| {
                let p = GroupPoint::scalar(k as f64);
                phi.eval(&[p]) * tables[0][(k + kappa) as usize] * tables[1][(kappa - k) as usize]
            })
            .sum()
    });
    Ok((Setup { grid, phi, xs, y, output }, exact, bound_scale))
}

fn axb_setup(cfg: &IntertwiningConfig, rng: &mut ChaCha8Rng) -> Result<Setup> {
    let n = cfg.arity;
    let r = cfg.support;
    let h = cfg.spacing;
    let deepest = cfg.windows.iter().fold(0.0f64, |a, &b| a.max(b));
    let reach = n as f64 * r;
    let v_max = deepest.exp() * (1.0 + reach * reach.exp()) + h;
    let lo = [-deepest - reach - h, -v_max];
    let hi = [reach + h, v_max];
    let shape = [((hi[0] - lo[0]) / h).ceil() as usize, ((hi[1] - lo[1]) / h).ceil() as usize];
    let grid = Arc::new(QuadratureGroup::make_axb_chart(Chart::LogAShear, lo, hi, shape)?);
    let (inputs, output, _) = exponents(n)?;
    let law = Law::AxPlusB;
    let bump = |rng: &mut ChaCha8Rng| Bump::random(rng, law, Chart::LogAShear, [0.0, 0.0], [0.0, 0.0], [r, r]);
    let xs: Vec<QuadratureAlgebraElement> = (0..n)
        .map(|i| {
            let b = bump(rng);
            kappa_embed(grid.clone(), b.point_fn(), 0.5, inputs[i], Some(b.support()))
        })
        .collect::<Result<_>>()?;
    let yb = bump(rng);
    let y = kappa_embed(grid.clone(), yb.point_fn(), 0.5, output.conjugate(), Some(yb.support()))?;
    let phi = smooth_symbol(rng, n);
    Ok(Setup { grid, phi, xs, y, output })
}

/// Absolute tolerance below which pairings are indistinguishable from
/// rounding noise.
const ROUNDING_FLOOR: f64 = 1e-12;

fn series_rows(
    ctx: &RowCtx,
    quantity: &str,
    trial: usize,
    labels: &[String],
    values: &[f64],
    slack: f64,
    decay: Option<f64>,
) -> Vec<Row> {
    let mut rows = Vec::new();
    for (k, (label, &v)) in labels.iter().zip(values).enumerate() {
        rows.push(ctx.record(format!("quantity={quantity};window={label};trial={trial}"), v, 0.0));
        if k > 0 {
            let prev = values[k - 1];
            rows.push(ctx.check(format!("quantity={quantity};check=non_increasing;window={label};trial={trial}"), v, prev, slack * prev + ROUNDING_FLOOR));
        }
    }
    if let (Some(d), Some(&first), Some(&last)) = (decay, values.first(), values.last()) {
        rows.push(ctx.check(format!("quantity={quantity};check=decay;trial={trial}"), last, d * first, ROUNDING_FLOOR));
    }
    rows
}

pub(super) fn run(id: &str, cfg: &IntertwiningConfig, seed: u64) -> Result<Vec<Row>> {
    let n = cfg.arity;
    let (_, _, tuple) = exponents(n)?;
    let mut windows = cfg.windows.clone();
    windows.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = rng_for(seed, "intertwining", trial as u64);
        match cfg.model {
            IntertwiningModel::Integers => {
                let ctx = RowCtx::new(id, "Z", n, tuple);
                let (setup, exact, bound_scale) = integer_setup(cfg, &mut rng)?;
                let (mut lhs, mut gap, mut labels) = (Vec::new(), Vec::new(), Vec::new());
                for &k in &windows {
                    let k = k.round();
                    let w = Window::interval(-k - 0.5, k + 0.5);
                    let sides = setup.evaluate(&w, exact)?;
                    let folner = 1.0 / (2.0 * k + 1.0);
                    let label = format!("{k}");
                    if n > 1 {
                        let bound = bound_scale * (n - 1) as f64 * folner;
                        rows.push(ctx.check(format!("quantity=lhs;check=folner_bound;window={label};trial={trial}"), sides.lhs, bound, 1e-12));
                    }
                    if let Some(g) = sides.gap {
                        rows.push(ctx.check(format!("quantity=isometry_gap;check=folner_bound;window={label};trial={trial}"), g, bound_scale * folner, 1e-12));
                        gap.push(g);
                    }
                    lhs.push(sides.lhs);
                    labels.push(label);
                }
                rows.extend(series_rows(&ctx, "lhs", trial, &labels, &lhs, cfg.slack, cfg.decay));
                if !gap.is_empty() {
                    rows.extend(series_rows(&ctx, "isometry_gap", trial, &labels, &gap, cfg.slack, cfg.decay));
                }
            }
            IntertwiningModel::Axb => {
                let ctx = RowCtx::new(id, "axb", n, tuple);
                let setup = axb_setup(cfg, &mut rng)?;
                let (mut lhs, mut labels) = (Vec::new(), Vec::new());
                let probe = GroupPoint::axb((0.5 * cfg.support).exp(), 0.5 * cfg.support);
                for &depth in &windows {
                    let w = Window::axb_wedge(-depth, 0.0, depth.exp());
                    let sides = setup.evaluate(&w, None)?;
                    let label = format!("{depth}");
                    rows.push(ctx.record(format!("quantity=folner_ratio;window={label};trial={trial}"), setup.grid.folner_ratio(probe, &w)?, 0.0));
                    lhs.push(sides.lhs);
                    labels.push(label);
                }
                rows.extend(series_rows(&ctx, "lhs", trial, &labels, &lhs, cfg.slack, cfg.decay));
            }
        }
    }
    Ok(rows)
}
