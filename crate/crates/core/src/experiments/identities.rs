//! Algebraic identities of Fourier multipliers.
//!
//! On finite groups every identity is checked exactly on random symbols and
//! random elements. On the `ax+b` grid the checks go through compressed
//! kernels.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{AxbIdentitiesConfig, IdentitySuiteConfig, SymbolSpec};
use super::quadrature::{axb_grid, Bump};
use super::random::{random_element, random_tuple, rng_for, symbol_table, table_symbol};
use super::{Row, RowCtx};
use crate::error::{Error, Result};
use crate::fourier::{compressed_fourier_kernel, fourier_apply_finite, kappa_embed, FiniteAlgebraElement, QuadratureAlgebraElement};
use crate::group_model::{Chart, FiniteGroup, GroupPoint, Law, QuadratureGroup, Window};
use crate::ncalgebra::SchattenExponent;
use crate::symbol::Symbol;

type Elem = FiniteAlgebraElement<f64>;

pub(super) fn run_finite(id: &str, cfg: &IdentitySuiteConfig, seed: u64) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for name in &cfg.groups {
        let g = Arc::new(FiniteGroup::from_name(name)?);
        for &n in &cfg.arities {
            let ctx = RowCtx::new(id, g.name(), n, "-");
            let batches: Vec<Vec<Row>> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = rng_for(seed, &format!("{name}/n={n}"), trial as u64);
                    finite_trial(&ctx, &g, n, trial, &cfg.symbol, cfg.tolerance, &mut rng)
                })
                .collect::<Result<_>>()?;
            rows.extend(batches.into_iter().flatten());
        }
    }
    Ok(rows)
}

fn apply(phi: &Symbol<usize, f64>, xs: &[Elem]) -> Result<Elem> {
    let refs: Vec<&Elem> = xs.iter().collect();
    fourier_apply_finite(phi, &refs)
}

fn deviation(a: &Elem, b: &Elem) -> Result<f64> {
    Ok(a.sub(b)?.max_abs())
}

fn fresh_symbol(spec: &SymbolSpec, g: &FiniteGroup, n: usize, rng: &mut ChaCha8Rng) -> Result<Symbol<usize, f64>> {
    let spec = match spec {
        SymbolSpec::Table(_) => &SymbolSpec::Random,
        other => other,
    };
    Ok(table_symbol(g.order(), n, Arc::new(symbol_table(spec, g, n, rng)?)))
}

#[allow(clippy::too_many_arguments)]
fn finite_trial(
    ctx: &RowCtx,
    g: &Arc<FiniteGroup>,
    n: usize,
    trial: usize,
    spec: &SymbolSpec,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Row>> {
    let m = g.order();
    let phi = table_symbol(m, n, Arc::new(symbol_table(spec, g, n, rng)?));
    let xs: Vec<Elem> = (0..n).map(|_| random_element(g, rng)).collect();
    let base = apply(&phi, &xs)?;
    let mut rows = Vec::new();
    let mut push = |name: &str, extra: String, dev: f64| {
        rows.push(ctx.check(format!("identity={name};trial={trial}{extra}"), dev, 0.0, tol));
    };

    // Generators are eigenvectors: T(lambda_{s_1}, .., lambda_{s_n}) = phi(s) lambda_{s_1 .. s_n}.
    let s = random_tuple(m, n, rng);
    let gens: Vec<Elem> = s.iter().map(|&si| Elem::generator(g, si)).collect();
    let expected = Elem::generator(g, g.product(&s)).scale(phi.eval(&s));
    push("generator", String::new(), deviation(&apply(&phi, &gens)?, &expected)?);

    // Translation of the symbol by (r, t, r') at slot i.
    {
        let (r, t, r2) = (rng.random_range(0..m), rng.random_range(0..m), rng.random_range(0..m));
        let i = if n > 1 { rng.random_range(1..n) } else { 0 };
        let (gg, p) = (g.clone(), phi.clone());
        let shifted = Symbol::new(n, move |s: &[usize]| {
            let mut a = s.to_vec();
            a[0] = gg.mul(r, a[0]);
            if i > 0 {
                a[i - 1] = gg.mul(a[i - 1], t);
                a[i] = gg.mul(gg.inv(t), a[i]);
            }
            a[n - 1] = gg.mul(a[n - 1], r2);
            p.eval(&a)
        });
        let lhs = apply(&shifted, &xs)?;
        let mut ys = xs.clone();
        ys[0] = Elem::generator(g, r).mul(&ys[0])?;
        if i > 0 {
            ys[i - 1] = ys[i - 1].mul(&Elem::generator(g, t))?;
            ys[i] = Elem::generator(g, g.inv(t)).mul(&ys[i])?;
        }
        ys[n - 1] = ys[n - 1].mul(&Elem::generator(g, r2))?;
        let rhs = Elem::generator(g, g.inv(r)).mul(&apply(&phi, &ys)?)?.mul(&Elem::generator(g, g.inv(r2)))?;
        push("translation", format!(";slot={i}"), deviation(&lhs, &rhs)?);
    }

    // Multiplying the symbol by a function of one variable composes with a
    // unary multiplier in that slot.
    {
        let i = rng.random_range(0..n);
        let unary = fresh_symbol(spec, g, 1, rng)?;
        let (p, u) = (phi.clone(), unary.clone());
        let product = Symbol::new(n, move |s: &[usize]| p.eval(s) * u.eval(&s[i..=i]));
        let lhs = apply(&product, &xs)?;
        let mut ys = xs.clone();
        ys[i] = apply(&unary, &ys[i..=i])?;
        push("composition", format!(";slot={}", i + 1), deviation(&lhs, &apply(&phi, &ys)?)?);
    }

    // Nested unary multipliers: prod_j phi_j(s_j .. s_n).
    {
        let unaries: Vec<Symbol<usize, f64>> = (0..n).map(|_| fresh_symbol(spec, g, 1, rng)).collect::<Result<_>>()?;
        let (gg, us) = (g.clone(), unaries.clone());
        let nested = Symbol::new(n, move |s: &[usize]| {
            (0..n).fold(Complex::one(), |acc, j| acc * us[j].eval(&[gg.product(&s[j..])]))
        });
        let lhs = apply(&nested, &xs)?;
        let mut inner = apply(&unaries[n - 1], &xs[n - 1..])?;
        for j in (0..n - 1).rev() {
            inner = apply(&unaries[j], &[xs[j].mul(&inner)?])?;
        }
        push("nesting", String::new(), deviation(&lhs, &inner)?);
    }

    // Tensor-product symbols split into products of multipliers.
    if n > 1 {
        let k = rng.random_range(1..n);
        let a = fresh_symbol(spec, g, k, rng)?;
        let b = fresh_symbol(spec, g, n - k, rng)?;
        let lhs = apply(&a.tensor(&b), &xs)?;
        let rhs = apply(&a, &xs[..k])?.mul(&apply(&b, &xs[k..])?)?;
        push("product_split", format!(";split={k}"), deviation(&lhs, &rhs)?);
    }

    // Plancherel: ||lambda(f)||_2 = ||f||_2 under the normalized trace.
    let two = SchattenExponent::int(2)?;
    let l2 = xs[0].lp_norm(two)?;
    let f2 = xs[0].coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    push("plancherel", String::new(), (l2 - f2).abs());

    // Trace pairing and adjoint consistency: tau(T(x) y) from the kernel.
    let y = random_element(g, rng);
    let pair = base.pairing(&y)?;
    let direct = (base.matrix() * y.matrix()).trace() / Complex::new(m as f64, 0.0);
    push("trace_pairing", String::new(), (pair - direct).norm());
    Ok(rows)
}

fn grid_bump(rng: &mut ChaCha8Rng, chart: Chart, center: [f64; 2], radii: [f64; 2]) -> Bump {
    Bump::random(rng, Law::AxPlusB, chart, center, [0.0, 0.0], radii)
}

/// Smooth bounded symbol of `n` variables in `(log a, b)` coordinates.
pub(super) fn smooth_symbol(rng: &mut ChaCha8Rng, n: usize) -> Symbol<GroupPoint, f64> {
    let coef: Vec<[f64; 3]> = (0..n).map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0)]).collect();
    Symbol::new(n, move |s: &[GroupPoint]| {
        let mut phase = 0.0;
        let mut mix = 0.0;
        for (c, p) in coef.iter().zip(s) {
            let (u, b) = (p.a().ln(), p.b());
            phase += c[0] * u + c[1] * b;
            mix += c[2] * (u * b).sin();
        }
        Complex::from_polar((1.0 + 0.5 * mix.tanh()) / 1.5, phase)
    })
}

fn rel_max_dev(a: &crate::ncalgebra::KernelOperator<f64>, b: &crate::ncalgebra::KernelOperator<f64>) -> f64 {
    let scale = b.max_abs_entry().max(f64::MIN_POSITIVE);
    (a.kernel() - b.kernel()).iter().fold(0.0f64, |m, z| m.max(z.norm())) / scale
}

pub(super) fn run_axb(id: &str, cfg: &AxbIdentitiesConfig, seed: u64) -> Result<Vec<Row>> {
    let grid = Arc::new(axb_grid(&cfg.grid, 1)?);
    let window = Window::axb_box((-0.5f64).exp(), 0.5f64.exp(), -1.0, 1.0);
    let support_radii = [0.4, 0.4];
    let mut rows = Vec::new();

    for &n in &cfg.arities {
        let (inputs, tuple) = match n {
            1 => (vec![SchattenExponent::int(2)?], "(2;2)"),
            _ => (vec![SchattenExponent::int(4)?; n], "(4,4;2)"),
        };
        let ctx = RowCtx::new(id, "axb", n, tuple);
        for trial in 0..cfg.trials {
            let mut rng = rng_for(seed, &format!("theta/n={n}"), trial as u64);
            let phi = smooth_symbol(&mut rng, n);
            let bumps: Vec<Bump> = (0..n).map(|_| grid_bump(&mut rng, Chart::LogAB, [0.0, 0.0], support_radii)).collect();
            let xs: Vec<QuadratureAlgebraElement> = bumps
                .iter()
                .zip(&inputs)
                .map(|(b, &p)| kappa_embed(grid.clone(), b.point_fn(), 0.5, p, Some(b.support())))
                .collect::<Result<_>>()?;
            let kernel_at = |theta: f64| -> Result<crate::ncalgebra::KernelOperator<f64>> {
                let presented: Vec<QuadratureAlgebraElement> = xs.iter().map(|x| x.represent(theta)).collect::<Result<_>>()?;
                let refs: Vec<&QuadratureAlgebraElement> = presented.iter().collect();
                compressed_fourier_kernel(&phi, &refs, &window)
            };
            let reference = kernel_at(cfg.thetas.first().copied().unwrap_or(0.0))?;
            for &theta in cfg.thetas.iter().skip(1) {
                let dev = rel_max_dev(&kernel_at(theta)?, &reference);
                rows.push(ctx.check(format!("check=theta_independence;theta={theta};trial={trial}"), dev, 0.0, cfg.theta_tolerance));
            }
        }
    }

    // Delta^z lambda(f) = lambda(Delta^z f) Delta^z, against a direct
    // evaluation of the kernel Delta^z(s) f(s t^-1) Delta(t)^-1.
    let ctx = RowCtx::new(id, "axb", 1, "-");
    let law = Law::AxPlusB;
    for trial in 0..cfg.trials {
        let mut rng = rng_for(seed, "commutation", trial as u64);
        let bump = grid_bump(&mut rng, Chart::LogAB, [0.0, 0.0], support_radii);
        for (num, den) in [(1, 4), (1, 2), (3, 4), (1, 1)] {
            let z = num as f64 / den as f64;
            let p = SchattenExponent::ratio(den, num)?;
            let left = QuadratureAlgebraElement::new(grid.clone(), bump.point_fn(), z, 0.0, p, Some(bump.support()))?;
            let right_f = QuadratureAlgebraElement::modular_weighted(bump.point_fn(), law, z);
            let right = QuadratureAlgebraElement::new(grid.clone(), right_f, 0.0, z, p, Some(bump.support()))?;
            let one = Symbol::constant(1, Complex::one());
            let kl = compressed_fourier_kernel(&one, &[&left], &window)?;
            let kr = compressed_fourier_kernel(&one, &[&right], &window)?;
            let idx = grid.window_indices(&window);
            let pts = grid.points();
            let mut oracle_dev: f64 = 0.0;
            for (i, &si) in idx.iter().enumerate() {
                for (j, &tj) in idx.iter().enumerate() {
                    let (s, t) = (pts[si], pts[tj]);
                    let k = law.modular(s).powf(z) * bump.eval(law.mul(s, law.inv(t))) / law.modular(t);
                    oracle_dev = oracle_dev.max((kl.kernel()[(i, j)] - k).norm());
                }
            }
            let scale = kl.max_abs_entry().max(f64::MIN_POSITIVE);
            rows.push(ctx.check(format!("check=commutation;z={z};trial={trial}"), rel_max_dev(&kl, &kr), 0.0, cfg.exact_tolerance));
            rows.push(ctx.check(format!("check=kernel_oracle;z={z};trial={trial}"), oracle_dev / scale, 0.0, cfg.exact_tolerance));
        }
    }

    rows.extend(plancherel_rows(id, cfg, seed)?);
    Ok(rows)
}

/// `||i_2(lambda(f) Delta^{1/2})||_{S_2}^2` against `||f||_2^2` on nested
/// wedges. The deviation is governed by the Følner ratio and must shrink.
fn plancherel_rows(id: &str, cfg: &AxbIdentitiesConfig, seed: u64) -> Result<Vec<Row>> {
    let ctx = RowCtx::new(id, "axb", 1, "(2;2)");
    let mut depths = cfg.plancherel_depths.clone();
    depths.sort_by(f64::total_cmp);
    let Some(&deepest) = depths.last() else { return Ok(Vec::new()) };
    let r = 0.4;
    let h = cfg.plancherel_spacing;
    let v_max = deepest.exp() + r;
    let lo = [-deepest - r, -v_max];
    let hi = [r, v_max];
    let shape = [((hi[0] - lo[0]) / h).round() as usize, ((hi[1] - lo[1]) / h).round() as usize];
    let grid = Arc::new(QuadratureGroup::make_axb_chart(Chart::LogAShear, lo, hi, shape)?);
    let two = SchattenExponent::int(2)?;
    let law = Law::AxPlusB;
    let mut rows = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = rng_for(seed, "plancherel", trial as u64);
        let bump = Bump::random(&mut rng, law, Chart::LogAShear, [0.0, 0.0], [0.0, 0.0], [r, r]);
        let f2 = grid.haar_integral_real(|s| bump.eval(s).norm_sqr());
        if !(f2 > 0.0) {
            return Err(Error::DegenerateMap("test function vanishes on the grid".into()));
        }
        let x = QuadratureAlgebraElement::new(grid.clone(), bump.point_fn(), 0.0, 0.5, two, Some(bump.support()))?;
        let mut prev = f64::INFINITY;
        for &depth in &depths {
            let w = Window::axb_wedge(-depth, 0.0, depth.exp());
            let k = compressed_fourier_kernel(&Symbol::constant(1, Complex::one()), &[&x], &w)?;
            let mu: f64 = k.row_weights().iter().sum();
            let hs2 = k.materialize().norm_squared() / mu;
            let dev = (hs2 - f2).abs() / f2;
            let probe = GroupPoint::axb((0.5 * r).exp(), 0.5 * r * (0.5 * r).exp());
            let ratio = grid.folner_ratio(probe, &w)?;
            rows.push(ctx.record(format!("check=folner_ratio;depth={depth};trial={trial}"), ratio, 0.0));
            if prev.is_finite() {
                rows.push(ctx.check(format!("check=plancherel_decreasing;depth={depth};trial={trial}"), dev, prev, 0.0));
            } else {
                rows.push(ctx.record(format!("check=plancherel;depth={depth};trial={trial}"), dev, 0.0));
            }
            prev = dev;
        }
    }
    Ok(rows)
}
