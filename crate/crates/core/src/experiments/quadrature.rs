//! Fidelity of the `ax+b` quadrature: Haar translation laws, inversion and
//! the modular homomorphism, with grid refinement.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;

use super::config::{AxbGrid, FidelityConfig};
use super::random::{rng_for, square};
use super::{Row, RowCtx};
use crate::error::Result;
use crate::fourier::PointFn;
use crate::group_model::{Chart, GroupPoint, Law, QuadratureGroup, Window};

/// Compactly supported tensor bump `(1 - x^2)^3` in chart coordinates,
/// modulated by a plane wave.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Bump {
    pub law: Law,
    pub chart: Chart,
    pub center: [f64; 2],
    pub radii: [f64; 2],
    pub freq: [f64; 2],
    pub amp: Complex<f64>,
}

impl Bump {
    pub fn eval(&self, s: GroupPoint) -> Complex<f64> {
        let c = self.law.chart_coords(self.chart, s);
        let dims = if self.chart == Chart::Line { 1 } else { 2 };
        let mut env = 1.0;
        let mut phase = 0.0;
        for i in 0..dims {
            let d = c[i] - self.center[i];
            let x = d / self.radii[i];
            if x.abs() >= 1.0 {
                return Complex::new(0.0, 0.0);
            }
            env *= (1.0 - x * x).powi(3);
            phase += self.freq[i] * d;
        }
        self.amp * Complex::from_polar(env, phase)
    }

    pub fn support(&self) -> Window {
        Window {
            chart: self.chart,
            lo: [self.center[0] - self.radii[0], self.center[1] - self.radii[1]],
            hi: [self.center[0] + self.radii[0], self.center[1] + self.radii[1]],
        }
    }

    pub fn point_fn(self) -> PointFn {
        Arc::new(move |s| self.eval(s))
    }

    /// Random bump centred within `spread` of `center`.
    pub fn random(
        rng: &mut impl Rng,
        law: Law,
        chart: Chart,
        center: [f64; 2],
        spread: [f64; 2],
        radii: [f64; 2],
    ) -> Self {
        let c = [center[0] + jitter(rng, spread[0]), center[1] + jitter(rng, spread[1])];
        let freq = [rng.random_range(-1.0..=1.0) * TAU / (4.0 * radii[0]), rng.random_range(-1.0..=1.0) * TAU / (4.0 * radii[1])];
        Bump { law, chart, center: c, radii, freq, amp: square(rng) + Complex::new(1.5, 0.0) }
    }
}

fn jitter(rng: &mut impl Rng, w: f64) -> f64 {
    if w > 0.0 {
        rng.random_range(-w..=w)
    } else {
        0.0
    }
}

pub(crate) fn axb_grid(g: &AxbGrid, refine: usize) -> Result<QuadratureGroup> {
    QuadratureGroup::make_axb(g.log_r.exp(), g.s, g.n_a * refine, g.n_b * refine)
}

fn relative(a: Complex<f64>, b: Complex<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

/// Relative errors of the three translation laws for `f` and `t`.
fn law_errors(q: &QuadratureGroup, f: &Bump, t: GroupPoint) -> [f64; 3] {
    let law = q.law();
    let base = q.haar_integral(|s| f.eval(s));
    let left = q.haar_integral(|s| f.eval(law.mul(t, s)));
    let right = q.haar_integral(|s| f.eval(law.mul(s, t))) * law.modular(t);
    let inv = q.haar_integral(|s| {
        let si = law.inv(s);
        f.eval(si) * law.modular(si)
    });
    [relative(left, base), relative(right, base), relative(inv, base)]
}

const LAWS: [&str; 3] = ["left_invariance", "right_translation", "inversion"];

pub(super) fn run(id: &str, cfg: &FidelityConfig, seed: u64) -> Result<Vec<Row>> {
    let coarse = axb_grid(&cfg.grid, 1)?;
    let fine = axb_grid(&cfg.grid, cfg.refine)?;
    let ctx = RowCtx::new(id, "axb", 0, "-");
    let law = Law::AxPlusB;
    let mut rows = Vec::new();

    let mut rng = rng_for(seed, "modular", 0);
    let (lr, s) = (cfg.grid.log_r, cfg.grid.s);
    for trial in 0..cfg.trials {
        let p = GroupPoint::axb(rng.random_range(-lr..=lr).exp(), rng.random_range(-s..=s));
        let q = GroupPoint::axb(rng.random_range(-lr..=lr).exp(), rng.random_range(-s..=s));
        let hom = (law.modular(law.mul(p, q)) - law.modular(p) * law.modular(q)).abs() / law.modular(law.mul(p, q));
        let inv = (law.modular(law.inv(p)) * law.modular(p) - 1.0).abs();
        let dev = hom.max(inv);
        rows.push(ctx.check(format!("check=modular_homomorphism;trial={trial}"), dev, 0.0, cfg.modular_tolerance));
    }

    let mut worst = [[0.0f64; 3]; 2];
    let mut rng = rng_for(seed, "bumps", 0);
    for trial in 0..cfg.trials {
        let f = Bump::random(&mut rng, law, Chart::LogAB, [0.0, 0.0], [0.3, 0.5], [0.5, 1.0]);
        let t = GroupPoint::axb(rng.random_range(-0.3..=0.3f64).exp(), rng.random_range(-0.3..=0.3));
        let ec = law_errors(&coarse, &f, t);
        let ef = law_errors(&fine, &f, t);
        for k in 0..3 {
            worst[0][k] = worst[0][k].max(ec[k]);
            worst[1][k] = worst[1][k].max(ef[k]);
            rows.push(ctx.check(format!("check={};grid=coarse;trial={trial}", LAWS[k]), ec[k], 0.0, cfg.tolerance));
            rows.push(ctx.record(format!("check={};grid=fine;trial={trial}", LAWS[k]), ef[k], 0.0));
        }
    }
    for k in 0..3 {
        rows.push(ctx.check(format!("check={};refinement=worst_fine_vs_half_worst_coarse", LAWS[k]), worst[1][k], 0.5 * worst[0][k], 0.0));
    }

    let exact = (lr.exp() - (-lr).exp()) * 2.0 * s;
    let mass = |q: &QuadratureGroup| (q.weights().iter().sum::<f64>() - exact).abs() / exact;
    let (mc, mf) = (mass(&coarse), mass(&fine));
    rows.push(ctx.check("check=total_mass;grid=coarse", mc, 0.0, cfg.tolerance));
    rows.push(ctx.check("check=total_mass;refinement=fine_vs_half_coarse", mf, 0.5 * mc, 0.0));
    Ok(rows)
}
