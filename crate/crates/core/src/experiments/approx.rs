//! `h_V^{2/q}` as an approximate identity for a Fourier multiplier on a
//! cyclic group.

use std::sync::Arc;

use num_complex::Complex;

use super::config::ApproxIdentityConfig;
use super::{Row, RowCtx};
use crate::error::Result;
use crate::fourier::{h_v_finite, lambda_of};
use crate::group_model::FiniteGroup;

pub(super) fn run(id: &str, cfg: &ApproxIdentityConfig) -> Result<Vec<Row>> {
    let m = cfg.order;
    let g = Arc::new(FiniteGroup::make_cyclic(m));
    let psi: Vec<f64> = (0..m).map(|k| (std::f64::consts::TAU * cfg.frequency * k as f64 / m as f64).cos()).collect();
    let mut rows = Vec::new();
    for (p, q) in &cfg.pairs {
        let ctx = RowCtx::new(id, g.name(), 1, format!("({p};{q})"));
        let mut values = Vec::new();
        for &r in &cfg.radii {
            let v: Vec<usize> = (0..=r).chain((1..=r).map(|k| m - k)).collect();
            let h = h_v_finite::<f64>(&g, &v, *q)?;
            let norm_h = h.lp_norm(*q)?;
            rows.push(ctx.check(format!("quantity=unit_norm;radius={r}"), (norm_h - 1.0).abs(), 0.0, 1e-9));
            let diff: Vec<Complex<f64>> = h.coeffs().iter().zip(&psi).map(|(c, &s)| c * (s - psi[0])).collect();
            let value = lambda_of(&g, diff)?.lp_norm(*q)?;
            rows.push(ctx.record(format!("quantity=defect;radius={r}"), value, 0.0));
            values.push(value);
        }
        if let (Some(&first), Some(&last)) = (values.first(), values.last()) {
            rows.push(ctx.check("quantity=defect;check=decay", last, cfg.decay * first, 0.0));
        }
    }
    Ok(rows)
}
