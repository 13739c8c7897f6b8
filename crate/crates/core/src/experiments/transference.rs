//! Fourier multipliers against their Schur liftings, and restriction to
//! subgroups, through multiplicatively bounded norm estimates.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use super::config::{RestrictionConfig, TransferenceConfig};
use super::random::{derive_seed, restrict_table, rng_for, symbol_table};
use super::{Row, RowCtx};
use crate::error::Result;
use crate::group_model::FiniteGroup;
use crate::norms::{mb_norm_lower_bound, EstimatorOptions, FourierMultiplierMap, HolderTuple, MultilinearMap, SchurMultiplierMap};
use crate::schur::DenseSymbol;

/// Tabulates `phi~(s_0..s_n) = phi(s_0 s_1^-1, .., s_{n-1} s_n^-1)`.
pub(crate) fn lifted_table(g: &FiniteGroup, table: &[Complex<f64>], n: usize) -> Result<DenseSymbol<f64>> {
    let m = g.order();
    let data = (0..m.pow(n as u32 + 1))
        .map(|mut flat| {
            let mut s = vec![0; n + 1];
            for j in (0..=n).rev() {
                s[j] = flat % m;
                flat /= m;
            }
            let idx = (0..n).fold(0, |acc, i| acc * m + g.mul(s[i], g.inv(s[i + 1])));
            table[idx]
        })
        .collect();
    DenseSymbol::new(n + 1, m, data)
}

/// Largest estimate over the amplification levels, with per-level values.
fn best_over_levels(
    map: &dyn MultilinearMap<f64>,
    ht: &HolderTuple,
    levels: &[usize],
    opts: &EstimatorOptions,
) -> Result<(f64, Vec<f64>)> {
    let per: Vec<f64> = levels.iter().map(|&l| mb_norm_lower_bound(map, ht, l, opts).map(|e| e.value)).collect::<Result<_>>()?;
    Ok((per.iter().copied().fold(0.0, f64::max), per))
}

fn opts_for(base: &EstimatorOptions, seed: u64, tag: &str, index: u64) -> EstimatorOptions {
    EstimatorOptions { seed: derive_seed(seed, tag, index), ..base.clone() }
}

pub(super) fn run_transference(id: &str, cfg: &TransferenceConfig, seed: u64, base: &EstimatorOptions) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let tuples = cfg.tuples.iter().map(|t| (t, false)).chain(cfg.record_tuples.iter().map(|t| (t, true)));
    let tuples: Vec<(&HolderTuple, bool)> = tuples.collect();
    for name in &cfg.groups {
        let g = Arc::new(FiniteGroup::from_name(name)?);
        let m = g.order();
        for &(ht, record_only) in &tuples {
            let n = ht.n();
            let ctx = RowCtx::new(id, g.name(), n, ht.to_string());
            let per_symbol = (0..cfg.symbols)
                .into_par_iter()
                .map(|j| -> Result<Vec<Row>> {
                    let mut out = Vec::new();
                    let tag = format!("{name}/{ht}");
                    let mut rng = rng_for(seed, &tag, j as u64);
                    let table = symbol_table(&cfg.symbol, &g, n, &mut rng)?;
                    let fourier = FourierMultiplierMap::new(g.clone(), table.clone(), n)?;
                    let schur = SchurMultiplierMap::new(lifted_table(&g, &table, n)?, vec![1.0; m])?;
                    let (est_f, per_f) = best_over_levels(&fourier, ht, &cfg.levels, &opts_for(base, seed, &format!("{tag}/fourier"), j as u64))?;
                    let (est_s, per_s) = best_over_levels(&schur, ht, &cfg.levels, &opts_for(base, seed, &format!("{tag}/schur"), j as u64))?;
                    for (k, &level) in cfg.levels.iter().enumerate() {
                        out.push(ctx.record(format!("symbol={j};level={level};side=fourier"), per_f[k], 0.0));
                        out.push(ctx.record(format!("symbol={j};level={level};side=schur"), per_s[k], 0.0));
                    }
                    let pairs = [("schur_le_fourier", est_s, est_f), ("fourier_le_schur", est_f, est_s)];
                    for (dir, value, bound) in pairs {
                        let param = format!("symbol={j};direction={dir}");
                        out.push(if record_only {
                            ctx.record(param, value, bound)
                        } else {
                            ctx.check(param, value, bound, cfg.delta * bound)
                        });
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?;
            rows.extend(per_symbol.into_iter().flatten());
        }
    }
    Ok(rows)
}

pub(super) fn run_restriction(id: &str, cfg: &RestrictionConfig, seed: u64, base: &EstimatorOptions) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for pair in &cfg.pairs {
        let g = Arc::new(FiniteGroup::from_name(&pair.group)?);
        let sub = g.subgroup(&pair.subgroup)?;
        let h = Arc::new(sub.group.clone());
        let label = format!("{}>{:?}", g.name(), sub.embedding);
        for ht in &cfg.tuples {
            let n = ht.n();
            let ctx = RowCtx::new(id, &label, n, ht.to_string());
            let per_symbol = (0..cfg.symbols)
                .into_par_iter()
                .map(|j| -> Result<Row> {
                    let tag = format!("{label}/{ht}");
                    let mut rng = rng_for(seed, &tag, j as u64);
                    let table = symbol_table(&cfg.symbol, &g, n, &mut rng)?;
                    let restricted = restrict_table(&table, g.order(), n, &sub.embedding);
                    let on_g = FourierMultiplierMap::new(g.clone(), table, n)?;
                    let on_h = FourierMultiplierMap::new(h.clone(), restricted, n)?;
                    let (est_g, _) = best_over_levels(&on_g, ht, &cfg.levels, &opts_for(base, seed, &format!("{tag}/G"), j as u64))?;
                    let (est_h, _) = best_over_levels(&on_h, ht, &cfg.levels, &opts_for(base, seed, &format!("{tag}/H"), j as u64))?;
                    Ok(ctx.check(format!("symbol={j};direction=subgroup_le_group"), est_h, est_g, cfg.delta * est_g))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.extend(per_symbol);
        }
    }
    Ok(rows)
}
