mod common;

use std::path::PathBuf;
use std::time::Instant;

use common::{hadamard_oracle_inf, hadamard_oracle_one, hadamard_oracle_two, sign_matrices, C};
use nalgebra::DMatrix;
use ncml::experiments::{run_suite, Report, Row, SuiteConfig, Verdict};
use ncml::ncalgebra::{mazur_map, schatten_norm, KernelOperator, SchattenExponent};
use ncml::norms::{multilinear_norm_estimate, ClosureMap, EstimatorOptions, HolderTuple, SchurMultiplierMap};
use ncml::schur::DenseSymbol;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn report<'a>(reports: &'a [Report], id: &str) -> &'a Report {
    reports.iter().find(|r| r.id == id).unwrap_or_else(|| panic!("missing experiment {id}"))
}

fn asserted<'a>(r: &'a Report, pred: impl Fn(&Row) -> bool + 'a) -> impl Iterator<Item = &'a Row> + 'a {
    r.rows.iter().filter(move |row| row.pass != Verdict::Record && pred(row))
}

/// All selected asserted rows pass, their verdicts agree with the stored numbers, and at least one exists.
fn rows_ok(r: &Report, pred: impl Fn(&Row) -> bool) -> (bool, usize) {
    let rows: Vec<&Row> = asserted(r, pred).collect();
    let ok = !rows.is_empty() && rows.iter().all(|row| row.pass == Verdict::Pass && row.recomputed() == Verdict::Pass);
    (ok, rows.len())
}

fn max_value(r: &Report, pred: impl Fn(&Row) -> bool) -> f64 {
    asserted(r, pred).map(|row| row.value).fold(0.0, f64::max)
}

fn exp(s: &str) -> SchattenExponent {
    s.parse().unwrap()
}

fn identity_suite(reports: &[Report]) -> Outcome {
    let r = report(reports, "identity_finite");
    let (ok, count) = rows_ok(r, |_| true);
    let groups = ["Z4", "Z6", "S3"].iter().all(|g| r.rows.iter().any(|row| row.group == *g));
    let arities = (1..=3).all(|n| r.rows.iter().any(|row| row.n == n));
    let trials = r.rows.iter().filter_map(|row| row.param("trial")).filter_map(|t| t.parse::<usize>().ok()).max();
    let worst = max_value(r, |_| true);
    outcome(
        ok && groups && arities && trials == Some(49) && worst <= 1e-9 && r.seconds <= 60.0,
        format!("{count} rows, max deviation {worst:.2e}, {:.1}s", r.seconds),
    )
}

fn theta_independence(reports: &[Report]) -> Outcome {
    let r = report(reports, "identity_axb");
    let theta = |row: &Row| row.param("check") == Some("theta_independence");
    let (ok, count) = rows_ok(r, theta);
    let worst = max_value(r, theta);
    let thetas = asserted(r, theta).filter(|row| row.tolerance <= 1e-6).count() == count;
    outcome(
        ok && thetas && worst <= 1e-6 && r.seconds <= 120.0,
        format!("{count} rows on the 24x24 grid, max relative deviation {worst:.2e}, {:.1}s", r.seconds),
    )
}

fn quadrature(reports: &[Report]) -> Outcome {
    let r = report(reports, "quadrature_fidelity");
    let modular = |row: &Row| row.param("check") == Some("modular_homomorphism");
    let coarse = |row: &Row| row.param("grid") == Some("coarse");
    let refined = |row: &Row| row.param("refinement").is_some();
    let (m_ok, _) = rows_ok(r, modular);
    let (c_ok, _) = rows_ok(r, coarse);
    let (f_ok, f_count) = rows_ok(r, refined);
    let (m, c) = (max_value(r, modular), max_value(r, coarse));
    let ratio = asserted(r, refined).map(|row| row.value / (2.0 * row.bound)).fold(0.0, f64::max);
    outcome(
        m_ok && c_ok && f_ok && f_count >= 2 && m <= 1e-12 && c <= 1e-3,
        format!("modular {m:.1e}, laws {c:.1e}, worst fine/coarse {ratio:.3}"),
    )
}

fn estimator() -> Outcome {
    let opts = EstimatorOptions { restarts: 16, seed: 7, ..Default::default() };
    let mut worst_had: f64 = 0.0;
    let oracles: [(&str, fn(&DMatrix<C>) -> f64); 3] =
        [("inf", hadamard_oracle_inf), ("1", hadamard_oracle_one), ("2", hadamard_oracle_two)];
    for (p, oracle) in oracles {
        let ht = HolderTuple::new(vec![exp(p)], exp(p)).unwrap();
        for m in sign_matrices() {
            let data: Vec<C> = (0..4).map(|k| m[(k / 2, k % 2)]).collect();
            let map = SchurMultiplierMap::new(DenseSymbol::new(2, 2, data).unwrap(), vec![1.0, 1.0]).unwrap();
            let est = multilinear_norm_estimate(&map, &ht, &opts).unwrap();
            worst_had = worst_had.max((est.value - oracle(&m)).abs());
        }
    }
    let mut worst_id: f64 = 0.0;
    for p in ["1", "4/3", "2", "4", "inf"] {
        let ht = HolderTuple::new(vec![exp(p)], exp(p)).unwrap();
        let id = ClosureMap::new(vec![(vec![1.0; 4], vec![0.5, 1.0, 1.5, 2.0])], |xs: &[&KernelOperator<f64>]| Ok(xs[0].clone()));
        worst_id = worst_id.max((multilinear_norm_estimate(&id, &ht, &opts).unwrap().value - 1.0).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_mazur: f64 = 0.0;
    for k in 0..100 {
        let (r, c) = (2 + k % 5, 2 + (k / 5) % 4);
        let a = KernelOperator::<f64>::ginibre(&mut rng, vec![1.0; r], vec![1.0; c]).unwrap();
        let p = [exp("1"), exp("4/3"), exp("3"), exp("4")][k % 4];
        let lhs = schatten_norm(&mazur_map(&a, exp("2"), p).unwrap(), p).unwrap();
        let rhs = schatten_norm(&a, exp("2")).unwrap().powf(2.0 / p.value_f64());
        worst_mazur = worst_mazur.max((lhs - rhs).abs() / rhs.max(1.0));
    }
    outcome(
        worst_had <= 1e-3 && worst_id <= 1e-8 && worst_mazur <= 1e-10,
        format!("hadamard gap {worst_had:.1e}, identity gap {worst_id:.1e}, mazur gap {worst_mazur:.1e}"),
    )
}

fn transference(reports: &[Report]) -> Outcome {
    let r = report(reports, "transference");
    let (ok, count) = rows_ok(r, |row| row.param("direction").is_some());
    let directions = ["fourier_le_schur", "schur_le_fourier"]
        .iter()
        .all(|d| asserted(r, |row| row.param("direction") == Some(d)).count() > 0);
    let slack = asserted(r, |row| row.param("direction").is_some()).all(|row| row.tolerance <= 0.05 * row.bound + 1e-15);
    outcome(ok && directions && slack && r.seconds <= 300.0, format!("{count} comparisons, {:.1}s", r.seconds))
}

fn series(r: &Report, quantity: &str) -> Vec<f64> {
    r.rows
        .iter()
        .filter(|row| row.pass == Verdict::Record && row.param("quantity") == Some(quantity) && row.param("trial") == Some("0"))
        .map(|row| row.value)
        .collect()
}

fn intertwining(reports: &[Report]) -> Outcome {
    let z = report(reports, "intertwining_z_n1");
    let axb = report(reports, "intertwining_axb_n2");
    let (z_ok, _) = rows_ok(z, |row| row.param("quantity") == Some("lhs"));
    let (gap_ok, _) = rows_ok(z, |row| row.param("quantity") == Some("isometry_gap"));
    let (a_ok, _) = rows_ok(axb, |row| row.param("check") == Some("non_increasing"));
    let lhs = series(z, "lhs");
    let gap = series(z, "isometry_gap");
    let gap_ratio = gap.last().unwrap_or(&f64::NAN) / gap.first().unwrap_or(&f64::NAN);
    let lhs_max = lhs.iter().copied().fold(0.0, f64::max);
    outcome(
        z_ok && gap_ok && a_ok && lhs.len() == 4 && z.seconds <= 120.0 && axb.seconds <= 120.0,
        format!(
            "Z n=1 lhs max {lhs_max:.1e} (vanishes up to rounding), isometry gap ratio {gap_ratio:.3}; axb n=2 {:.1}s",
            axb.seconds
        ),
    )
}

fn approx_identity(reports: &[Report]) -> Outcome {
    let r = report(reports, "approx_identity");
    let (ok, _) = rows_ok(r, |_| true);
    let decay = asserted(r, |row| row.param("check") == Some("decay"))
        .map(|row| row.value / (10.0 * row.bound))
        .fold(0.0, f64::max);
    outcome(ok && r.seconds <= 30.0, format!("worst final/initial {decay:.3}, {:.1}s", r.seconds))
}

fn mazur(reports: &[Report]) -> Outcome {
    let r = report(reports, "mazur_continuity");
    let (ok, count) = rows_ok(r, |row| row.param("check") == Some("growth"));
    let dims = (2..=16).all(|d| r.rows.iter().any(|row| row.param("dim") == Some(&d.to_string())));
    let exps = ["(2;4/3)", "(2;4)"].iter().all(|t| r.rows.iter().any(|row| row.p_tuple == *t));
    let worst = asserted(r, |row| row.param("check") == Some("growth")).map(|row| row.value / row.bound * 2.0).fold(0.0, f64::max);
    outcome(ok && dims && exps && r.seconds <= 120.0, format!("{count} growth checks, worst max16/max4 {worst:.3}, {:.1}s", r.seconds))
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn reproducible(first: &[Report], second: &[Report]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut same_shape = first.len() == second.len();
    for (a, b) in first.iter().zip(second) {
        same_shape &= a.id == b.id && a.rows.len() == b.rows.len();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            same_shape &= x.experiment == y.experiment
                && x.group == y.group
                && x.n == y.n
                && x.p_tuple == y.p_tuple
                && x.parameter == y.parameter
                && x.pass == y.pass;
            worst = worst.max(rel(x.value, y.value)).max(rel(x.bound, y.bound)).max(rel(x.tolerance, y.tolerance));
        }
    }
    let rows: usize = first.iter().map(|r| r.rows.len()).sum();
    outcome(same_shape && worst <= 1e-12, format!("{rows} rows, max relative difference {worst:.1e}"))
}

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml");
    let cfg = SuiteConfig::load(&path).expect("default config");
    let start = Instant::now();
    let first = run_suite(&cfg, None).expect("first run");
    let first_seconds = start.elapsed().as_secs_f64();
    let second = run_suite(&cfg, None).expect("second run");

    let mut results = vec![
        ("1 identity suite", identity_suite(&first)),
        ("2 theta independence", theta_independence(&first)),
        ("3 quadrature fidelity", quadrature(&first)),
        ("4 norm estimator", estimator()),
        ("5 transference", transference(&first)),
        ("6 intertwining", intertwining(&first)),
        ("7 approximate identity", approx_identity(&first)),
        ("8 mazur continuity", mazur(&first)),
        ("9 reproducibility", reproducible(&first, &second)),
    ];
    results.push(("full suite runtime", outcome(first_seconds <= 600.0, format!("{first_seconds:.1}s"))));

    let mut failed = 0;
    for (name, o) in &results {
        println!("{} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.ok);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
