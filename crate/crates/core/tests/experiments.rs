use std::path::PathBuf;
use std::process::Command;

use ncml::experiments::{
    config_hash, csv_string, derive_seed, experiment_kinds, json_string, run_experiment, run_suite, write_outputs,
    ExperimentSpec, OutputFormat, Row, SuiteConfig, Verdict,
};

fn default_config_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml")
}

const SMALL: &str = r#"
seed = 7

[estimator]
restarts = 3
max_iters = 60

[experiment.ids]
kind = "identity_suite"
groups = ["Z4", "S3"]
arities = [1, 2]
trials = 3

[experiment.transfer]
kind = "transference"
groups = ["Z4"]
tuples = ["(inf;inf)", "(2;2)"]
record_tuples = ["(1;1)"]
symbols = 2
levels = [1, 2]

[experiment.restrict]
kind = "restriction"
pairs = [{ group = "Z4", subgroup = [0, 2] }]
symbols = 2
levels = [1]

[experiment.z_chain]
kind = "intertwining"
model = "integers"
arity = 2
windows = [4, 8, 16]
support = 2
decay = 0.5

[experiment.approx]
kind = "approx_identity"
order = 32
radii = [8, 4, 2, 1]
decay = 0.5

[experiment.mazur]
kind = "mazur_continuity"
dims = [2, 3, 4]
trials = 4
compare = [2, 4]
growth = 3.0
"#;

fn small() -> SuiteConfig {
    SuiteConfig::from_toml(SMALL).unwrap()
}

fn rows_consistent(rows: &[Row]) {
    for r in rows {
        assert_eq!(r.recomputed(), r.pass, "{r:?}");
        assert!(r.value.is_finite() && r.bound.is_finite() && r.tolerance.is_finite(), "{r:?}");
    }
}

#[test]
fn default_config_covers_every_kind() {
    let cfg = SuiteConfig::load(&default_config_path()).unwrap();
    let kinds: std::collections::BTreeSet<&str> = cfg.experiment.values().map(ExperimentSpec::kind).collect();
    let all: std::collections::BTreeSet<&str> = experiment_kinds().iter().map(|(k, _)| *k).collect();
    assert_eq!(kinds, all);
    assert_eq!(cfg.seed, 20240601);
    assert_eq!(cfg.estimator.restarts, 16);
    assert_eq!(cfg.estimator.max_iters, 200);
}

#[test]
fn canonical_toml_round_trips_with_the_same_hash() {
    let cfg = SuiteConfig::load(&default_config_path()).unwrap();
    let again = SuiteConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(config_hash(&cfg).unwrap(), config_hash(&again).unwrap());
    let mut other = again.clone();
    other.seed += 1;
    assert_ne!(config_hash(&cfg).unwrap(), config_hash(&other).unwrap());
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        "seeds = 3",
        "[estimator]\nmax_iter = 5",
        "[estimator]\nrestarts = 0",
        "[experiment.a]\nkind = \"nope\"",
        "[experiment.a]\nkind = \"identity_suite\"\ngroups = [\"Q8\"]",
        "[experiment.a]\nkind = \"identity_suite\"\ntrails = 3",
        "[experiment.a]\nkind = \"transference\"\ntuples = [\"(3,3;2)\"]",
        "[experiment.a]\nkind = \"transference\"\ntuples = [\"(3,3,3;1)\"]",
        "[experiment.a]\nkind = \"transference\"\nlevels = [0]",
        "[experiment.a]\nkind = \"intertwining\"\nmodel = \"integers\"\narity = 3\nwindows = [1, 2]",
        "[experiment.a]\nkind = \"intertwining\"\nmodel = \"integers\"\narity = 1\nwindows = [1]",
        "[experiment.a]\nkind = \"approx_identity\"\norder = 8\nradii = [4]",
        "[experiment.a]\nkind = \"approx_identity\"\npairs = [[\"2\", \"4\"]]",
        "[experiment.a]\nkind = \"axb_identities\"\nthetas = [1.5]",
        "[experiment.a]\nkind = \"mazur_continuity\"\ndims = [1]",
        "[experiment.a]\nkind = \"quadrature_fidelity\"\nrefine = 1",
    ];
    for text in bad {
        assert!(SuiteConfig::from_toml(text).is_err(), "accepted: {text}");
    }
}

#[test]
fn seeds_are_derived_deterministically() {
    assert_eq!(derive_seed(1, "a", 0), derive_seed(1, "a", 0));
    assert_ne!(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
    assert_ne!(derive_seed(1, "a", 0), derive_seed(2, "a", 0));
    assert_ne!(derive_seed(1, "ab", 0), derive_seed(1, "a", 0));
}

#[test]
fn verdicts_are_pure_functions_of_the_row() {
    let mut row = Row {
        experiment: "e".into(),
        group: "Z4".into(),
        n: 1,
        p_tuple: "(2;2)".into(),
        parameter: "symbol=3;direction=up".into(),
        value: 1.05,
        bound: 1.0,
        tolerance: 0.05,
        pass: Verdict::Pass,
    };
    assert_eq!(row.recomputed(), Verdict::Pass);
    row.value = 1.0500001;
    assert_eq!(row.recomputed(), Verdict::Fail);
    row.pass = Verdict::Record;
    assert_eq!(row.recomputed(), Verdict::Record);
    assert_eq!(row.param("symbol"), Some("3"));
    assert_eq!(row.param("direction"), Some("up"));
    assert_eq!(row.param("missing"), None);
}

#[test]
fn small_suite_runs_and_passes() {
    let cfg = small();
    let reports = run_suite(&cfg, None).unwrap();
    assert_eq!(reports.len(), cfg.experiment.len());
    for r in &reports {
        rows_consistent(&r.rows);
        assert!(!r.rows.is_empty(), "{}", r.id);
        let failures: Vec<_> = r.failures().collect();
        assert!(failures.is_empty(), "{}: {failures:?}", r.id);
    }
    let transfer = reports.iter().find(|r| r.id == "transfer").unwrap();
    assert!(transfer.rows.iter().any(|r| r.p_tuple == "(1;1)" && r.pass == Verdict::Record));
    assert!(transfer.rows.iter().filter(|r| r.p_tuple == "(1;1)").all(|r| r.pass == Verdict::Record));
}

#[test]
fn only_filter_selects_experiments() {
    let cfg = small();
    let only = vec!["approx".to_string(), "mazur".to_string()];
    let reports = run_suite(&cfg, Some(&only)).unwrap();
    let ids: Vec<_> = reports.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids, ["approx", "mazur"]);
}

#[test]
fn identical_configs_give_identical_rows() {
    let cfg = small();
    let only = vec!["ids".to_string(), "transfer".to_string(), "z_chain".to_string()];
    let a = run_suite(&cfg, Some(&only)).unwrap();
    let b = run_suite(&cfg, Some(&only)).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(csv_string(&x.rows).unwrap(), csv_string(&y.rows).unwrap());
    }
    let mut reseeded = cfg.clone();
    reseeded.seed = 8;
    let c = run_experiment("ids", &reseeded.experiment["ids"], &reseeded).unwrap();
    assert_ne!(csv_string(&a[0].rows).unwrap(), csv_string(&c.rows).unwrap());
}

#[test]
fn small_axb_experiments_pass() {
    let text = r#"
[experiment.axb]
kind = "axb_identities"
arities = [1, 2]
thetas = [0.0, 0.5, 1.0]
trials = 1
plancherel_depths = [0.5, 1.0]
grid = { log_r = 1.0, s = 2.5, n_a = 16, n_b = 16 }

[experiment.fid]
kind = "quadrature_fidelity"
trials = 2
"#;
    let cfg = SuiteConfig::from_toml(text).unwrap();
    for r in run_suite(&cfg, None).unwrap() {
        rows_consistent(&r.rows);
        let failures: Vec<_> = r.failures().collect();
        assert!(failures.is_empty(), "{}: {failures:?}", r.id);
    }
}

#[test]
fn failing_rows_are_reported_as_failures() {
    let text = "[experiment.a]\nkind = \"approx_identity\"\norder = 32\nradii = [8, 4]\ndecay = 1e-6";
    let cfg = SuiteConfig::from_toml(text).unwrap();
    let r = run_experiment("a", &cfg.experiment["a"], &cfg).unwrap();
    assert!(!r.all_pass());
    rows_consistent(&r.rows);
}

#[test]
fn outputs_and_manifest_are_written() {
    let cfg = small();
    let only = vec!["ids".to_string(), "approx".to_string()];
    let reports = run_suite(&cfg, Some(&only)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_outputs(dir.path(), &cfg, &reports, OutputFormat::Csv).unwrap();
    assert_eq!(manifest.experiments.len(), 2);
    assert_eq!(manifest.base_seed, 7);
    assert_eq!(manifest.config_hash, config_hash(&cfg).unwrap());

    let text = std::fs::read_to_string(dir.path().join("ids.csv")).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["experiment", "group", "n", "p_tuple", "parameter", "value", "bound", "tolerance", "pass"]);
    let records: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>().unwrap();
    assert_eq!(records.len(), reports[1].rows.len());
    for (rec, row) in records.iter().zip(&reports[1].rows) {
        assert_eq!(&rec[0], row.experiment);
        assert_eq!(&rec[4], row.parameter);
        assert_eq!(rec[5].parse::<f64>().unwrap().to_bits(), row.value.to_bits());
        assert_eq!(rec[6].parse::<f64>().unwrap().to_bits(), row.bound.to_bits());
        assert_eq!(rec[7].parse::<f64>().unwrap().to_bits(), row.tolerance.to_bits());
    }

    let manifest_text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&manifest_text).unwrap();
    assert_eq!(value["crate_name"], "ncml-core");
    assert_eq!(value["experiments"].as_array().unwrap().len(), 2);

    let json = json_string(&reports[0].rows).unwrap();
    let back: Vec<Row> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, reports[0].rows);
    assert_eq!(csv_string(&[]).unwrap().trim(), header.join(","));
}

fn ncml() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncml"))
}

#[test]
fn cli_validates_lists_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("small.toml");
    std::fs::write(&cfg_path, SMALL).unwrap();

    let out = ncml().arg("validate").arg(&cfg_path).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("6 experiments"));

    let out = ncml().arg("list-experiments").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    for (kind, _) in experiment_kinds() {
        assert!(text.contains(kind));
    }
    let out = ncml().arg("list-experiments").arg(&cfg_path).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("z_chain"));

    let res = dir.path().join("res");
    let out = ncml()
        .args(["run", cfg_path.to_str().unwrap(), "--out", res.to_str().unwrap(), "--seed", "11", "--jobs", "1"])
        .args(["--format", "json", "--only", "approx", "--only", "mazur"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(res.join("approx.json").exists() && res.join("mazur.json").exists());
    assert!(!res.join("ids.json").exists());
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(res.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["base_seed"], 11);

    let failing = dir.path().join("failing.toml");
    std::fs::write(&failing, "[experiment.a]\nkind = \"approx_identity\"\norder = 32\nradii = [8, 4]\ndecay = 1e-6").unwrap();
    let out = ncml().args(["run", failing.to_str().unwrap(), "--out", res.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, "seed = \"x\"").unwrap();
    let out = ncml().arg("validate").arg(&broken).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
