//! Experiment runners and the result rows they emit.
//!
//! Every row is self-describing: for asserted rows, `pass` is exactly
//! `value <= bound + tolerance`, so the verdict can be recomputed from
//! the stored numbers. Rows marked `record` carry measurements without a
//! pass/fail claim.

mod approx;
mod config;
mod identities;
mod intertwining;
mod mazur;
mod output;
mod quadrature;
mod random;
mod transference;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use config::{
    ApproxIdentityConfig, AxbGrid, AxbIdentitiesConfig, ExperimentSpec, FidelityConfig, IdentitySuiteConfig,
    IntertwiningConfig, IntertwiningModel, MazurConfig, MazurMapKind, RestrictionConfig, RestrictionPair, SuiteConfig,
    SymbolSpec, TransferenceConfig,
};
pub use output::{config_hash, csv_string, json_string, write_outputs, Manifest, ManifestEntry, OutputFormat};
pub use random::derive_seed;

/// Outcome column of a result row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Record,
}

/// One line of an experiment's output table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub group: String,
    pub n: usize,
    pub p_tuple: String,
    pub parameter: String,
    pub value: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub pass: Verdict,
}

impl Row {
    /// Recomputes the verdict from the stored numbers.
    pub fn recomputed(&self) -> Verdict {
        match self.pass {
            Verdict::Record => Verdict::Record,
            _ if self.value <= self.bound + self.tolerance => Verdict::Pass,
            _ => Verdict::Fail,
        }
    }

    /// Key/value lookup in the `parameter` column (`k1=v1;k2=v2`).
    pub fn param(&self, key: &str) -> Option<&str> {
        self.parameter.split(';').find_map(|kv| kv.split_once('=').filter(|(k, _)| *k == key).map(|(_, v)| v))
    }
}

/// Shared columns for a batch of rows.
#[derive(Clone, Debug)]
pub(crate) struct RowCtx {
    pub experiment: String,
    pub group: String,
    pub n: usize,
    pub p_tuple: String,
}

impl RowCtx {
    pub fn new(experiment: &str, group: &str, n: usize, p_tuple: impl Into<String>) -> Self {
        Self { experiment: experiment.into(), group: group.into(), n, p_tuple: p_tuple.into() }
    }

    pub fn check(&self, parameter: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Row {
        let mut row = self.make(parameter, value, bound, tolerance, Verdict::Pass);
        row.pass = row.recomputed();
        row
    }

    pub fn record(&self, parameter: impl Into<String>, value: f64, bound: f64) -> Row {
        self.make(parameter, value, bound, 0.0, Verdict::Record)
    }

    fn make(&self, parameter: impl Into<String>, value: f64, bound: f64, tolerance: f64, pass: Verdict) -> Row {
        Row {
            experiment: self.experiment.clone(),
            group: self.group.clone(),
            n: self.n,
            p_tuple: self.p_tuple.clone(),
            parameter: parameter.into(),
            value,
            bound,
            tolerance,
            pass,
        }
    }
}

/// Rows of one experiment together with its wall time.
#[derive(Clone, Debug)]
pub struct Report {
    pub id: String,
    pub kind: String,
    pub seed: u64,
    pub rows: Vec<Row>,
    pub seconds: f64,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.pass == Verdict::Fail)
    }

    pub fn all_pass(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// Runs a single configured experiment.
pub fn run_experiment(id: &str, spec: &ExperimentSpec, suite: &SuiteConfig) -> Result<Report> {
    let seed = spec.seed().unwrap_or_else(|| derive_seed(suite.seed, id, 0));
    let estimator = spec.estimator().cloned().unwrap_or_else(|| suite.estimator.clone());
    let start = Instant::now();
    let rows = match spec {
        ExperimentSpec::IdentitySuite(c) => identities::run_finite(id, c, seed)?,
        ExperimentSpec::AxbIdentities(c) => identities::run_axb(id, c, seed)?,
        ExperimentSpec::QuadratureFidelity(c) => quadrature::run(id, c, seed)?,
        ExperimentSpec::Transference(c) => transference::run_transference(id, c, seed, &estimator)?,
        ExperimentSpec::Restriction(c) => transference::run_restriction(id, c, seed, &estimator)?,
        ExperimentSpec::Intertwining(c) => intertwining::run(id, c, seed)?,
        ExperimentSpec::ApproxIdentity(c) => approx::run(id, c)?,
        ExperimentSpec::MazurContinuity(c) => mazur::run(id, c, seed)?,
    };
    Ok(Report { id: id.into(), kind: spec.kind().into(), seed, rows, seconds: start.elapsed().as_secs_f64() })
}

/// Runs every experiment of a suite in name order, or only those in `only`.
pub fn run_suite(suite: &SuiteConfig, only: Option<&[String]>) -> Result<Vec<Report>> {
    suite
        .experiment
        .iter()
        .filter(|(id, _)| only.is_none_or(|ids| ids.iter().any(|x| x == *id)))
        .map(|(id, spec)| run_experiment(id, spec, suite))
        .collect()
}

/// Names and one-line descriptions of the experiment kinds.
pub fn experiment_kinds() -> &'static [(&'static str, &'static str)] {
    &[
        ("identity_suite", "exact multiplier identities on finite groups"),
        ("axb_identities", "presentation independence, commutation and Plancherel on the ax+b grid"),
        ("quadrature_fidelity", "Haar translation laws and modular homomorphism under grid refinement"),
        ("transference", "Fourier versus Schur multiplicatively bounded norm estimates"),
        ("restriction", "restriction of Fourier multipliers to subgroups"),
        ("intertwining", "compressed Fourier and Schur multipliers along Følner windows"),
        ("approx_identity", "approximate identity h_V on a cyclic group"),
        ("mazur_continuity", "Hölder continuity of the Mazur map under trace-preserving UCP maps"),
    ]
}
