//! TOML experiment configuration.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{EstimatorOptions, HolderTuple};

/// Top-level configuration: a base seed, default estimator options and
/// named experiment tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub estimator: EstimatorOptions,
    #[serde(default)]
    pub experiment: BTreeMap<String, ExperimentSpec>,
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Structural checks that do not require running anything.
    pub fn validate(&self) -> Result<()> {
        check_estimator(&self.estimator)?;
        for (id, spec) in &self.experiment {
            spec.validate().map_err(|e| Error::Config(format!("experiment `{id}`: {e}")))?;
        }
        Ok(())
    }
}

fn check_estimator(o: &EstimatorOptions) -> Result<()> {
    if o.restarts == 0 || o.max_iters == 0 || !(o.tol >= 0.0) || !(o.damping > 0.0 && o.damping <= 1.0) {
        return Err(Error::Config("estimator needs restarts, max_iters > 0, tol >= 0 and damping in (0, 1]".into()));
    }
    Ok(())
}

fn check_tuples(tuples: &[HolderTuple], max_n: usize) -> Result<()> {
    if let Some(t) = tuples.iter().find(|t| t.n() > max_n) {
        return Err(Error::Config(format!("tuple {t} has arity above {max_n}")));
    }
    Ok(())
}

/// How random symbols are drawn on a finite group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolSpec {
    /// Independent values in the closed unit disk.
    Random,
    /// Products of independent unary random functions.
    Product,
    /// Normalized positive definite functions `g * g~` on `G^n`.
    PositiveDefinite,
    /// Explicit values on `G^n` as `[re, im]` pairs, row-major.
    Table(Vec<[f64; 2]>),
}

impl Default for SymbolSpec {
    fn default() -> Self {
        SymbolSpec::Random
    }
}

/// Midpoint grid on the `ax+b` group, log-uniform in `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxbGrid {
    /// `log a` ranges over `[-log_r, log_r]`.
    pub log_r: f64,
    /// `b` ranges over `[-s, s]`.
    pub s: f64,
    pub n_a: usize,
    pub n_b: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentSpec {
    IdentitySuite(IdentitySuiteConfig),
    AxbIdentities(AxbIdentitiesConfig),
    QuadratureFidelity(FidelityConfig),
    Transference(TransferenceConfig),
    Restriction(RestrictionConfig),
    Intertwining(IntertwiningConfig),
    ApproxIdentity(ApproxIdentityConfig),
    MazurContinuity(MazurConfig),
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentSpec::IdentitySuite(_) => "identity_suite",
            ExperimentSpec::AxbIdentities(_) => "axb_identities",
            ExperimentSpec::QuadratureFidelity(_) => "quadrature_fidelity",
            ExperimentSpec::Transference(_) => "transference",
            ExperimentSpec::Restriction(_) => "restriction",
            ExperimentSpec::Intertwining(_) => "intertwining",
            ExperimentSpec::ApproxIdentity(_) => "approx_identity",
            ExperimentSpec::MazurContinuity(_) => "mazur_continuity",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            ExperimentSpec::IdentitySuite(c) => c.seed,
            ExperimentSpec::AxbIdentities(c) => c.seed,
            ExperimentSpec::QuadratureFidelity(c) => c.seed,
            ExperimentSpec::Transference(c) => c.seed,
            ExperimentSpec::Restriction(c) => c.seed,
            ExperimentSpec::Intertwining(c) => c.seed,
            ExperimentSpec::ApproxIdentity(_) => None,
            ExperimentSpec::MazurContinuity(c) => c.seed,
        }
    }

    pub fn estimator(&self) -> Option<&EstimatorOptions> {
        match self {
            ExperimentSpec::Transference(c) => c.estimator.as_ref(),
            ExperimentSpec::Restriction(c) => c.estimator.as_ref(),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(o) = self.estimator() {
            check_estimator(o)?;
        }
        match self {
            ExperimentSpec::IdentitySuite(c) => {
                if c.arities.iter().any(|&n| n == 0 || n > 4) {
                    return Err(Error::Config("arities must lie in 1..=4".into()));
                }
                for g in &c.groups {
                    crate::group_model::FiniteGroup::from_name(g)?;
                }
            }
            ExperimentSpec::AxbIdentities(c) => {
                if c.arities.iter().any(|&n| n == 0 || n > 2) {
                    return Err(Error::Config("arities must lie in 1..=2".into()));
                }
                if c.thetas.iter().any(|t| !(0.0..=1.0).contains(t)) {
                    return Err(Error::BadTheta(c.thetas.iter().copied().find(|t| !(0.0..=1.0).contains(t)).unwrap()));
                }
            }
            ExperimentSpec::QuadratureFidelity(c) => {
                if c.refine < 2 {
                    return Err(Error::Config("refine must be at least 2".into()));
                }
            }
            ExperimentSpec::Transference(c) => {
                check_tuples(&c.tuples, 2)?;
                check_tuples(&c.record_tuples, 2)?;
                if c.levels.is_empty() || c.levels.contains(&0) {
                    return Err(Error::Config("levels must be non-empty and positive".into()));
                }
            }
            ExperimentSpec::Restriction(c) => {
                check_tuples(&c.tuples, 2)?;
                if c.levels.is_empty() || c.levels.contains(&0) {
                    return Err(Error::Config("levels must be non-empty and positive".into()));
                }
            }
            ExperimentSpec::Intertwining(c) => {
                if !(1..=2).contains(&c.arity) {
                    return Err(Error::Config("intertwining arity must be 1 or 2".into()));
                }
                if c.windows.len() < 2 {
                    return Err(Error::Config("need at least two windows".into()));
                }
            }
            ExperimentSpec::ApproxIdentity(c) => {
                if c.radii.iter().any(|&r| 2 * r + 1 > c.order) {
                    return Err(Error::Config("radius too large for the group order".into()));
                }
                for (p, q) in &c.pairs {
                    let (p, q) = (p.value_f64(), q.value_f64());
                    if !((2.0 <= q && q < p) || (1.0 <= p && p < q && q <= 2.0)) {
                        return Err(Error::Config(format!("exponent pair ({p}, {q}) outside the admissible ranges")));
                    }
                }
            }
            ExperimentSpec::MazurContinuity(c) => {
                if c.dims.iter().any(|&d| d < 2) {
                    return Err(Error::Config("dimensions must be at least 2".into()));
                }
            }
        }
        Ok(())
    }
}

fn default_finite_groups() -> Vec<String> {
    vec!["Z4".into(), "Z6".into(), "S3".into()]
}

/// Exact identities on finite groups.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySuiteConfig {
    pub seed: Option<u64>,
    #[serde(default = "default_finite_groups")]
    pub groups: Vec<String>,
    #[serde(default = "IdentitySuiteConfig::default_arities")]
    pub arities: Vec<usize>,
    #[serde(default = "IdentitySuiteConfig::default_trials")]
    pub trials: usize,
    #[serde(default = "IdentitySuiteConfig::default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub symbol: SymbolSpec,
}

impl IdentitySuiteConfig {
    fn default_arities() -> Vec<usize> {
        vec![1, 2, 3]
    }
    fn default_trials() -> usize {
        50
    }
    fn default_tolerance() -> f64 {
        1e-9
    }
}

/// Identities checked through compressed kernels on the `ax+b` group.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxbIdentitiesConfig {
    pub seed: Option<u64>,
    #[serde(default = "AxbIdentitiesConfig::default_grid")]
    pub grid: AxbGrid,
    #[serde(default = "AxbIdentitiesConfig::default_arities")]
    pub arities: Vec<usize>,
    #[serde(default = "AxbIdentitiesConfig::default_thetas")]
    pub thetas: Vec<f64>,
    #[serde(default = "AxbIdentitiesConfig::default_trials")]
    pub trials: usize,
    #[serde(default = "AxbIdentitiesConfig::default_theta_tolerance")]
    pub theta_tolerance: f64,
    #[serde(default = "AxbIdentitiesConfig::default_exact_tolerance")]
    pub exact_tolerance: f64,
    /// Wedge depths `R` for the Plancherel windows `log a in [-R, 0]`,
    /// `|b/a| <= e^R`.
    #[serde(default = "AxbIdentitiesConfig::default_depths")]
    pub plancherel_depths: Vec<f64>,
    /// Grid spacing of the Plancherel wedge grid.
    #[serde(default = "AxbIdentitiesConfig::default_spacing")]
    pub plancherel_spacing: f64,
}

impl AxbIdentitiesConfig {
    fn default_grid() -> AxbGrid {
        AxbGrid { log_r: 1.0, s: 2.5, n_a: 24, n_b: 24 }
    }
    fn default_arities() -> Vec<usize> {
        vec![1, 2]
    }
    fn default_thetas() -> Vec<f64> {
        vec![0.0, 0.25, 0.5, 0.75, 1.0]
    }
    fn default_trials() -> usize {
        3
    }
    fn default_theta_tolerance() -> f64 {
        1e-6
    }
    fn default_exact_tolerance() -> f64 {
        1e-9
    }
    fn default_depths() -> Vec<f64> {
        vec![0.5, 1.0, 1.5, 2.0]
    }
    fn default_spacing() -> f64 {
        0.1
    }
}

/// Haar translation laws and modular homomorphism on the quadrature grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelityConfig {
    pub seed: Option<u64>,
    #[serde(default = "FidelityConfig::default_grid")]
    pub grid: AxbGrid,
    #[serde(default = "FidelityConfig::default_refine")]
    pub refine: usize,
    #[serde(default = "FidelityConfig::default_trials")]
    pub trials: usize,
    #[serde(default = "FidelityConfig::default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "FidelityConfig::default_modular_tolerance")]
    pub modular_tolerance: f64,
}

impl FidelityConfig {
    fn default_grid() -> AxbGrid {
        AxbGrid { log_r: 1.5, s: 4.0, n_a: 48, n_b: 64 }
    }
    fn default_refine() -> usize {
        2
    }
    fn default_trials() -> usize {
        10
    }
    fn default_tolerance() -> f64 {
        1e-3
    }
    fn default_modular_tolerance() -> f64 {
        1e-12
    }
}

fn default_levels() -> Vec<usize> {
    vec![1, 2, 3]
}

fn default_delta() -> f64 {
    0.05
}

fn default_symbols() -> usize {
    20
}

fn default_transference_tuples() -> Vec<HolderTuple> {
    ["(inf;inf)", "(2;2)", "(4,4;2)"].iter().map(|s| s.parse().expect("valid tuple")).collect()
}

/// Fourier versus Schur multiplier norms on finite groups.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferenceConfig {
    pub seed: Option<u64>,
    pub estimator: Option<EstimatorOptions>,
    #[serde(default = "TransferenceConfig::default_groups")]
    pub groups: Vec<String>,
    #[serde(default = "default_transference_tuples")]
    pub tuples: Vec<HolderTuple>,
    /// Tuples whose outcomes are recorded without a verdict.
    #[serde(default)]
    pub record_tuples: Vec<HolderTuple>,
    #[serde(default = "default_symbols")]
    pub symbols: usize,
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub symbol: SymbolSpec,
}

impl TransferenceConfig {
    fn default_groups() -> Vec<String> {
        vec!["Z4".into(), "S3".into()]
    }
}

/// A group together with the element indices of a candidate subgroup.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionPair {
    pub group: String,
    pub subgroup: Vec<usize>,
}

/// Fourier multipliers restricted to subgroups.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionConfig {
    pub seed: Option<u64>,
    pub estimator: Option<EstimatorOptions>,
    pub pairs: Vec<RestrictionPair>,
    #[serde(default = "RestrictionConfig::default_tuples")]
    pub tuples: Vec<HolderTuple>,
    #[serde(default = "RestrictionConfig::default_symbols")]
    pub symbols: usize,
    #[serde(default = "RestrictionConfig::default_levels")]
    pub levels: Vec<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub symbol: SymbolSpec,
}

impl RestrictionConfig {
    fn default_tuples() -> Vec<HolderTuple> {
        vec!["(inf;inf)".parse().expect("valid tuple")]
    }
    fn default_symbols() -> usize {
        5
    }
    fn default_levels() -> Vec<usize> {
        vec![1, 2]
    }
}

/// Group model used by the intertwining experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntertwiningModel {
    /// Integer segment with windows `{-k..k}`.
    Integers,
    /// `ax+b` wedges `log a in [-R, 0]`, `|b/a| <= e^R`.
    Axb,
}

/// Compressed Fourier versus Schur multipliers along Følner windows.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntertwiningConfig {
    pub seed: Option<u64>,
    pub model: IntertwiningModel,
    pub arity: usize,
    /// Window sizes: `k` for integers, depth `R` for `ax+b`.
    pub windows: Vec<f64>,
    /// Support radius of the test functions (chart units).
    #[serde(default = "IntertwiningConfig::default_support")]
    pub support: f64,
    /// Grid spacing for the `ax+b` model.
    #[serde(default = "IntertwiningConfig::default_spacing")]
    pub spacing: f64,
    #[serde(default = "IntertwiningConfig::default_trials")]
    pub trials: usize,
    /// Successive values may grow by at most this relative slack.
    #[serde(default)]
    pub slack: f64,
    /// Required `last <= decay * first`, when set.
    pub decay: Option<f64>,
}

impl IntertwiningConfig {
    fn default_support() -> f64 {
        3.0
    }
    fn default_spacing() -> f64 {
        0.25
    }
    fn default_trials() -> usize {
        1
    }
}

/// Approximate identity on a cyclic group.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxIdentityConfig {
    #[serde(default = "ApproxIdentityConfig::default_order")]
    pub order: usize,
    #[serde(default = "ApproxIdentityConfig::default_radii")]
    pub radii: Vec<usize>,
    /// Exponent pairs `(p, q)` with `2 <= q < p` or `1 <= p < q <= 2`.
    #[serde(default = "ApproxIdentityConfig::default_pairs")]
    pub pairs: Vec<(crate::ncalgebra::SchattenExponent, crate::ncalgebra::SchattenExponent)>,
    /// `psi(k) = cos(2 pi frequency k / order)`.
    #[serde(default = "ApproxIdentityConfig::default_frequency")]
    pub frequency: f64,
    #[serde(default = "ApproxIdentityConfig::default_decay")]
    pub decay: f64,
}

impl ApproxIdentityConfig {
    fn default_order() -> usize {
        256
    }
    fn default_radii() -> Vec<usize> {
        vec![64, 32, 16, 8, 4, 2, 1]
    }
    fn default_pairs() -> Vec<(crate::ncalgebra::SchattenExponent, crate::ncalgebra::SchattenExponent)> {
        vec![("inf".parse().expect("valid"), "4".parse().expect("valid")), ("1".parse().expect("valid"), "4/3".parse().expect("valid"))]
    }
    fn default_frequency() -> f64 {
        1.0
    }
    fn default_decay() -> f64 {
        0.1
    }
}

/// Trace-preserving UCP maps used by the Mazur continuity experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MazurMapKind {
    /// Schur multiplier by a Gram matrix of unit vectors.
    SchurGram,
    /// `x -> (x + U x U^*) / 2` for a random self-adjoint unitary `U`.
    Z2Average,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MazurConfig {
    pub seed: Option<u64>,
    #[serde(default = "MazurConfig::default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "MazurConfig::default_exponents")]
    pub exponents: Vec<crate::ncalgebra::SchattenExponent>,
    #[serde(default = "MazurConfig::default_maps")]
    pub maps: Vec<MazurMapKind>,
    #[serde(default = "MazurConfig::default_trials")]
    pub trials: usize,
    /// Dimensions compared by the growth check.
    #[serde(default = "MazurConfig::default_compare")]
    pub compare: (usize, usize),
    #[serde(default = "MazurConfig::default_growth")]
    pub growth: f64,
}

impl MazurConfig {
    fn default_dims() -> Vec<usize> {
        (2..=16).collect()
    }
    fn default_exponents() -> Vec<crate::ncalgebra::SchattenExponent> {
        vec!["4/3".parse().expect("valid"), "4".parse().expect("valid")]
    }
    fn default_maps() -> Vec<MazurMapKind> {
        vec![MazurMapKind::SchurGram, MazurMapKind::Z2Average]
    }
    fn default_trials() -> usize {
        12
    }
    fn default_compare() -> (usize, usize) {
        (4, 16)
    }
    fn default_growth() -> f64 {
        2.0
    }
}
