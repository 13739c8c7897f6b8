use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("multiplication table does not define a group: {0}")]
    TableNotAGroup(String),
    #[error("invalid quadrature grid parameters: {0}")]
    BadGridParams(String),
    #[error("window has zero measure")]
    EmptyWindow,
    #[error("operator contains a non-finite entry")]
    NonFiniteEntry,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("exponent must be finite here")]
    InfiniteExponent,
    #[error("invalid exponent: {0}")]
    BadExponent(String),
    #[error("operator is zero")]
    ZeroOperator,
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("coefficient length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("elements live on different groups")]
    GroupMismatch,
    #[error("interpolation parameter outside [0, 1]: {0}")]
    BadTheta(f64),
    #[error("Hölder relation violated: {0}")]
    HolderViolation(String),
    #[error("integrand support leaves the quadrature grid: {0}")]
    SupportEscape(String),
    #[error("window is not symmetric")]
    AsymmetricWindow,
    #[error("estimator did not converge")]
    NoConvergence,
    #[error("map is degenerate: {0}")]
    DegenerateMap(String),
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("map is not unital completely positive: {0}")]
    NotUCP(String),
    #[error("subset is not a subgroup")]
    NotASubgroup,
    #[error("singular value decomposition failed")]
    SvdFailed,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
