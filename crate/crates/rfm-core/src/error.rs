use thiserror::Error;

/// Errors from the dense linear-algebra kernels.
#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("sketch must compress: {m} input rows < {s} target rows")]
    SketchTooWide { m: usize, s: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rank deficient: |R[{index},{index}]| = {value:.3e} below relative tolerance")]
    RankDeficient { index: usize, value: f64 },
    #[error("factorization failure: {0}")]
    FactorizationFailure(String),
}

/// Errors from partitioning, basis evaluation, geometry and assembly.
#[derive(Debug, Error)]
pub enum RfmError {
    #[error("empty interval in dimension {0}")]
    EmptyInterval(usize),
    #[error("subdomain {0} has no interior collocation points after geometry filtering")]
    EmptyInterior(usize),
    #[error("derivative order {0} exceeds the supported maximum of 3")]
    OrderTooHigh(usize),
    #[error("point lies outside the bounding box")]
    OutsideDomain,
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("problem has no closed-form exact solution")]
    NoExactSolution,
    #[error("adaptive step size underflow at t = {0}")]
    IntegrationFailure(f64),
    #[error("pou kind `b` requires operator order <= 2, got {0}")]
    UnsupportedPou(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Errors from the experiment driver.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("reference field is identically zero on the evaluation grid")]
    ZeroReference,
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Rfm(#[from] RfmError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
