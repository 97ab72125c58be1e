use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("grid resolution {n} is too small (need n >= 4)")]
    ResolutionTooSmall { n: usize },
    #[error("periodic grids need an even resolution, got {n}")]
    OddPeriodicResolution { n: usize },
    #[error("operation requires a {expected} grid")]
    WrongGridKind { expected: &'static str },
    #[error("fields live on incompatible grids")]
    GridMismatch,
    #[error("field has {got} values but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("forcing is incompatible with the grid: {0}")]
    IncompatibleForcing(String),
    #[error("invalid forcing: {0}")]
    InvalidForcing(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown {family} `{name}` (known: {known})")]
    UnknownStrategy {
        family: &'static str,
        name: String,
        known: String,
    },
    #[error("time step {dt} exceeds the advective limit {limit} at t = {t}")]
    CflViolation { dt: f64, limit: f64, t: f64 },
    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),
    #[error("newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },
    #[error("non-finite values after step at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid time interval [{t0}, {t1}]")]
    InvalidInterval { t0: f64, t1: f64 },
    #[error("manufactured solution violates the boundary condition: {0}")]
    BoundaryConditionViolation(String),
    #[error("coefficient path does not cover time {t}")]
    CoverageGap { t: f64 },
    #[error("value out of domain: {0}")]
    DomainViolation(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("fit needs positive values, got {value} at index {index}")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("fit needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("bundle is empty")]
    EmptyBundle,
    #[error("sampling is misaligned: {0}")]
    MisalignedSampling(String),
    #[error("pullback did not converge after {k_max} horizons (residuals {residuals:?})")]
    NoConvergence { k_max: usize, residuals: Vec<f64> },
    #[error("trajectory container is malformed: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
