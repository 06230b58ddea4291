use thiserror::Error;

/// Errors produced by problem construction, compilation and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("missing hyperparameter: {0}")]
    MissingHyperparameter(String),

    #[error("operator is not diagonal: {0}")]
    NotDiagonal(String),

    #[error("folded spectrum is not applicable: {0}")]
    FsInapplicable(String),

    #[error("no accepted value after {} trials (last {:?})", trace.len(), trace.last())]
    NonConvergence { trace: Vec<f64> },

    #[error("qubit cap exceeded: {requested} > {cap}")]
    QubitCap { requested: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("constraint must be converted first: {0}")]
    MustConvert(String),

    #[error("Δt tuning failed: no candidate in {0:?} keeps the Lyapunov sequence monotone")]
    Tuning(Vec<f64>),

    #[error("instance {index}: {source}")]
    Instance { index: usize, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension",
            Error::Input(_) => "input",
            Error::Infeasible(_) => "infeasible",
            Error::UnsupportedSize(_) => "unsupported_size",
            Error::InvalidHyperparameter(_) => "invalid_hyperparameter",
            Error::MissingHyperparameter(_) => "missing_hyperparameter",
            Error::NotDiagonal(_) => "not_diagonal",
            Error::FsInapplicable(_) => "fs_inapplicable",
            Error::NonConvergence { .. } => "non_convergence",
            Error::QubitCap { .. } => "qubit_cap",
            Error::Config(_) => "config",
            Error::UndefinedMetric(_) => "undefined_metric",
            Error::MustConvert(_) => "must_convert",
            Error::Tuning(_) => "tuning",
            Error::Instance { source, .. } => source.kind(),
        }
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}
