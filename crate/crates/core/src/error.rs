use thiserror::Error;

/// Errors raised by the simulation and protocol layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("subsystem {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },
    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),
    #[error("cannot combine a pure state with a mixed state")]
    MixedKinds,
    #[error("measurement family is not a complete orthonormal set: {0}")]
    IncompleteMeasurement(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("bound is vacuous: coefficient {0} is not positive")]
    VacuousBound(f64),
    #[error("gate `{0}` has no decomposition into the native set")]
    UnsupportedGate(String),
    #[error("truncation inadequate: amplitude {amplitude:e} at level {level}")]
    Truncation { level: usize, amplitude: f64 },
    #[error("circuit error: {0}")]
    Circuit(String),
    #[error("stash exhausted for {0}; replenish required")]
    ReplenishRequired(String),
    #[error("insufficient key material: need {needed} bits, have {available}")]
    InsufficientKey { needed: usize, available: usize },
    #[error("test set is empty; resample the session")]
    EmptyTestSet,
    #[error("input is not an eigenvector of U (residual {0:e})")]
    NotEigenvector(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
