use thiserror::Error;

/// Errors produced anywhere in the core crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid set: element {element} is outside the ground set of size {n}")]
    InvalidSet { element: u32, n: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameters: {0}")]
    Param(String),

    #[error("scale guard `{guard}` exceeded: {actual} > {limit}")]
    ScaleGuard {
        guard: &'static str,
        actual: u128,
        limit: u128,
    },

    #[error("invalid stream order: {0}")]
    InvalidOrder(String),

    #[error("buffer capacity {capacity} exceeded")]
    CapacityExceeded { capacity: usize },

    #[error("streaming protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("oracle gate violation: element {element} is neither buffered nor free")]
    OracleGateViolation { element: u32 },

    #[error("certificate step `{step}` failed for {program}: {detail}")]
    CertificateFailure {
        program: String,
        step: String,
        detail: String,
    },

    #[error("no closed-form certificate is available for {0}; use grid mode")]
    NoCertificate(String),

    #[error("no feasible grid point for {0} at the requested resolution")]
    EmptyFeasible(String),

    #[error("malformed instance file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
