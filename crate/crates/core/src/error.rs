use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown beam label `{0}`")]
    UnknownBeam(String),

    #[error("state is not physical: {0}")]
    Unphysical(String),

    #[error("uncertainty violation: v_plus * v_minus = {0} < 1")]
    UncertaintyViolation(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed network topology: {0}")]
    Topology(String),

    #[error("beam `{0}` carries no carrier amplitude")]
    ZeroCarrier(String),

    #[error("measurement normalization mismatch: expected {expected}, got {got}")]
    NormalizationMismatch { expected: String, got: String },

    #[error("target frequency {0} Hz is unreachable (exceeds rep_rate / 4)")]
    UnreachableFrequency(f64),

    #[error("oracle sample count {0} is below the minimum of 10000")]
    TooFewSamples(usize),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
