use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: String,
    },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("dense simulation of {n} qubits exceeds the cap of {cap} (set NQKD_DENSE_CAP to raise it)")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("state is not physical: {0}")]
    NonPhysicalState(String),

    #[error("state is not depolarised: lambda_j^+ != lambda_j^- for j = {j} (difference {diff:e})")]
    NotDepolarised { j: usize, diff: f64 },

    #[error("log-domain violation in the secret fraction: {0}")]
    LogDomain(String),

    #[error("root solver found no sign change of {what} on [{lo}, {hi}]")]
    NoSignChange { what: String, lo: f64, hi: f64 },

    #[error("no samples available for {0}")]
    EmptySample(&'static str),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: impl ToString, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numeric machinery rather than of the caller's input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoSignChange { .. } | Error::LogDomain(_))
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(name, p, "must lie in [0, 1]"))
    }
}
