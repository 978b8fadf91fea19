use std::path::PathBuf;

use thiserror::Error;

use crate::counts::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("codeword rejected: {0}")]
    Codeword(Violation),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A numerical routine produced an unusable value.
    #[error("numeric failure in {op}: {reason}")]
    Numeric { op: &'static str, reason: String },

    #[error("quadrature in {op} did not converge (residual estimate {residual:e})")]
    Quadrature { op: &'static str, residual: f64 },

    #[error(
        "codebook sampling exhausted {attempts} attempts for one codeword \
         (acceptance rate estimate {acceptance_rate:e})"
    )]
    AttemptBudget { attempts: u64, acceptance_rate: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed count-vector trace: {0}")]
    Framing(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn numeric(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Numeric {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True when the error stems from bad input values rather than usage or IO.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::Stage { source, .. } => source.is_domain(),
            Error::Io { .. } | Error::Config(_) => false,
            _ => true,
        }
    }
}
