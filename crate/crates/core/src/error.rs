use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (radius out of range, bad level).
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// Invalid configuration. `key` names the offending config key.
    #[error("invalid config `{key}`: {msg}")]
    Config { key: String, msg: String },

    /// A numerical procedure failed (step rejection, non-convergence, bound not achieved).
    #[error("numerical failure in {module}::{op}: {msg}")]
    Numerical {
        module: &'static str,
        op: &'static str,
        msg: String,
    },

    /// The input violates a documented precondition of the operation.
    #[error("precondition violated in {op}: {msg}")]
    Precondition { op: &'static str, msg: String },

    /// The probabilistic representation of the harmonic extension is not available.
    #[error("representation invalid: {0}")]
    RepresentationInvalid(String),

    /// A classifier or tail test could not decide at the available resolution.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }

    pub fn numerical(module: &'static str, op: &'static str, msg: impl Into<String>) -> Self {
        Error::Numerical {
            module,
            op,
            msg: msg.into(),
        }
    }

    pub fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }

    pub fn precondition(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Precondition {
            op,
            msg: msg.into(),
        }
    }

    /// Process exit status used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            _ => 3,
        }
    }
}
