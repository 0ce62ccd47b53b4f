use thiserror::Error;

/// Errors produced by the network calculus, simulators and experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("network is disconnected: {components} components")]
    Disconnected { components: usize },

    /// The matrix could not be realized as the effective resistance of any network.
    #[error("not a resistance metric: {0}")]
    NotAResistanceMetric(String),

    /// A linear solve failed; unreachable for valid connected networks.
    #[error("singular linear system: {0}")]
    Singular(String),

    /// A brute-force routine was asked to exceed its enumeration budget.
    #[error("capacity exceeded: {what} (size {size}, limit {limit})")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    /// Monte Carlo runs hit the safety jump budget before being killed.
    #[error("Monte Carlo budget exceeded: {aborted} of {total} runs aborted")]
    McBudget { aborted: usize, total: usize },

    /// Rejection sampling did not produce an acceptable sample within budget.
    #[error("rejection budget exhausted after {attempts} attempts")]
    RejectionBudget { attempts: u64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for the command-line harness.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity { .. } => 3,
            Error::McBudget { .. } | Error::RejectionBudget { .. } => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
