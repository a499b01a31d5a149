use thiserror::Error;

use crate::geometry::Site;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A documented precondition of an operation was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no {needed} edge-disjoint detours fit between {from} and {to}")]
    NoDetours { from: Site, to: Site, needed: usize },

    #[error("no partition witness for {site} within {bound} lattice steps")]
    WitnessNotFound { site: Site, bound: f64 },

    #[error("site {0} has no incident edge inside the region")]
    IsolatedSite(Site),

    #[error("{dst} is unreachable from {src} inside the region")]
    Unreachable { src: Site, dst: Site },

    /// The exploration cap was hit before the query could be certified.
    /// `lower_bound` is the smallest tentative cost left on the frontier.
    #[error("site budget of {cap} exceeded (certified lower bound {lower_bound})")]
    BudgetExceeded { cap: usize, lower_bound: f64 },

    #[error("empty hyperplane slice at level {0}")]
    EmptySlice(i64),

    #[error("limit shape is degenerate: time constant not bounded away from zero in direction {0}")]
    DegenerateShape(Site),

    #[error("record kind `{0}` cannot be plotted")]
    NoPlot(String),

    #[error("invalid configuration: {field}: {message}")]
    Validation { field: String, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
