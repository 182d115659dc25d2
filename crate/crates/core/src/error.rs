use thiserror::Error;

/// Errors produced by generation, link classification, aggregation and fitting.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("generation infeasible: {0}")]
    Infeasible(String),

    #[error("degenerate link: ABS and ground user share the same ground position")]
    DegenerateLink,

    #[error("aggregation error: {0}")]
    Aggregation(String),

    #[error("model domain error: {0}")]
    Model(String),

    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),

    #[error("city {city}: {source}")]
    City {
        city: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    /// Strips any per-city context and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::City { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
