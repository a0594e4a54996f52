use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid demand: {0}")]
    InvalidDemand(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("destination node {destination} unreachable from origin node {origin}")]
    Unreachable { origin: usize, destination: usize },

    #[error("link cost is not increasing on link {link} (derivative {derivative})")]
    NonMonotoneCost { link: usize, derivative: f64 },

    #[error("negative link cost {cost} on link {link}")]
    NegativeCost { link: usize, cost: f64 },

    #[error("{count} combinations exceed the enumeration budget of {budget}")]
    OverBudget { count: u128, budget: u128 },

    #[error("degenerate instance: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
