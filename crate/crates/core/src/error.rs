use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex index {0} out of range")]
    InvalidVertex(usize),
    #[error("graph is disconnected: vertex {0} unreachable from vertex 0")]
    Disconnected(usize),
    #[error("edge ({0}, {1}) has negative weight {2}")]
    NegativeWeight(usize, usize, i64),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("walk is empty")]
    EmptyWalk,
    #[error("vertex {0} appears more than once")]
    DuplicateVertex(usize),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("instance exceeds oracle cap: {what} is {value}, limit {limit}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("invalid size distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
