use thiserror::Error;

use crate::domain::ParseError;
use crate::tree::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown literal {0}")]
    UnknownLiteral(String),

    #[error("unknown action {0}")]
    UnknownAction(String),

    #[error("entry has no pending action")]
    NoPending,

    #[error("simulation exceeded the tick limit of {limit}")]
    TickLimitExceeded { limit: usize },

    #[error("belief state grew to {count} entries, above the limit of {limit}")]
    EntryLimitExceeded { count: usize, limit: usize },

    #[error("goal is empty")]
    EmptyGoal,

    #[error("every terminal entry succeeded; nothing to resolve")]
    NothingFailed,

    #[error("failing mass carries no failed condition to resolve")]
    NoFailedCondition,

    #[error("no action or template can make {literal} = S")]
    NoResolver { literal: String },

    #[error("threat on {literal} from node {conflict} cannot be resolved by reordering")]
    UnresolvableThreat { literal: String, conflict: NodeId },

    #[error("planning stopped after {iterations} iterations at probability {probability:.6}")]
    IterationLimit { iterations: usize, probability: f64 },

    #[error("template {template} has no binding for parameter {parameter}")]
    UnboundParameter { template: String, parameter: String },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid plan request: {0}")]
    InvalidRequest(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("tree file: {0}")]
    TreeFile(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors raised by [`crate::exec::SimulationLimits`].
    pub fn is_limit(&self) -> bool {
        matches!(self, Error::TickLimitExceeded { .. } | Error::EntryLimitExceeded { .. })
    }
}
