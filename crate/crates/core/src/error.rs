use thiserror::Error;

use crate::construction::Stage;
use crate::graph::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{side:?}-vertex index {index} out of range (side has {size} vertices)")]
    IndexOutOfRange { side: Side, index: usize, size: usize },

    #[error("duplicate edge ({x}, {y})")]
    DuplicateEdge { x: usize, y: usize },

    #[error("graph has an empty side")]
    EmptySide,

    #[error("graph of {cells} cells exceeds the 2^31 cell cap")]
    GraphTooLarge { cells: u64 },

    #[error("selection mask widths ({x_mask}, {y_mask}) do not match graph sides ({x_size}, {y_size})")]
    WidthMismatch {
        x_mask: usize,
        y_mask: usize,
        x_size: usize,
        y_size: usize,
    },

    #[error("invalid vertex pack: {0}")]
    InvalidPack(String),

    #[error("packs share a vertex")]
    OverlappingPacks,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{what}: {requested} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("work budget exceeded: needs {needed} units, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("construction stage {stage} failed: {reason}")]
    StageFailed { stage: Stage, reason: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("parameter `{name}` {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn stage(stage: Stage, reason: impl Into<String>) -> Self {
        Error::StageFailed {
            stage,
            reason: reason.into(),
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
