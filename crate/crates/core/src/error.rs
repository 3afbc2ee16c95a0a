use thiserror::Error;

use crate::balanced::BalanceWitness;
use crate::goodness::BadCycleWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("position {position} out of range 1..={k}")]
    Position { position: usize, k: usize },

    #[error("uniformity mismatch: hypergraph has k = {hypergraph}, machine has k = {machine}")]
    UniformityMismatch { hypergraph: usize, machine: usize },

    #[error("invalid machine: {0}")]
    InvalidMachine(String),

    #[error("hypergraph is not good")]
    NotGood(Box<BadCycleWitness>),

    #[error("digraph is not balanced")]
    Unbalanced(Box<BalanceWitness>),

    #[error("search budget of {budget} expansions exhausted")]
    BudgetExhausted {
        budget: u64,
        /// Best known bounds, when the search produces any (e.g. chromatic number).
        bounds: Option<(usize, usize)>,
    },

    #[error("{0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

/// Caps the number of node expansions of an exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub const DEFAULT_LIMIT: u64 = 50_000_000;

    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    /// Charges one expansion; fails once the limit is passed.
    pub fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::BudgetExhausted {
                budget: self.limit,
                bounds: None,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_LIMIT)
    }
}
