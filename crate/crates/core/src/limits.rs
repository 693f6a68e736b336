//! Resource guards. The decision problems are NExpTime-hard, so the
//! searches carry explicit budgets instead of open-ended loops.

use std::cell::Cell;

use thiserror::Error;

use crate::model::kb::ModelError;

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Maximum closure cardinality (concepts, complements included).
    pub max_closure: usize,
    /// Maximum free complement pairs: the type enumeration visits 2^free
    /// candidates, so this caps the width rather than the closure size.
    pub max_free_pairs: usize,
    /// Budget for skeleton assignments, tree choices, and hom checks.
    pub max_search_nodes: u64,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { max_closure: 512, max_free_pairs: 22, max_search_nodes: 5_000_000 }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("closure has {size} concepts, exceeding the limit of {limit}")]
    ClosureTooLarge { size: usize, limit: usize },
    #[error("type enumeration spans {free} free concept pairs, exceeding the limit of {limit}")]
    TypeSpaceTooLarge { free: usize, limit: usize },
    #[error("search exceeded the budget of {limit} nodes")]
    SearchBudget { limit: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Shared countdown over one engine invocation.
pub(crate) struct Budget {
    used: Cell<u64>,
    limit: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Budget {
        Budget { used: Cell::new(0), limit }
    }

    pub fn spend(&self, n: u64) -> Result<(), EngineError> {
        let used = self.used.get().saturating_add(n);
        self.used.set(used);
        if used > self.limit {
            Err(EngineError::SearchBudget { limit: self.limit })
        } else {
            Ok(())
        }
    }
}
