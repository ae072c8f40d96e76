//! Work budgets for the doubly-exponential enumerations.

use crate::error::{GifsError, Result};

/// Environment variable overriding every default budget.
pub const BUDGET_ENV: &str = "GIFS_BUDGET";

/// Default cap on enumerated addresses.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;
/// Default cap on coefficient-table entries (matrices or vectors).
pub const DEFAULT_TABLE_BUDGET: u64 = 1_000_000;
/// Default cap on points materialised by a single Hutchinson evaluation.
pub const DEFAULT_POINT_BUDGET: u64 = 5_000_000;
/// Default cap on map evaluations streamed through a decimation grid.
pub const DEFAULT_WORK_BUDGET: u64 = 2_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Budget {
    pub fn enumeration() -> Self {
        Self::from_env_or(DEFAULT_ENUMERATION_BUDGET)
    }

    pub fn tables() -> Self {
        Self::from_env_or(DEFAULT_TABLE_BUDGET)
    }

    pub fn points() -> Self {
        Self::from_env_or(DEFAULT_POINT_BUDGET)
    }

    pub fn work() -> Self {
        Self::from_env_or(DEFAULT_WORK_BUDGET)
    }

    pub fn unlimited() -> Self {
        Budget(u64::MAX)
    }

    fn from_env_or(default: u64) -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Budget)
            .unwrap_or(Budget(default))
    }

    /// Fails with [`GifsError::BudgetExceeded`] when `needed` (None = overflowed) is over budget.
    pub fn check(self, needed: Option<u128>) -> Result<()> {
        match needed {
            Some(v) if v <= self.0 as u128 => Ok(()),
            Some(v) => Err(GifsError::BudgetExceeded {
                needed: v.to_string(),
                budget: self.0,
            }),
            None => Err(GifsError::BudgetExceeded {
                needed: "more than 2^128".into(),
                budget: self.0,
            }),
        }
    }
}
