use combforge_core::Budget;

use crate::error::{Error, Result};

/// Environment variable consulted when no `--budget-bytes` flag is given.
pub const BUDGET_ENV: &str = "COMBFORGE_BUDGET_BYTES";

/// Memory budget: explicit flag, then [`BUDGET_ENV`], then 2 GiB.
pub fn resolve_budget(flag: Option<u64>) -> Result<Budget> {
    if let Some(b) = flag {
        return Ok(Budget(b));
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Budget)
            .map_err(|_| Error::Config(format!("{BUDGET_ENV}={v:?} is not a byte count"))),
        Err(std::env::VarError::NotPresent) => Ok(Budget::default()),
        Err(e) => Err(Error::Config(format!("{BUDGET_ENV}: {e}"))),
    }
}
