use crate::error::{Error, Result};

/// Upper bound on the bytes a single dense construction may allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Budget {
    pub const DEFAULT_BYTES: u64 = 2 << 30;

    pub fn bytes(self) -> u64 {
        self.0
    }

    /// Rough footprint of working with a few dense complex `dim × dim`
    /// matrices at once.
    pub fn dense_bytes(dim: usize) -> u64 {
        const LIVE_COPIES: u64 = 4;
        (dim as u64).saturating_mul(dim as u64).saturating_mul(16 * LIVE_COPIES)
    }

    pub fn check_dense(self, what: &'static str, dim: usize) -> Result<()> {
        let required = Self::dense_bytes(dim);
        if required > self.0 {
            return Err(Error::BudgetExceeded { what, required, limit: self.0 });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget(Self::DEFAULT_BYTES)
    }
}
