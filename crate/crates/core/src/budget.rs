use crate::error::{Error, Result};

/// Resource limits for exhaustive searches.
///
/// `max_members` caps the size of any materialized family or subset
/// enumeration, `max_work` caps estimated elementary steps (formula
/// evaluations times assignments) of a single search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_members: u64,
    pub max_work: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_members: 2_000_000, max_work: 2_000_000_000 }
    }
}

impl Budget {
    pub const UNLIMITED: Budget = Budget { max_members: u64::MAX, max_work: u64::MAX };

    pub fn check_members(&self, what: &'static str, estimate: u128) -> Result<()> {
        if estimate > self.max_members as u128 {
            return Err(Error::BudgetExceeded { what, estimate, limit: self.max_members as u128 });
        }
        Ok(())
    }

    pub fn check_work(&self, what: &'static str, estimate: u128) -> Result<()> {
        if estimate > self.max_work as u128 {
            return Err(Error::BudgetExceeded { what, estimate, limit: self.max_work as u128 });
        }
        Ok(())
    }
}
