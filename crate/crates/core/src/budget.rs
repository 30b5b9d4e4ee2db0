//! Work budgets for exhaustive kernels.
//!
//! The default budget is `10^9` elementary operations; the `APINC_BUDGET`
//! environment variable overrides it process-wide.

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

pub fn work_budget() -> u128 {
    std::env::var("APINC_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v > 0.0)
        .map(|v| v as u128)
        .unwrap_or(DEFAULT_BUDGET)
}

/// Fails with `BudgetExceeded` when `needed` exceeds the active budget.
pub fn check(needed: u128) -> Result<()> {
    let budget = work_budget();
    if needed > budget {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub fn pow_saturating(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}
