//! Enumeration budgets shared by all brute-force oracles.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

/// Default budget: 2^22 enumeration states.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

/// Upper bound on the number of states an exhaustive search may visit.
///
/// Reductions and oracles check their state count against the budget before
/// enumerating, so an oversized instance fails fast instead of hanging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

/// Raised when an instance needs more enumeration states than the budget allows.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{task} needs {required} states but the budget is {limit}")]
pub struct BudgetExceeded {
    pub task: &'static str,
    pub required: String,
    pub limit: u64,
}

impl Budget {
    /// Checks `base^exp <= budget`.
    pub fn admits_power(&self, task: &'static str, base: u64, exp: u32) -> Result<u64, BudgetExceeded> {
        let mut total: u64 = 1;
        for _ in 0..exp {
            total = match total.checked_mul(base) {
                Some(t) if t <= self.0 => t,
                _ => {
                    return Err(BudgetExceeded {
                        task,
                        required: BigUint::from(base).pow(exp).to_string(),
                        limit: self.0,
                    })
                }
            };
        }
        Ok(total)
    }

    /// Checks `n! <= budget`.
    pub fn admits_factorial(&self, task: &'static str, n: u64) -> Result<u64, BudgetExceeded> {
        let mut total: u64 = 1;
        for i in 2..=n {
            total = match total.checked_mul(i) {
                Some(t) if t <= self.0 => t,
                _ => {
                    return Err(BudgetExceeded {
                        task,
                        required: factorial_string(n),
                        limit: self.0,
                    })
                }
            };
        }
        Ok(total)
    }
}

fn factorial_string(n: u64) -> String {
    let mut f = BigUint::one();
    for i in 2..=n {
        f *= i;
    }
    f.to_string()
}
