//! Size limits for exact arithmetic and enumeration.

use std::sync::OnceLock;

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Environment variable overriding the default digit budget.
pub const DIGIT_BUDGET_ENV: &str = "CFRAJ_DIGIT_BUDGET";

pub const DEFAULT_DIGIT_BUDGET: u64 = 20_000;

/// Default cap on enumerated tuples when building block measures.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// Default cap on cylinders visited by a cylinder-sum estimate.
pub const DEFAULT_CYLINDER_BUDGET: u64 = 4_000_000;

const LOG10_2: f64 = std::f64::consts::LOG10_2;

/// Maximum number of decimal digits an exact integer may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitBudget(pub u64);

impl DigitBudget {
    /// Process-wide budget: `CFRAJ_DIGIT_BUDGET` if set and valid, else the default.
    pub fn global() -> Self {
        static CELL: OnceLock<DigitBudget> = OnceLock::new();
        *CELL.get_or_init(|| {
            std::env::var(DIGIT_BUDGET_ENV)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .map(DigitBudget)
                .unwrap_or(DigitBudget(DEFAULT_DIGIT_BUDGET))
        })
    }

    pub fn digits_of(n: &BigUint) -> f64 {
        n.bits() as f64 * LOG10_2
    }

    pub fn check(&self, n: &BigUint) -> Result<()> {
        self.check_digits(Self::digits_of(n), None)
    }

    pub fn check_digits(&self, digits: f64, at: Option<usize>) -> Result<()> {
        if digits > self.0 as f64 {
            Err(Error::Overflow {
                digits,
                budget: self.0,
                at,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for DigitBudget {
    fn default() -> Self {
        DigitBudget(DEFAULT_DIGIT_BUDGET)
    }
}
