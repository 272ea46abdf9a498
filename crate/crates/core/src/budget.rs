//! Size limits for exhaustive computations.

use crate::error::{Error, Result};

/// Caps on exhaustive work. `GMPA_BUDGET` overrides `max_elements`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest carrier stored with explicit operation tables.
    pub max_table: usize,
    /// Largest carrier of a composite ring that may be enumerated.
    pub max_elements: usize,
    /// Largest number of element triples checked exhaustively.
    pub max_triples: u128,
    /// Largest number of states visited by a coordinate-system search.
    pub max_search_states: usize,
    /// Largest group order accepted by generators and regularity checks.
    pub max_group_order: usize,
    /// Largest `|k|^n` accepted by the cyclic-shift generator.
    pub max_shift_carrier: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_table: 4096,
            max_elements: 1 << 20,
            max_triples: 1 << 28,
            max_search_states: 1 << 21,
            max_group_order: 8,
            max_shift_carrier: 2048,
        }
    }
}

impl Budget {
    pub fn from_env() -> Self {
        let mut b = Budget::default();
        if let Some(n) = std::env::var("GMPA_BUDGET")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            b.max_elements = n;
        }
        b
    }

    pub fn check_elements(&self, what: &str, size: u128) -> Result<()> {
        if size > self.max_elements as u128 {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                size,
                limit: self.max_elements as u128,
            });
        }
        Ok(())
    }

    pub fn check_table(&self, what: &str, size: u128) -> Result<()> {
        if size > self.max_table as u128 {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                size,
                limit: self.max_table as u128,
            });
        }
        Ok(())
    }
}
