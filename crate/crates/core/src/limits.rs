//! Enumeration guards shared by the exhaustive procedures.

use crate::error::{Error, Result};

/// Absolute tolerance used for every value comparison and inequality check.
pub const TOL: f64 = 1e-9;

/// Configurable caps on exhaustive work. Every guard trips with
/// [`Error::ScaleGuard`] naming the guard.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for exhaustive property scans over `2^E`.
    pub exhaustive_max_n: usize,
    /// Largest `n` for the disjoint-pair scan of the no-harm check.
    pub no_harm_max_n: usize,
    /// Largest `|T|` for the exact subsample expectation.
    pub subsample_max_t: usize,
    /// Largest number of size-`<= k` subsets any single exhaustive search may visit.
    pub max_subsets: u128,
    /// Largest number of guesses an FPT outer loop may enumerate.
    pub max_guesses: u128,
    /// Largest number of calls of the recursive search, across the whole tree.
    pub max_recursive_calls: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            exhaustive_max_n: 20,
            no_harm_max_n: 12,
            subsample_max_t: 20,
            max_subsets: 10_000_000,
            max_guesses: 1_000_000,
            max_recursive_calls: 1_000_000,
        }
    }
}

impl Limits {
    pub(crate) fn check(guard: &'static str, actual: u128, limit: u128) -> Result<()> {
        if actual > limit {
            Err(Error::ScaleGuard {
                guard,
                actual,
                limit,
            })
        } else {
            Ok(())
        }
    }
}

/// `C(m, 0) + C(m, 1) + .. + C(m, k)`, saturating.
pub fn subsets_up_to(m: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for j in 0..=k.min(m) {
        total = total.saturating_add(term);
        // C(m, j+1) = C(m, j) * (m - j) / (j + 1)
        term = term.saturating_mul((m - j) as u128) / (j as u128 + 1);
    }
    total
}
