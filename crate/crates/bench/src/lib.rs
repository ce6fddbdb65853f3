//! Shared fixtures for the benchmarks.

use submodlab_core::families::{random_instance, Family};
use submodlab_core::hard::{gen_hard, parse_ratio, HardInstanceParams};
use submodlab_core::OracleInstance;

/// Symmetric cut instance sized so that `⌊εn⌋ >= 3k` at `ε = 0.5`.
pub fn symmetric_cut(n: usize) -> OracleInstance {
    random_instance(Family::SymmetricCut, n, 0xbe7c).expect("valid family parameters")
}

pub fn coverage(n: usize) -> OracleInstance {
    random_instance(Family::Coverage, n, 0xbe7c).expect("valid family parameters")
}

/// The `(n, k, ε) = (10, 4, 1/2)` hard instance.
pub fn hard_small() -> OracleInstance {
    let params = HardInstanceParams::new(10, 4, parse_ratio("1/2").unwrap(), 1);
    gen_hard(&params).expect("divisible shape").0
}
