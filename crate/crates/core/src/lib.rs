//! Cardinality-constrained non-monotone submodular maximization in the
//! value-oracle model: streaming and fixed-parameter algorithms, hard
//! instance generators, property verifiers and factor-revealing programs.

pub mod error;
pub mod factor;
pub mod families;
pub mod fpt;
pub mod hard;
pub mod limits;
pub mod oracle;
pub mod properties;
pub mod search;
pub mod set;
pub mod stream;
pub mod streaming;

pub use error::{Error, Result};
pub use factor::{ProgramId, ProgramSpec};
pub use limits::{Limits, TOL};
pub use oracle::{symmetrize, CappedHyperedge, Kind, Meta, OracleInstance, OracleSession};
pub use search::Solution;
pub use set::{ElementId, ElementSet};
