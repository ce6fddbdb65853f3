//! Seeded random instances of every shipped function family.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{symmetrize, CappedHyperedge, Meta, OracleInstance};
use crate::set::{ElementId, ElementSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Integer weights in `1..=20`.
    Modular,
    /// A permutation of `1..=n` as weights.
    DistinctModular,
    /// Each element covers a random subset of a universe of size `n`.
    Coverage,
    /// Random capped hyperedges plus small modular weights.
    CutPlusModular,
    /// Symmetrization of a random cut plus modular instance.
    SymmetricCut,
    /// Coverage plus cut plus modular.
    Sum,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Modular,
        Family::DistinctModular,
        Family::Coverage,
        Family::CutPlusModular,
        Family::SymmetricCut,
        Family::Sum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Modular => "modular",
            Family::DistinctModular => "distinct_modular",
            Family::Coverage => "coverage",
            Family::CutPlusModular => "cut_plus_modular",
            Family::SymmetricCut => "symmetric_cut",
            Family::Sum => "sum",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Param(format!("unknown family `{s}`")))
    }
}

fn modular(rng: &mut ChaCha8Rng, n: usize) -> Result<OracleInstance> {
    OracleInstance::modular((0..n).map(|_| rng.random_range(1..=20) as f64).collect())
}

fn coverage(rng: &mut ChaCha8Rng, n: usize) -> Result<OracleInstance> {
    let sets = (0..n)
        .map(|_| (0..n as u32).filter(|_| rng.random_bool(0.3)).collect())
        .collect();
    OracleInstance::coverage(sets)
}

fn cut(rng: &mut ChaCha8Rng, n: usize) -> Result<OracleInstance> {
    let mut edges = Vec::new();
    for _ in 0..2 * n {
        let head = rng.random_range(0..n as u32);
        let tail: ElementSet = (0..n as u32)
            .filter(|&v| v != head && rng.random_bool(0.25))
            .collect();
        if tail.is_empty() {
            continue;
        }
        let cap = rng.random_range(1..=tail.len() as u32);
        edges.push(CappedHyperedge::new(tail, ElementId(head), cap)?);
    }
    let weights = (0..n).map(|_| rng.random_range(0..=2) as f64).collect();
    OracleInstance::cut_plus_modular(n, edges, weights)
}

/// A random instance of `family` on `n` elements, deterministic in `seed`.
pub fn random_instance(family: Family, n: usize, seed: u64) -> Result<OracleInstance> {
    if n == 0 {
        return Err(Error::Param("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = match family {
        Family::Modular => modular(&mut rng, n)?,
        Family::DistinctModular => {
            let mut w: Vec<f64> = (1..=n).map(|x| x as f64).collect();
            w.shuffle(&mut rng);
            OracleInstance::modular(w)?
        }
        Family::Coverage => coverage(&mut rng, n)?,
        Family::CutPlusModular => cut(&mut rng, n)?,
        Family::SymmetricCut => symmetrize(cut(&mut rng, n)?),
        Family::Sum => OracleInstance::sum(vec![coverage(&mut rng, n)?, cut(&mut rng, n)?])?,
    };
    Ok(inst.with_meta(Meta::new(format!("random-{family}"), seed)))
}
