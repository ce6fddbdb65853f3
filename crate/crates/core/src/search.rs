//! Exhaustive search over size-bounded subsets.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::limits::{subsets_up_to, Limits, TOL};
use crate::set::{ElementId, ElementSet};

/// A feasible output of some maximization procedure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub set: ElementSet,
    pub value: f64,
    /// Cardinality budget the solution was built for.
    pub k: usize,
    /// Greedy iterations that added a virtual zero-gain dummy instead of an element.
    pub dummies: usize,
}

impl Solution {
    pub fn new(set: ElementSet, value: f64, k: usize) -> Self {
        Self {
            set,
            value,
            k,
            dummies: 0,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.set.len() <= self.k
    }
}

/// Visits every subset of `pool` with at most `k` members, in lexicographic
/// order of the sorted member lists (so `∅` first, then `{p0}`, `{p0,p1}`, ..).
///
/// The visitor sees each subset exactly once; `pool` must be sorted.
pub fn for_each_subset_up_to<F>(pool: &[ElementId], k: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&ElementSet) -> Result<()>,
{
    let mut current = ElementSet::new();
    visit(&current)?;
    if k == 0 {
        return Ok(());
    }
    // stack[i] = index into pool of the i-th chosen member
    let mut stack: Vec<usize> = Vec::with_capacity(k);
    let mut next = 0usize;
    loop {
        if stack.len() < k && next < pool.len() {
            stack.push(next);
            current.insert(pool[next]);
            visit(&current)?;
            next += 1;
        } else {
            let Some(last) = stack.pop() else {
                return Ok(());
            };
            current.remove(pool[last]);
            next = last + 1;
        }
    }
}

/// Best subset of `pool` of size at most `k` under `eval`.
///
/// Ties (within [`TOL`]) go to the lexicographically smallest member list.
/// Returns the winning solution and how many subsets tie with it.
pub fn best_subset<F>(
    pool: &ElementSet,
    k: usize,
    limits: &Limits,
    mut eval: F,
) -> Result<(Solution, u64)>
where
    F: FnMut(&ElementSet) -> Result<f64>,
{
    let members = pool.to_vec();
    Limits::check(
        "max_subsets",
        subsets_up_to(members.len(), k),
        limits.max_subsets,
    )?;
    let mut best: Option<(ElementSet, f64)> = None;
    let mut ties = 0u64;
    for_each_subset_up_to(&members, k, |s| {
        let v = eval(s)?;
        match &best {
            Some((_, bv)) if v > bv + TOL => {
                best = Some((s.clone(), v));
                ties = 1;
            }
            Some((_, bv)) if (v - bv).abs() <= TOL => ties += 1,
            Some(_) => {}
            None => {
                best = Some((s.clone(), v));
                ties = 1;
            }
        }
        Ok(())
    })?;
    let (set, value) = best.expect("the empty set is always visited");
    Ok((Solution::new(set, value, k), ties))
}
