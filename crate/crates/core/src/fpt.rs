//! Greedy with an initial set, the guess-and-repeat FPT search, its
//! recursive extension, and the combined FPT⁺ driver.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{subsets_up_to, Limits, TOL};
use crate::oracle::{OracleInstance, OracleSession};
use crate::search::{for_each_subset_up_to, Solution};
use crate::set::{ElementId, ElementSet};
use crate::stream::StreamOrder;
use crate::streaming::{final_search, stream_phase, StreamConfig, StreamPhase};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub picks: Vec<ElementId>,
    pub gains: Vec<f64>,
    pub dummies: usize,
}

/// Greedy from `init` over `available`, to size `k`.
///
/// When the best marginal is negative (or nothing is left) a virtual dummy
/// with gain 0 is recorded instead; every later iteration is then a dummy too.
pub fn greedy_from(
    session: &OracleSession<'_>,
    available: &ElementSet,
    init: &ElementSet,
    k: usize,
) -> Result<(GreedyTrace, Solution)> {
    if init.len() > k {
        return Err(Error::Param(format!(
            "initial set has {} elements, budget is {k}",
            init.len()
        )));
    }
    session.instance().check_set(init)?;
    session.instance().check_set(available)?;
    let mut x = init.clone();
    let mut value = session.evaluate(&x)?;
    let mut trace = GreedyTrace::default();
    let steps = k - init.len();
    for step in 0..steps {
        let mut best: Option<(ElementId, f64)> = None;
        for e in available.iter().filter(|e| !x.contains(*e)) {
            let v = session.evaluate(&x.union(&ElementSet::singleton(e)))?;
            if best.is_none_or(|(_, bv)| v > bv + TOL) {
                best = Some((e, v));
            }
        }
        match best {
            Some((e, v)) if v - value >= 0.0 => {
                trace.picks.push(e);
                trace.gains.push(v - value);
                x.insert(e);
                value = v;
            }
            _ => {
                trace.dummies = steps - step;
                break;
            }
        }
    }
    let mut sol = Solution::new(x, value, k);
    sol.dummies = trace.dummies;
    Ok((trace, sol))
}

#[derive(Clone, Debug)]
pub struct FptConfig {
    pub stream: StreamConfig,
    /// Greedy repetitions per guess, and recursion depth.
    pub t: usize,
    /// Clear the accumulated `I′` at the start of every guess.
    pub reset_selected_per_guess: bool,
    /// Restrict each recursive call to guesses extending the caller's guess.
    pub pass_guess: bool,
    /// Record per-guess greedy runs.
    pub trace: bool,
}

impl FptConfig {
    pub fn new(k: usize, eps: f64, t: usize) -> Self {
        Self {
            stream: StreamConfig::new(k, eps),
            t,
            reset_selected_per_guess: false,
            pass_guess: false,
            trace: false,
        }
    }

    fn k(&self) -> usize {
        self.stream.k
    }

    fn limits(&self) -> &Limits {
        &self.stream.limits
    }
}

/// One outer iteration: the guess, its greedy runs, and whether the
/// available set was fully restored afterwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuessRecord {
    pub depth: usize,
    pub guess: ElementSet,
    pub runs: Vec<ElementSet>,
    pub restored: bool,
}

#[derive(Clone, Debug)]
pub struct FptOutput {
    pub solution: Solution,
    pub stream: StreamPhase,
    pub guesses: u64,
    pub greedy_runs: u64,
    pub recursive_calls: u64,
    pub queries: u64,
    pub trace: Vec<GuessRecord>,
}

struct Counters {
    guesses: u64,
    greedy_runs: u64,
    calls: u64,
    trace: Option<Vec<GuessRecord>>,
}

impl Counters {
    fn new(trace: bool) -> Self {
        Self {
            guesses: 0,
            greedy_runs: 0,
            calls: 0,
            trace: trace.then(Vec::new),
        }
    }
}

/// `T` greedy runs from `guess`, each removing its picks from availability;
/// availability is restored on return. Returns the union of the picks.
fn repeated_greedy(
    session: &OracleSession<'_>,
    available: &mut ElementSet,
    guess: &ElementSet,
    cfg: &FptConfig,
    depth: usize,
    counters: &mut Counters,
) -> Result<ElementSet> {
    let before = available.clone();
    let mut picked = ElementSet::new();
    let mut runs = Vec::new();
    for _ in 0..cfg.t {
        let (trace, _) = greedy_from(session, available, guess, cfg.k())?;
        counters.greedy_runs += 1;
        let xi: ElementSet = trace.picks.iter().copied().collect();
        available.difference_with(&xi);
        picked.union_with(&xi);
        if counters.trace.is_some() {
            runs.push(xi);
        }
    }
    available.union_with(&picked);
    if let Some(t) = counters.trace.as_mut() {
        t.push(GuessRecord {
            depth,
            guess: guess.clone(),
            runs,
            restored: *available == before,
        });
    }
    Ok(picked)
}

fn check_guesses(pool: usize, k: usize, limits: &Limits) -> Result<()> {
    Limits::check("max_guesses", subsets_up_to(pool, k), limits.max_guesses)
}

fn check_t(t: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::Param("T must be at least 1".into()));
    }
    Ok(())
}

/// Stream pass, then for every size-`<= k` guess inside `H`: `T` greedy runs
/// without replacement and an exhaustive search over `S_{3k} ∪ H ∪ I`.
pub fn fpt(instance: &OracleInstance, order: &StreamOrder, cfg: &FptConfig) -> Result<FptOutput> {
    check_t(cfg.t)?;
    let session = OracleSession::new(instance);
    let (phase, _) = stream_phase(&session, order, &cfg.stream)?;
    let k = cfg.k();
    let h = phase.state.h.clone();
    let base = phase.state.pool();
    check_guesses(h.len(), k, cfg.limits())?;

    let ground = instance.ground_set();
    let mut available = ground.clone();
    let mut counters = Counters::new(cfg.trace);
    let mut best = Solution::new(ElementSet::new(), session.evaluate(&ElementSet::new())?, k);

    for_each_subset_up_to(&h.to_vec(), k, |guess| {
        counters.guesses += 1;
        let picked = repeated_greedy(&session, &mut available, guess, cfg, 1, &mut counters)?;
        let candidate = final_search(&session, &base.union(&picked), k, cfg.limits())?;
        if candidate.value > best.value + TOL {
            best = candidate;
        }
        Ok(())
    })?;

    Ok(FptOutput {
        solution: best,
        stream: phase,
        guesses: counters.guesses,
        greedy_runs: counters.greedy_runs,
        recursive_calls: 0,
        queries: session.query_count(),
        trace: counters.trace.unwrap_or_default(),
    })
}

struct Recursion<'a, 'i> {
    session: &'a OracleSession<'i>,
    cfg: &'a FptConfig,
    counters: Counters,
    available: ElementSet,
    empty_value: f64,
    leaves: HashMap<ElementSet, Solution>,
}

impl Recursion<'_, '_> {
    fn call(&mut self, pool: &ElementSet, t: usize, passed: Option<&ElementSet>) -> Result<Solution> {
        let k = self.cfg.k();
        let limits = *self.cfg.limits();
        self.counters.calls += 1;
        Limits::check(
            "max_recursive_calls",
            self.counters.calls as u128,
            limits.max_recursive_calls,
        )?;
        if t > self.cfg.t {
            // every guess at this depth ends in the same search over `pool`
            if let Some(s) = self.leaves.get(pool) {
                return Ok(s.clone());
            }
            let s = final_search(self.session, pool, k, &limits)?;
            self.leaves.insert(pool.clone(), s.clone());
            return Ok(s);
        }

        let (fixed, free) = match passed {
            Some(g) if self.cfg.pass_guess => (g.clone(), pool.difference(g)),
            _ => (ElementSet::new(), pool.clone()),
        };
        let room = k.saturating_sub(fixed.len());
        check_guesses(free.len(), room, &limits)?;

        let mut best = Solution::new(ElementSet::new(), self.empty_value, k);
        let mut selected = ElementSet::new();
        let free_members = free.to_vec();
        let mut guesses = Vec::new();
        for_each_subset_up_to(&free_members, room, |g| {
            guesses.push(g.union(&fixed));
            Ok(())
        })?;
        for guess in guesses {
            self.counters.guesses += 1;
            if self.cfg.reset_selected_per_guess {
                selected = ElementSet::new();
            }
            let picked = repeated_greedy(
                self.session,
                &mut self.available,
                &guess,
                self.cfg,
                t,
                &mut self.counters,
            )?;
            selected.union_with(&picked);
            let sub = self.call(&pool.union(&selected), t + 1, Some(&guess))?;
            if sub.value > best.value + TOL {
                best = sub;
            }
        }
        Ok(best)
    }
}

/// Recursive guess-and-extend search starting from candidate pool `pool` at
/// depth `t`. Beyond depth `T` it is an exhaustive search over the pool.
pub fn recursive(
    session: &OracleSession<'_>,
    pool: &ElementSet,
    t: usize,
    cfg: &FptConfig,
) -> Result<(Solution, u64, u64, u64, Vec<GuessRecord>)> {
    session.instance().check_set(pool)?;
    let mut r = Recursion {
        session,
        cfg,
        counters: Counters::new(cfg.trace),
        available: session.instance().ground_set(),
        empty_value: session.evaluate(&ElementSet::new())?,
        leaves: HashMap::new(),
    };
    let sol = r.call(pool, t, None)?;
    let c = r.counters;
    Ok((sol, c.guesses, c.greedy_runs, c.calls, c.trace.unwrap_or_default()))
}

/// Stream pass, then the recursive search from `S_{3k} ∪ H` at depth 1.
pub fn fpt_plus(
    instance: &OracleInstance,
    order: &StreamOrder,
    cfg: &FptConfig,
) -> Result<FptOutput> {
    let session = OracleSession::new(instance);
    let (phase, _) = stream_phase(&session, order, &cfg.stream)?;
    let (solution, guesses, greedy_runs, recursive_calls, trace) =
        recursive(&session, &phase.state.pool(), 1, cfg)?;
    Ok(FptOutput {
        solution,
        stream: phase,
        guesses,
        greedy_runs,
        recursive_calls,
        queries: session.query_count(),
        trace,
    })
}

/// Plain greedy from the empty set over the whole ground set.
pub fn greedy(instance: &OracleInstance, k: usize) -> Result<(GreedyTrace, Solution, u64)> {
    let session = OracleSession::new(instance);
    let (trace, sol) = greedy_from(&session, &instance.ground_set(), &ElementSet::new(), k)?;
    Ok((trace, sol, session.query_count()))
}
