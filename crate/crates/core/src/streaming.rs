//! The window-greedy random-order streaming algorithm with a bounded
//! candidate set `H` and a final exhaustive search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{Limits, TOL};
use crate::oracle::{OracleInstance, OracleSession};
use crate::search::{best_subset, Solution};
use crate::set::{ElementId, ElementSet};
use crate::stream::{Buffer, CollisionLog, MemoryLedger, StreamOrder, StreamRun, TranscriptEntry};

/// `⌈18 k² ln k / ε⌉`, with `ln 1` taken as 1.
pub fn h_threshold(k: usize, eps: f64) -> usize {
    let ln_k = if k <= 1 { 1.0 } else { (k as f64).ln() };
    (18.0 * (k * k) as f64 * ln_k / eps).ceil() as usize
}

/// `⌊εn⌋`, robust to representation error in `ε`.
pub fn prefix_len(n: usize, eps: f64) -> usize {
    (eps * n as f64 + 1e-9).floor() as usize
}

#[derive(Clone, Debug)]
pub struct StreamConfig {
    pub k: usize,
    pub eps: f64,
    /// Replaces the `|H|` threshold when set.
    pub threshold: Option<usize>,
    /// Elements queryable without being stored.
    pub free: ElementSet,
    pub capacity: Option<usize>,
    /// Bucket partition for collision logging.
    pub buckets: Option<Vec<ElementSet>>,
    pub transcript: bool,
    pub limits: Limits,
}

impl StreamConfig {
    pub fn new(k: usize, eps: f64) -> Self {
        Self {
            k,
            eps,
            threshold: None,
            free: ElementSet::new(),
            capacity: None,
            buckets: None,
            transcript: false,
            limits: Limits::default(),
        }
    }

    pub fn threshold(&self) -> usize {
        self.threshold.unwrap_or_else(|| h_threshold(self.k, self.eps))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Param("k must be at least 1".into()));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::Param(format!("eps {} outside (0, 1]", self.eps)));
        }
        let prefix = prefix_len(n, self.eps);
        if prefix < 3 * self.k {
            return Err(Error::Param(format!(
                "floor(eps * n) = {prefix} is smaller than 3k = {}",
                3 * self.k
            )));
        }
        Ok(())
    }
}

/// What the streaming pass keeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamAlgState {
    pub window_size: usize,
    /// `e_1 .. e_{3k}` in window order.
    pub selected: Vec<ElementId>,
    /// `f(S_i)` for `i = 0 .. 3k`.
    pub prefix_values: Vec<f64>,
    pub h: ElementSet,
    pub threshold: usize,
}

impl StreamAlgState {
    pub fn s_final(&self) -> ElementSet {
        self.selected.iter().copied().collect()
    }

    /// `S_{3k} ∪ H`.
    pub fn pool(&self) -> ElementSet {
        self.s_final().union(&self.h)
    }

    /// `f(e_i | S_{i-1})`, for `i` from 1.
    pub fn gain(&self, i: usize) -> f64 {
        self.prefix_values[i] - self.prefix_values[i - 1]
    }
}

/// Result of the streaming pass, before the final search.
#[derive(Clone, Debug)]
pub struct StreamPhase {
    pub state: StreamAlgState,
    pub ledger: MemoryLedger,
    pub log: CollisionLog,
    pub transcript: Option<Vec<TranscriptEntry>>,
}

#[derive(Clone, Debug)]
pub struct StreamOutput {
    pub solution: Solution,
    pub phase: StreamPhase,
    pub queries: u64,
}

/// Single pass: window greedy over the first `3k` windows of the prefix, then
/// threshold admission into `H` for the rest. All queries are gated.
pub fn stream_phase(
    session: &OracleSession<'_>,
    order: &StreamOrder,
    cfg: &StreamConfig,
) -> Result<(StreamPhase, Buffer)> {
    let n = session.n();
    if order.len() != n {
        return Err(Error::InvalidOrder(format!(
            "order has {} elements, instance has {n}",
            order.len()
        )));
    }
    cfg.validate(n)?;
    let k3 = 3 * cfg.k;
    let window_size = prefix_len(n, cfg.eps) / k3;
    let threshold = cfg.threshold();

    let mut run = StreamRun::new(order, session, Buffer::new(cfg.free.clone(), cfg.capacity));
    if let Some(b) = &cfg.buckets {
        run = run.with_buckets(b.clone());
    }
    if cfg.transcript {
        run = run.with_transcript();
    }

    let mut s = ElementSet::new();
    let mut selected = Vec::with_capacity(k3);
    let mut prefix_values = Vec::with_capacity(k3 + 1);
    prefix_values.push(run.query(&s)?);

    for _ in 0..k3 {
        let mut best: Option<(ElementId, f64)> = None;
        for _ in 0..window_size {
            let e = run.next_arrival().expect("windows fit in the stream");
            run.store(e)?;
            let v = run.query(&s.union(&ElementSet::singleton(e)))?;
            let replace = match best {
                None => true,
                Some((b, bv)) => v > bv + TOL || ((v - bv).abs() <= TOL && e < b),
            };
            if replace {
                if let Some((b, _)) = best {
                    run.drop_element(b)?;
                }
                best = Some((e, v));
            } else {
                run.drop_element(e)?;
            }
        }
        let (e, v) = best.expect("window_size >= 1");
        s.insert(e);
        selected.push(e);
        prefix_values.push(v);
    }

    let gains: Vec<f64> = (1..=k3).map(|i| prefix_values[i] - prefix_values[i - 1]).collect();
    let mut prefix_sets = Vec::with_capacity(k3);
    let mut acc = ElementSet::new();
    for &e in &selected {
        prefix_sets.push(acc.clone());
        acc.insert(e);
    }

    let mut h = ElementSet::new();
    while let Some(e) = run.next_arrival() {
        if h.len() >= threshold {
            continue;
        }
        run.store(e)?;
        let mut admit = false;
        for i in 0..k3 {
            let with_e = prefix_sets[i].union(&ElementSet::singleton(e));
            let gain = run.query(&with_e)? - prefix_values[i];
            if gain > gains[i] + TOL {
                admit = true;
                break;
            }
        }
        if admit {
            h.insert(e);
        } else {
            run.drop_element(e)?;
        }
    }

    let state = StreamAlgState {
        window_size,
        selected,
        prefix_values,
        h,
        threshold,
    };
    let (buffer, log, transcript) = run.finish();
    let phase = StreamPhase {
        state,
        ledger: *buffer.ledger(),
        log,
        transcript,
    };
    Ok((phase, buffer))
}

/// Best subset of `pool` with at most `k` members; lexicographic tie-break.
pub fn final_search(
    session: &OracleSession<'_>,
    pool: &ElementSet,
    k: usize,
    limits: &Limits,
) -> Result<Solution> {
    session.instance().check_set(pool)?;
    best_subset(pool, k, limits, |x| session.evaluate(x)).map(|(s, _)| s)
}

/// Runs the streaming algorithm end to end on `instance` in the given order.
pub fn symmetric_stream(
    instance: &OracleInstance,
    order: &StreamOrder,
    cfg: &StreamConfig,
) -> Result<StreamOutput> {
    let session = OracleSession::new(instance);
    let (mut phase, mut buffer) = stream_phase(&session, order, cfg)?;
    let pool = phase.state.pool();
    let (solution, _) = best_subset(&pool, cfg.k, &cfg.limits, |x| buffer.query(&session, x))?;
    phase.ledger = *buffer.ledger();
    Ok(StreamOutput {
        solution,
        phase,
        queries: session.query_count(),
    })
}
