//! Random-order streaming harness: stream orders, a gated buffer with
//! memory accounting, and collision/detection instrumentation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::OracleSession;
use crate::set::{ElementId, ElementSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OrderSource {
    UniformRandom { seed: u64 },
    Explicit,
}

/// A permutation of `0..n` in arrival order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamOrder {
    permutation: Vec<ElementId>,
    source: OrderSource,
}

impl StreamOrder {
    /// Uniformly random permutation from a seeded ChaCha8 generator.
    pub fn uniform(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOrder("stream must be non-empty".into()));
        }
        let mut permutation: Vec<ElementId> = (0..n as u32).map(ElementId).collect();
        permutation.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Ok(Self {
            permutation,
            source: OrderSource::UniformRandom { seed },
        })
    }

    pub fn explicit(n: usize, ids: &[u32]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOrder("stream must be non-empty".into()));
        }
        if ids.len() != n {
            return Err(Error::InvalidOrder(format!(
                "expected {n} elements, got {}",
                ids.len()
            )));
        }
        let mut seen = vec![false; n];
        for &id in ids {
            match seen.get_mut(id as usize) {
                Some(s) if !*s => *s = true,
                Some(_) => return Err(Error::InvalidOrder(format!("element {id} repeated"))),
                None => return Err(Error::InvalidOrder(format!("element {id} out of range"))),
            }
        }
        Ok(Self {
            permutation: ids.iter().copied().map(ElementId).collect(),
            source: OrderSource::Explicit,
        })
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn as_slice(&self) -> &[ElementId] {
        &self.permutation
    }

    pub fn source(&self) -> &OrderSource {
        &self.source
    }
}

/// Builds a stream order of `n` elements from `source`; an explicit source
/// takes its permutation from `explicit`.
pub fn make_stream(n: usize, source: OrderSource, explicit: &[u32]) -> Result<StreamOrder> {
    match source {
        OrderSource::UniformRandom { seed } => StreamOrder::uniform(n, seed),
        OrderSource::Explicit => StreamOrder::explicit(n, explicit),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryLedger {
    pub peak_stored: usize,
    pub stores: u64,
    pub drops: u64,
    pub gated_queries: u64,
}

/// Element slots of a streaming algorithm. Only stored elements are metered;
/// stored information is free.
#[derive(Clone, Debug)]
pub struct Buffer {
    stored: ElementSet,
    free: ElementSet,
    capacity: Option<usize>,
    arriving: Option<ElementId>,
    ledger: MemoryLedger,
}

impl Buffer {
    pub fn new(free: ElementSet, capacity: Option<usize>) -> Self {
        Self {
            stored: ElementSet::new(),
            free,
            capacity,
            arriving: None,
            ledger: MemoryLedger::default(),
        }
    }

    pub fn stored(&self) -> &ElementSet {
        &self.stored
    }

    pub fn free(&self) -> &ElementSet {
        &self.free
    }

    pub fn ledger(&self) -> &MemoryLedger {
        &self.ledger
    }

    pub fn arriving(&self) -> Option<ElementId> {
        self.arriving
    }

    /// Marks `e` as the element currently arriving; the previous arrival can
    /// no longer be stored.
    pub fn arrive(&mut self, e: ElementId) {
        self.arriving = Some(e);
    }

    pub fn store(&mut self, e: ElementId) -> Result<()> {
        if self.arriving != Some(e) || self.stored.contains(e) {
            return Err(Error::ProtocolViolation(format!(
                "element {e} is not the current arrival"
            )));
        }
        if let Some(cap) = self.capacity {
            if self.stored.len() >= cap {
                return Err(Error::CapacityExceeded { capacity: cap });
            }
        }
        self.stored.insert(e);
        self.ledger.stores += 1;
        self.ledger.peak_stored = self.ledger.peak_stored.max(self.stored.len());
        Ok(())
    }

    pub fn drop_element(&mut self, e: ElementId) -> Result<()> {
        if !self.stored.remove(e) {
            return Err(Error::ProtocolViolation(format!("element {e} is not stored")));
        }
        self.ledger.drops += 1;
        Ok(())
    }

    /// Fails with the first member of `s` outside `stored ∪ free`.
    pub fn check_gate(&self, s: &ElementSet) -> Result<()> {
        match s
            .iter()
            .find(|e| !self.stored.contains(*e) && !self.free.contains(*e))
        {
            Some(e) => Err(Error::OracleGateViolation { element: e.0 }),
            None => Ok(()),
        }
    }

    pub fn query(&mut self, session: &OracleSession<'_>, s: &ElementSet) -> Result<f64> {
        self.check_gate(s)?;
        let v = session.evaluate(s)?;
        self.ledger.gated_queries += 1;
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// An element of a bucket arrived while another of its elements was stored.
    Collision,
    /// Two elements of a bucket were stored at the same time, for the first time.
    Detection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamEvent {
    pub position: usize,
    /// Index into the bucket partition, from 0.
    pub bucket: usize,
    pub kind: EventKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionLog {
    pub events: Vec<StreamEvent>,
}

impl CollisionLog {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn first(&self, bucket: usize, kind: EventKind) -> Option<usize> {
        self.events
            .iter()
            .find(|e| e.bucket == bucket && e.kind == kind)
            .map(|e| e.position)
    }
}

/// Bucket bookkeeping for [`CollisionLog`].
#[derive(Clone, Debug)]
struct Buckets {
    sets: Vec<ElementSet>,
    owner: Vec<Option<usize>>,
    detected: Vec<bool>,
}

impl Buckets {
    fn new(n: usize, sets: Vec<ElementSet>) -> Self {
        let mut owner = vec![None; n];
        for (i, b) in sets.iter().enumerate() {
            for e in b {
                if let Some(slot) = owner.get_mut(e.index()) {
                    *slot = Some(i);
                }
            }
        }
        let detected = vec![false; sets.len()];
        Self {
            sets,
            owner,
            detected,
        }
    }

    fn of(&self, e: ElementId) -> Option<usize> {
        self.owner.get(e.index()).copied().flatten()
    }
}

/// Appends the events triggered by `arriving`, evaluated before the
/// algorithm reacts to it.
pub fn record_events(
    log: &mut CollisionLog,
    stored: &ElementSet,
    arriving: ElementId,
    position: usize,
    buckets: &[ElementSet],
) {
    if let Some(i) = buckets.iter().position(|b| b.contains(arriving)) {
        if buckets[i].intersection_len(stored) > 0 {
            log.events.push(StreamEvent {
                position,
                bucket: i,
                kind: EventKind::Collision,
            });
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Arrive,
    Store,
    Drop,
}

/// One line of the optional run transcript.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub position: usize,
    pub element: ElementId,
    pub action: Action,
    pub buffer_size: usize,
}

/// A single pass over a stream order with a gated buffer.
///
/// The harness hands out arrivals one at a time and offers no rewind; all
/// oracle access goes through [`StreamRun::query`].
pub struct StreamRun<'s, 'i> {
    order: &'s StreamOrder,
    session: &'s OracleSession<'i>,
    position: usize,
    buffer: Buffer,
    buckets: Option<Buckets>,
    log: CollisionLog,
    transcript: Option<Vec<TranscriptEntry>>,
}

impl<'s, 'i> StreamRun<'s, 'i> {
    pub fn new(order: &'s StreamOrder, session: &'s OracleSession<'i>, buffer: Buffer) -> Self {
        Self {
            order,
            session,
            position: 0,
            buffer,
            buckets: None,
            log: CollisionLog::default(),
            transcript: None,
        }
    }

    /// Enables collision/detection logging against a partition of buckets.
    pub fn with_buckets(mut self, buckets: Vec<ElementSet>) -> Self {
        self.buckets = Some(Buckets::new(self.session.n(), buckets));
        self
    }

    pub fn with_transcript(mut self) -> Self {
        self.transcript = Some(Vec::new());
        self
    }

    /// Number of elements that have arrived so far.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn remaining(&self) -> usize {
        self.order.len() - self.position
    }

    pub fn buffer(&self) -> &Buffer {
        &self.buffer
    }

    pub fn log(&self) -> &CollisionLog {
        &self.log
    }

    pub fn transcript(&self) -> Option<&[TranscriptEntry]> {
        self.transcript.as_deref()
    }

    fn note(&mut self, element: ElementId, action: Action) {
        let buffer_size = self.buffer.stored.len();
        let position = self.position.saturating_sub(1);
        if let Some(t) = self.transcript.as_mut() {
            t.push(TranscriptEntry {
                position,
                element,
                action,
                buffer_size,
            });
        }
    }

    pub fn next_arrival(&mut self) -> Option<ElementId> {
        let e = *self.order.as_slice().get(self.position)?;
        let position = self.position;
        self.position += 1;
        if let Some(b) = &self.buckets {
            if let Some(i) = b.of(e) {
                if b.sets[i].intersection_len(&self.buffer.stored) > 0 {
                    self.log.events.push(StreamEvent {
                        position,
                        bucket: i,
                        kind: EventKind::Collision,
                    });
                }
            }
        }
        self.buffer.arrive(e);
        self.note(e, Action::Arrive);
        Some(e)
    }

    pub fn store(&mut self, e: ElementId) -> Result<()> {
        self.buffer.store(e)?;
        if let Some(b) = self.buckets.as_mut() {
            if let Some(i) = b.of(e) {
                if !b.detected[i] && b.sets[i].intersection_len(&self.buffer.stored) >= 2 {
                    b.detected[i] = true;
                    self.log.events.push(StreamEvent {
                        position: self.position - 1,
                        bucket: i,
                        kind: EventKind::Detection,
                    });
                }
            }
        }
        self.note(e, Action::Store);
        Ok(())
    }

    pub fn drop_element(&mut self, e: ElementId) -> Result<()> {
        self.buffer.drop_element(e)?;
        self.note(e, Action::Drop);
        Ok(())
    }

    pub fn query(&mut self, s: &ElementSet) -> Result<f64> {
        self.buffer.query(self.session, s)
    }

    /// Consumes the run, returning the buffer, event log and transcript.
    pub fn finish(self) -> (Buffer, CollisionLog, Option<Vec<TranscriptEntry>>) {
        (self.buffer, self.log, self.transcript)
    }
}
