//! Value-oracle instances and query-counting sessions.
//!
//! An [`OracleInstance`] is an immutable, non-negative set function over the
//! ground set `{0, .., n-1}`. Algorithms never touch an instance directly;
//! they go through an [`OracleSession`], which counts every evaluation.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::set::{ElementId, ElementSet};

/// Directed hyperedge `(tail -> head)` with a cut cap.
///
/// Cut by `S` iff `|tail ∩ S| > 0` and `head ∉ S`; it then contributes
/// `min(|tail ∩ S|, cap)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CappedHyperedge {
    pub tail: ElementSet,
    pub head: ElementId,
    pub cap: u32,
}

impl CappedHyperedge {
    pub fn new(tail: ElementSet, head: ElementId, cap: u32) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::InvalidInstance("hyperedge tail is empty".into()));
        }
        if tail.contains(head) {
            return Err(Error::InvalidInstance(format!(
                "hyperedge head {head} lies in its tail"
            )));
        }
        if cap == 0 {
            return Err(Error::InvalidInstance("hyperedge cap must be >= 1".into()));
        }
        Ok(Self { tail, head, cap })
    }

    #[inline]
    fn cut_value(&self, s: &ElementSet) -> f64 {
        if s.contains(self.head) {
            return 0.0;
        }
        let hit = self.tail.intersection_len(s);
        hit.min(self.cap as usize) as f64
    }
}

/// The function families an instance can be built from.
#[derive(Clone, Debug)]
pub enum Kind {
    /// `f(S) = Σ_{e∈S} w_e`.
    Modular { weights: Vec<f64> },
    /// Capped directed-hypergraph cut plus a modular term.
    CutPlusModular {
        hyperedges: Vec<CappedHyperedge>,
        modular: Vec<f64>,
    },
    /// `f(S) = |⋃_{e∈S} sets[e]|`.
    Coverage { sets: Vec<ElementSet> },
    /// `f(S) = min(|S|, cap)`, a monotone stand-in with `f(X) = f(E)` once `|X| >= cap`.
    Plateau { cap: usize },
    /// Explicit value table indexed by the subset bitmask (`n <= 20`).
    /// Used for fixtures that are deliberately not submodular.
    Table { values: Vec<f64> },
    /// `g(S) = f(S) + f(E \ S) - f(E)`; `full_value` caches `f(E)`.
    Symmetrized {
        inner: Box<OracleInstance>,
        full_value: f64,
    },
    /// Pointwise sum of instances on the same ground set.
    Sum { parts: Vec<OracleInstance> },
}

/// Provenance recorded alongside an instance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub generator: String,
    /// Any further generator-specific payload (e.g. a hard-instance witness).
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl Meta {
    pub fn new(generator: impl Into<String>, seed: u64) -> Self {
        Self {
            seed,
            generator: generator.into(),
            extra: BTreeMap::new(),
        }
    }
}

/// An immutable non-negative set function over `{0, .., n-1}`.
#[derive(Clone, Debug)]
pub struct OracleInstance {
    n: usize,
    kind: Kind,
    meta: Meta,
}

const TABLE_MAX_N: usize = 20;

fn check_weights(what: &str, n: usize, w: &[f64]) -> Result<()> {
    if w.len() != n {
        return Err(Error::InvalidInstance(format!(
            "{what}: expected {n} weights, got {}",
            w.len()
        )));
    }
    if let Some(x) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidInstance(format!(
            "{what}: weight {x} is not a finite non-negative number"
        )));
    }
    Ok(())
}

impl OracleInstance {
    pub fn modular(weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        check_weights("modular", n, &weights)?;
        Ok(Self::raw(n, Kind::Modular { weights }))
    }

    pub fn cut_plus_modular(
        n: usize,
        hyperedges: Vec<CappedHyperedge>,
        modular: Vec<f64>,
    ) -> Result<Self> {
        check_weights("cut_plus_modular", n, &modular)?;
        for h in &hyperedges {
            let top = h.tail.max().map_or(0, ElementId::index).max(h.head.index());
            if top >= n {
                return Err(Error::InvalidInstance(format!(
                    "hyperedge references element {top} outside ground set of size {n}"
                )));
            }
        }
        Ok(Self::raw(n, Kind::CutPlusModular { hyperedges, modular }))
    }

    /// Coverage function; `sets[e]` lists the universe items covered by element `e`.
    pub fn coverage(sets: Vec<ElementSet>) -> Result<Self> {
        Ok(Self::raw(sets.len(), Kind::Coverage { sets }))
    }

    pub fn plateau(n: usize, cap: usize) -> Result<Self> {
        Ok(Self::raw(n, Kind::Plateau { cap }))
    }

    pub fn table(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > TABLE_MAX_N {
            return Err(Error::InvalidInstance(format!(
                "table instances are limited to n <= {TABLE_MAX_N}"
            )));
        }
        if values.len() != 1 << n {
            return Err(Error::InvalidInstance(format!(
                "table: expected {} values, got {}",
                1u64 << n,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("table: non-finite value".into()));
        }
        Ok(Self::raw(n, Kind::Table { values }))
    }

    pub fn sum(parts: Vec<OracleInstance>) -> Result<Self> {
        let n = parts
            .first()
            .map(|p| p.n)
            .ok_or_else(|| Error::InvalidInstance("sum of zero parts".into()))?;
        if parts.iter().any(|p| p.n != n) {
            return Err(Error::InvalidInstance(
                "sum parts have different ground sets".into(),
            ));
        }
        Ok(Self::raw(n, Kind::Sum { parts }))
    }

    fn raw(n: usize, kind: Kind) -> Self {
        Self {
            n,
            kind,
            meta: Meta::default(),
        }
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut Meta {
        &mut self.meta
    }

    pub fn ground_set(&self) -> ElementSet {
        ElementSet::full(self.n)
    }

    /// Short family name as used in the instance file format.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Modular { .. } => "modular",
            Kind::CutPlusModular { .. } => "cut_plus_modular",
            Kind::Coverage { .. } => "coverage",
            Kind::Plateau { .. } => "plateau",
            Kind::Table { .. } => "table",
            Kind::Symmetrized { .. } => "symmetrized",
            Kind::Sum { .. } => "sum",
        }
    }

    /// Rejects sets with members outside the ground set.
    pub fn check_set(&self, s: &ElementSet) -> Result<()> {
        match s.max() {
            Some(e) if e.index() >= self.n => Err(Error::InvalidSet {
                element: e.0,
                n: self.n,
            }),
            _ => Ok(()),
        }
    }

    /// `f(S)` without query accounting. Prefer [`OracleSession::evaluate`].
    pub fn value(&self, s: &ElementSet) -> Result<f64> {
        self.check_set(s)?;
        Ok(self.value_unchecked(s))
    }

    pub(crate) fn value_unchecked(&self, s: &ElementSet) -> f64 {
        match &self.kind {
            Kind::Modular { weights } => s.iter().map(|e| weights[e.index()]).sum(),
            Kind::CutPlusModular {
                hyperedges,
                modular,
            } => {
                let cut: f64 = hyperedges.iter().map(|h| h.cut_value(s)).sum();
                cut + s.iter().map(|e| modular[e.index()]).sum::<f64>()
            }
            Kind::Coverage { sets } => {
                let mut covered = ElementSet::new();
                for e in s {
                    covered.union_with(&sets[e.index()]);
                }
                covered.len() as f64
            }
            Kind::Plateau { cap } => s.len().min(*cap) as f64,
            Kind::Table { values } => {
                // check_set bounds members by n <= 20, so the mask fits.
                values[s.to_mask().unwrap_or(0) as usize]
            }
            Kind::Symmetrized { inner, full_value } => {
                let rest = s.complement(self.n);
                inner.value_unchecked(s) + inner.value_unchecked(&rest) - full_value
            }
            Kind::Sum { parts } => parts.iter().map(|p| p.value_unchecked(s)).sum(),
        }
    }

    /// Serializes to the JSON instance format with sorted keys.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(InstanceRepr::from(self)).expect("instance serializes");
        serde_json::to_string_pretty(&value).expect("json value serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: InstanceRepr = serde_json::from_str(text)?;
        repr.try_into()
    }
}

/// Wraps `inner` as `g(S) = f(S) + f(E \ S) - f(E)`, caching `f(E)`.
pub fn symmetrize(inner: OracleInstance) -> OracleInstance {
    let full_value = inner.value_unchecked(&inner.ground_set());
    let n = inner.n;
    OracleInstance::raw(
        n,
        Kind::Symmetrized {
            inner: Box::new(inner),
            full_value,
        },
    )
}

/// Query-counting access to an instance. One session per algorithm run.
#[derive(Debug)]
pub struct OracleSession<'a> {
    instance: &'a OracleInstance,
    queries: AtomicU64,
}

impl<'a> OracleSession<'a> {
    pub fn new(instance: &'a OracleInstance) -> Self {
        Self {
            instance,
            queries: AtomicU64::new(0),
        }
    }

    pub fn instance(&self) -> &'a OracleInstance {
        self.instance
    }

    pub fn n(&self) -> usize {
        self.instance.n
    }

    /// `f(S)`; one query.
    pub fn evaluate(&self, s: &ElementSet) -> Result<f64> {
        self.instance.check_set(s)?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.instance.value_unchecked(s))
    }

    /// `f(X | S) = f(X ∪ S) - f(S)`; two queries.
    pub fn marginal(&self, x: &ElementSet, s: &ElementSet) -> Result<f64> {
        let joint = self.evaluate(&x.union(s))?;
        Ok(joint - self.evaluate(s)?)
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

#[derive(Serialize, Deserialize)]
struct HyperedgeRepr {
    tail: Vec<u32>,
    head: u32,
    cap: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum KindRepr {
    Modular {
        weights: Vec<f64>,
    },
    CutPlusModular {
        hyperedges: Vec<HyperedgeRepr>,
        modular: Vec<f64>,
    },
    Coverage {
        sets: Vec<Vec<u32>>,
    },
    Plateau {
        cap: usize,
    },
    Table {
        values: Vec<f64>,
    },
    Symmetrized {
        inner: Box<InstanceRepr>,
    },
    Sum {
        parts: Vec<InstanceRepr>,
    },
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    n: usize,
    #[serde(flatten)]
    kind: KindRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Meta>,
}

impl InstanceRepr {
    fn nested(inst: &OracleInstance) -> Self {
        let mut r = Self::from(inst);
        if inst.meta == Meta::default() {
            r.meta = None;
        }
        r
    }
}

impl From<&OracleInstance> for InstanceRepr {
    fn from(inst: &OracleInstance) -> Self {
        let kind = match &inst.kind {
            Kind::Modular { weights } => KindRepr::Modular {
                weights: weights.clone(),
            },
            Kind::CutPlusModular {
                hyperedges,
                modular,
            } => KindRepr::CutPlusModular {
                hyperedges: hyperedges
                    .iter()
                    .map(|h| HyperedgeRepr {
                        tail: h.tail.ids(),
                        head: h.head.0,
                        cap: h.cap,
                    })
                    .collect(),
                modular: modular.clone(),
            },
            Kind::Coverage { sets } => KindRepr::Coverage {
                sets: sets.iter().map(ElementSet::ids).collect(),
            },
            Kind::Plateau { cap } => KindRepr::Plateau { cap: *cap },
            Kind::Table { values } => KindRepr::Table {
                values: values.clone(),
            },
            Kind::Symmetrized { inner, .. } => KindRepr::Symmetrized {
                inner: Box::new(InstanceRepr::nested(inner)),
            },
            Kind::Sum { parts } => KindRepr::Sum {
                parts: parts.iter().map(InstanceRepr::nested).collect(),
            },
        };
        Self {
            n: inst.n,
            kind,
            meta: Some(inst.meta.clone()),
        }
    }
}

impl TryFrom<InstanceRepr> for OracleInstance {
    type Error = Error;

    fn try_from(r: InstanceRepr) -> Result<Self> {
        let n = r.n;
        let inst = match r.kind {
            KindRepr::Modular { weights } => OracleInstance::modular(weights)?,
            KindRepr::CutPlusModular {
                hyperedges,
                modular,
            } => {
                let edges = hyperedges
                    .into_iter()
                    .map(|h| {
                        CappedHyperedge::new(h.tail.into_iter().collect(), ElementId(h.head), h.cap)
                    })
                    .collect::<Result<Vec<_>>>()?;
                OracleInstance::cut_plus_modular(n, edges, modular)?
            }
            KindRepr::Coverage { sets } => {
                OracleInstance::coverage(sets.into_iter().map(|s| s.into_iter().collect()).collect())?
            }
            KindRepr::Plateau { cap } => OracleInstance::plateau(n, cap)?,
            KindRepr::Table { values } => OracleInstance::table(n, values)?,
            KindRepr::Symmetrized { inner } => symmetrize((*inner).try_into()?),
            KindRepr::Sum { parts } => OracleInstance::sum(
                parts
                    .into_iter()
                    .map(OracleInstance::try_from)
                    .collect::<Result<Vec<_>>>()?,
            )?,
        };
        if inst.n != n {
            return Err(Error::InvalidInstance(format!(
                "declared n = {n} but payload describes {} elements",
                inst.n
            )));
        }
        Ok(inst.with_meta(r.meta.unwrap_or_default()))
    }
}

/// Small named instances used across tests, docs and the CLI.
pub mod fixtures {
    use super::*;
    use crate::set::set_of;

    /// Four elements, hyperedges `{0,1} -> 2` and `{3} -> 1`, cap 1, no modular part.
    pub fn toy_cut() -> OracleInstance {
        let edges = vec![
            CappedHyperedge::new(set_of(&[0, 1]), ElementId(2), 1).unwrap(),
            CappedHyperedge::new(set_of(&[3]), ElementId(1), 1).unwrap(),
        ];
        OracleInstance::cut_plus_modular(4, edges, vec![0.0; 4])
            .unwrap()
            .with_meta(Meta::new("toy-cut", 0))
    }

    /// Modular weights `[1, 5, 3, 2, 9, 4]`.
    pub fn mod6() -> OracleInstance {
        OracleInstance::modular(vec![1.0, 5.0, 3.0, 2.0, 9.0, 4.0])
            .unwrap()
            .with_meta(Meta::new("mod-6", 0))
    }

    /// Coverage `e0 -> {a,b}`, `e1 -> {b,c}`, `e2 -> {d}`.
    pub fn cover3() -> OracleInstance {
        OracleInstance::coverage(vec![set_of(&[0, 1]), set_of(&[1, 2]), set_of(&[3])])
            .unwrap()
            .with_meta(Meta::new("cover-3", 0))
    }

    /// Inner function with `∅ -> 0, {0} -> 2, {1} -> 2, {0,1} -> 3`.
    pub fn sym2_inner() -> OracleInstance {
        OracleInstance::coverage(vec![set_of(&[0, 1]), set_of(&[1, 2])])
            .unwrap()
            .with_meta(Meta::new("sym-2-inner", 0))
    }

    pub fn sym2() -> OracleInstance {
        symmetrize(sym2_inner()).with_meta(Meta::new("sym-2", 0))
    }

    /// `min(|X|, cap)` on `n` elements.
    pub fn plateau(n: usize, cap: usize) -> OracleInstance {
        OracleInstance::plateau(n, cap)
            .unwrap()
            .with_meta(Meta::new("plateau", 0))
    }
}
