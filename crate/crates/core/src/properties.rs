//! Exhaustive and sampled verifiers for structural properties of set
//! functions, and the brute-force optimum used as ground truth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::limits::{Limits, TOL};
use crate::oracle::{OracleInstance, OracleSession};
use crate::search::best_subset;
use crate::set::{ElementId, ElementSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Submodular,
    Symmetric,
    NonNegative,
    Monotone,
    SubsampleBound,
    SymmetricNoHarm,
}

/// How a property is scanned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Every tuple; requires `n <= Limits::exhaustive_max_n`.
    Exhaustive,
    /// `trials` uniformly drawn tuples from a seeded generator.
    Sampled { trials: u64, seed: u64 },
}

/// A concrete violation, carrying enough to re-evaluate it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Counterexample {
    /// `f(S+i) - f(S) < f(T+i) - f(T)` with `S ⊆ T`, `i ∉ T`.
    Submodular {
        s: ElementSet,
        t: ElementSet,
        element: ElementId,
        gain_s: f64,
        gain_t: f64,
    },
    /// `f(S) != f(E \ S)`.
    Symmetric {
        set: ElementSet,
        value: f64,
        complement_value: f64,
    },
    NonNegative { set: ElementSet, value: f64 },
    /// `f(S+i) < f(S)`.
    Monotone {
        set: ElementSet,
        element: ElementId,
        before: f64,
        after: f64,
    },
    /// `E[f(R)] < p f(T) + (1-p) f(∅)`.
    SubsampleBound {
        t: ElementSet,
        p: f64,
        expected: f64,
        bound: f64,
    },
    /// `f(X | Y) < -f(X)` for disjoint `X`, `Y`.
    NoHarm {
        x: ElementSet,
        y: ElementSet,
        marginal: f64,
        value_x: f64,
    },
}

impl Counterexample {
    /// Re-evaluates the recorded sets on `inst` and reports whether the
    /// violation is genuine.
    pub fn is_violation(&self, inst: &OracleInstance) -> Result<bool> {
        let f = |s: &ElementSet| inst.value(s);
        Ok(match self {
            Counterexample::Submodular { s, t, element, .. } => {
                if !s.is_subset(t) || t.contains(*element) {
                    return Ok(false);
                }
                let i = ElementSet::singleton(*element);
                let gs = f(&s.union(&i))? - f(s)?;
                let gt = f(&t.union(&i))? - f(t)?;
                gs < gt - TOL
            }
            Counterexample::Symmetric { set, .. } => {
                (f(set)? - f(&set.complement(inst.n()))?).abs() > TOL
            }
            Counterexample::NonNegative { set, .. } => f(set)? < -TOL,
            Counterexample::Monotone { set, element, .. } => {
                f(&set.union(&ElementSet::singleton(*element)))? < f(set)? - TOL
            }
            Counterexample::SubsampleBound { t, p, .. } => {
                let (e, b) = subsample_expectation(inst, t, *p)?;
                e < b - TOL
            }
            Counterexample::NoHarm { x, y, .. } => {
                x.is_disjoint(y) && f(&x.union(y))? - f(y)? < -f(x)? - TOL
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    /// Number of tuples tested.
    pub checked: u64,
    /// Smallest observed `lhs - rhs` of the checked inequality; negative
    /// beyond the tolerance exactly when the property fails.
    pub min_slack: f64,
}

struct Tracker {
    property: Property,
    checked: u64,
    min_slack: f64,
    counterexample: Option<Counterexample>,
}

impl Tracker {
    fn new(property: Property) -> Self {
        Self {
            property,
            checked: 0,
            min_slack: f64::INFINITY,
            counterexample: None,
        }
    }

    fn observe(&mut self, slack: f64, cx: impl FnOnce() -> Counterexample) {
        self.checked += 1;
        self.min_slack = self.min_slack.min(slack);
        if slack < -TOL && self.counterexample.is_none() {
            self.counterexample = Some(cx());
        }
    }

    fn finish(self) -> PropertyReport {
        PropertyReport {
            property: self.property,
            holds: self.counterexample.is_none(),
            counterexample: self.counterexample,
            checked: self.checked,
            min_slack: if self.checked == 0 { 0.0 } else { self.min_slack },
        }
    }
}

/// All `2^n` values, indexed by bitmask.
fn value_table(inst: &OracleInstance, limits: &Limits) -> Result<Vec<f64>> {
    let n = inst.n();
    Limits::check(
        "exhaustive_max_n",
        n as u128,
        limits.exhaustive_max_n.min(63) as u128,
    )?;
    let session = OracleSession::new(inst);
    (0..1u64 << n)
        .map(|m| session.evaluate(&ElementSet::from_mask(m)))
        .collect()
}

/// Ascending enumeration of the submasks of `t`, starting at 0.
fn submasks(t: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        let succ = (cur | !t).wrapping_add(1) & t;
        next = (succ != 0).then_some(succ);
        Some(cur)
    })
}

fn random_set(rng: &mut ChaCha8Rng, n: usize) -> ElementSet {
    (0..n as u32).filter(|_| rng.random_bool(0.5)).collect()
}

fn mask_set(m: u64) -> ElementSet {
    ElementSet::from_mask(m)
}

/// Diminishing returns: `f(S+i) - f(S) >= f(T+i) - f(T)` for `S ⊆ T`, `i ∉ T`.
pub fn check_submodular(
    inst: &OracleInstance,
    mode: Mode,
    limits: &Limits,
) -> Result<PropertyReport> {
    let n = inst.n();
    let mut tr = Tracker::new(Property::Submodular);
    match mode {
        Mode::Exhaustive => {
            let tab = value_table(inst, limits)?;
            let full = (1u64 << n) - 1;
            for t in 0..=full {
                for s in submasks(t) {
                    for i in 0..n {
                        let bit = 1u64 << i;
                        if t & bit != 0 {
                            continue;
                        }
                        let gs = tab[(s | bit) as usize] - tab[s as usize];
                        let gt = tab[(t | bit) as usize] - tab[t as usize];
                        tr.observe(gs - gt, || Counterexample::Submodular {
                            s: mask_set(s),
                            t: mask_set(t),
                            element: ElementId(i as u32),
                            gain_s: gs,
                            gain_t: gt,
                        });
                    }
                }
            }
        }
        Mode::Sampled { trials, seed } => {
            let session = OracleSession::new(inst);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut done = 0;
            while done < trials && n > 0 {
                let (mut s, mut t, mut out) = (ElementSet::new(), ElementSet::new(), Vec::new());
                for e in 0..n as u32 {
                    match rng.random_range(0..3) {
                        0 => {
                            s.insert(ElementId(e));
                            t.insert(ElementId(e));
                        }
                        1 => {
                            t.insert(ElementId(e));
                        }
                        _ => out.push(ElementId(e)),
                    }
                }
                if out.is_empty() {
                    continue;
                }
                let i = out[rng.random_range(0..out.len())];
                let one = ElementSet::singleton(i);
                let gs = session.marginal(&one, &s)?;
                let gt = session.marginal(&one, &t)?;
                tr.observe(gs - gt, || Counterexample::Submodular {
                    s: s.clone(),
                    t: t.clone(),
                    element: i,
                    gain_s: gs,
                    gain_t: gt,
                });
                done += 1;
            }
        }
    }
    Ok(tr.finish())
}

/// `f(S) = f(E \ S)` for every `S`.
pub fn check_symmetric(
    inst: &OracleInstance,
    mode: Mode,
    limits: &Limits,
) -> Result<PropertyReport> {
    let n = inst.n();
    let mut tr = Tracker::new(Property::Symmetric);
    let mut observe = |s: ElementSet, v: f64, c: f64| {
        tr.observe(-(v - c).abs(), || Counterexample::Symmetric {
            set: s,
            value: v,
            complement_value: c,
        })
    };
    match mode {
        Mode::Exhaustive => {
            let tab = value_table(inst, limits)?;
            let full = (1u64 << n) - 1;
            for s in 0..=full {
                observe(mask_set(s), tab[s as usize], tab[(full ^ s) as usize]);
            }
        }
        Mode::Sampled { trials, seed } => {
            let session = OracleSession::new(inst);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let s = random_set(&mut rng, n);
                let v = session.evaluate(&s)?;
                let c = session.evaluate(&s.complement(n))?;
                observe(s, v, c);
            }
        }
    }
    Ok(tr.finish())
}

/// `f(S) >= 0` for every `S`.
pub fn check_nonnegative(
    inst: &OracleInstance,
    mode: Mode,
    limits: &Limits,
) -> Result<PropertyReport> {
    let n = inst.n();
    let mut tr = Tracker::new(Property::NonNegative);
    match mode {
        Mode::Exhaustive => {
            let tab = value_table(inst, limits)?;
            for (m, v) in tab.iter().enumerate() {
                tr.observe(*v, || Counterexample::NonNegative {
                    set: mask_set(m as u64),
                    value: *v,
                });
            }
        }
        Mode::Sampled { trials, seed } => {
            let session = OracleSession::new(inst);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let s = random_set(&mut rng, n);
                let v = session.evaluate(&s)?;
                tr.observe(v, || Counterexample::NonNegative { set: s, value: v });
            }
        }
    }
    Ok(tr.finish())
}

/// `f(S+i) >= f(S)` for every `S` and `i ∉ S`.
pub fn check_monotone(
    inst: &OracleInstance,
    mode: Mode,
    limits: &Limits,
) -> Result<PropertyReport> {
    let n = inst.n();
    let mut tr = Tracker::new(Property::Monotone);
    match mode {
        Mode::Exhaustive => {
            let tab = value_table(inst, limits)?;
            for s in 0..1u64 << n {
                for i in 0..n {
                    let bit = 1u64 << i;
                    if s & bit != 0 {
                        continue;
                    }
                    let (before, after) = (tab[s as usize], tab[(s | bit) as usize]);
                    tr.observe(after - before, || Counterexample::Monotone {
                        set: mask_set(s),
                        element: ElementId(i as u32),
                        before,
                        after,
                    });
                }
            }
        }
        Mode::Sampled { trials, seed } => {
            let session = OracleSession::new(inst);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut done = 0;
            while done < trials && n > 0 {
                let s = random_set(&mut rng, n);
                if s.len() == n {
                    continue;
                }
                let rest = s.complement(n).to_vec();
                let i = rest[rng.random_range(0..rest.len())];
                let before = session.evaluate(&s)?;
                let after = session.evaluate(&s.union(&ElementSet::singleton(i)))?;
                tr.observe(after - before, || Counterexample::Monotone {
                    set: s.clone(),
                    element: i,
                    before,
                    after,
                });
                done += 1;
            }
        }
    }
    Ok(tr.finish())
}

/// Exact `E[f(R)]` where `R` keeps each member of `t` independently with
/// probability `p`, together with the bound `p f(T) + (1-p) f(∅)`.
pub fn subsample_expectation(inst: &OracleInstance, t: &ElementSet, p: f64) -> Result<(f64, f64)> {
    let members = t.to_vec();
    let m = members.len();
    let mut expected = 0.0;
    for mask in 0..1u64 << m {
        let r: ElementSet = (0..m)
            .filter(|j| mask >> j & 1 == 1)
            .map(|j| members[j])
            .collect();
        let kept = r.len() as i32;
        let weight = p.powi(kept) * (1.0 - p).powi(m as i32 - kept);
        if weight != 0.0 {
            expected += weight * inst.value(&r)?;
        }
    }
    let bound = p * inst.value(t)? + (1.0 - p) * inst.value(&ElementSet::new())?;
    Ok((expected, bound))
}

/// Subsampling bound `E[f(R)] >= p f(T) + (1-p) f(∅)` under independent
/// inclusion with probability exactly `p`, computed by full enumeration.
pub fn check_subsample_bound(
    inst: &OracleInstance,
    t: &ElementSet,
    p: f64,
    limits: &Limits,
) -> Result<PropertyReport> {
    Limits::check(
        "subsample_max_t",
        t.len() as u128,
        limits.subsample_max_t as u128,
    )?;
    inst.check_set(t)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(crate::Error::Param(format!("probability {p} outside [0, 1]")));
    }
    let (expected, bound) = subsample_expectation(inst, t, p)?;
    let mut tr = Tracker::new(Property::SubsampleBound);
    tr.observe(expected - bound, || Counterexample::SubsampleBound {
        t: t.clone(),
        p,
        expected,
        bound,
    });
    let mut report = tr.finish();
    report.checked = 1u64 << t.len();
    Ok(report)
}

/// `f(X | Y) >= -f(X)` for all disjoint `X`, `Y`. Meaningful for symmetric
/// non-negative submodular functions; the scan itself does not require it.
pub fn check_symmetric_no_harm(inst: &OracleInstance, limits: &Limits) -> Result<PropertyReport> {
    let n = inst.n();
    Limits::check("no_harm_max_n", n as u128, limits.no_harm_max_n as u128)?;
    let tab = value_table(inst, limits)?;
    let full = (1u64 << n) - 1;
    let mut tr = Tracker::new(Property::SymmetricNoHarm);
    for x in 0..=full {
        for y in submasks(full ^ x) {
            let fx = tab[x as usize];
            let marginal = tab[(x | y) as usize] - tab[y as usize];
            tr.observe(marginal + fx, || Counterexample::NoHarm {
                x: mask_set(x),
                y: mask_set(y),
                marginal,
                value_x: fx,
            });
        }
    }
    Ok(tr.finish())
}

/// Exact optimum over size-`<= k` subsets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_set: ElementSet,
    pub best_value: f64,
    /// Number of size-`<= k` sets attaining the optimum (within tolerance).
    pub ties: u64,
}

/// Enumerates every subset of size at most `k`; lexicographic tie-break.
pub fn brute_force_opt(inst: &OracleInstance, k: usize, limits: &Limits) -> Result<OptResult> {
    let session = OracleSession::new(inst);
    let (sol, ties) = best_subset(&inst.ground_set(), k, limits, |s| session.evaluate(s))?;
    Ok(OptResult {
        best_set: sol.set,
        best_value: sol.value,
        ties,
    })
}
