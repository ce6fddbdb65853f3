//! Certified grid minimization by best-first interval branch-and-bound over
//! the lattice cells of the box.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::expr::{Interval, NV};
use super::{Point, ProgramId, ProgramSpec};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Cap on branch-and-bound nodes.
pub const MAX_GRID_NODES: u128 = 200_000_000;
/// Absorbs floating rounding in the interval enclosures.
const ROUNDING: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub program: ProgramId,
    pub h: f64,
    pub tau: f64,
    /// Smallest objective over lattice points satisfying every constraint.
    pub grid_minimum: f64,
    pub argmin: Point,
    /// Smallest objective lower bound over all cells not proven infeasible.
    pub certified_lower_bound: f64,
    /// Gradient-norm bound of the objective over the whole box.
    pub lipschitz_objective: f64,
    pub lipschitz_constraints: Vec<(String, f64)>,
    pub nodes: u64,
    pub leaves: u64,
}

struct Lattice {
    lo: [f64; NV],
    hi: [f64; NV],
    count: [u32; NV],
    h: f64,
}

impl Lattice {
    fn new(bounds: &[Interval; NV], h: f64) -> Self {
        let mut count = [1; NV];
        for j in 0..NV {
            let w = bounds[j].hi - bounds[j].lo;
            count[j] = (w / h - 1e-9).ceil().max(0.0) as u32 + 1;
        }
        Self {
            lo: bounds.map(|b| b.lo),
            hi: bounds.map(|b| b.hi),
            count,
            h,
        }
    }

    fn coord(&self, j: usize, i: u32) -> f64 {
        (self.lo[j] + i as f64 * self.h).min(self.hi[j])
    }

    /// Union of the cells of lattice points `lo..=hi`, clipped to the box.
    fn region(&self, lo: &[u32; NV], hi: &[u32; NV]) -> [Interval; NV] {
        let mut r = [Interval::point(0.0); NV];
        for j in 0..NV {
            r[j] = if self.count[j] == 1 {
                Interval::point(self.lo[j])
            } else {
                Interval::new(
                    (self.coord(j, lo[j]) - self.h / 2.0).max(self.lo[j]),
                    (self.coord(j, hi[j]) + self.h / 2.0).min(self.hi[j]),
                )
            };
        }
        r
    }
}

struct Node {
    lb: f64,
    lo: [u32; NV],
    hi: [u32; NV],
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    // min-heap on lb
    fn cmp(&self, o: &Self) -> Ordering {
        o.lb.total_cmp(&self.lb)
    }
}

enum Bound {
    Infeasible,
    Open { lb: f64, split: Option<usize> },
}

/// Bounds a node. A dimension needs splitting only if an undecided constraint
/// or a non-dominated objective term depends on it.
fn bound(spec: &ProgramSpec, lat: &Lattice, lo: &[u32; NV], hi: &[u32; NV], tau: f64) -> Bound {
    let region = lat.region(lo, hi);
    let mut relevant = [false; NV];
    for c in &spec.constraints {
        let r = c.expr.range(&region);
        if r.lo > tau + ROUNDING {
            return Bound::Infeasible;
        }
        if r.hi > tau {
            for (j, rel) in relevant.iter_mut().enumerate() {
                *rel |= c.expr.depends_on(j);
            }
        }
    }
    let ranges: Vec<Interval> = spec.objective.iter().map(|(_, t)| t.range(&region)).collect();
    let lb = ranges.iter().map(|r| r.lo).fold(f64::NEG_INFINITY, f64::max);
    for ((_, t), r) in spec.objective.iter().zip(&ranges) {
        if r.hi >= lb {
            for (j, rel) in relevant.iter_mut().enumerate() {
                *rel |= t.depends_on(j);
            }
        }
    }
    let split = (0..NV)
        .filter(|&j| relevant[j] && hi[j] > lo[j])
        .max_by_key(|&j| (hi[j] - lo[j], std::cmp::Reverse(j)));
    Bound::Open {
        lb: lb - ROUNDING,
        split,
    }
}

/// Minimizes `program` over the lattice of spacing `h` with constraint slack
/// `tau`. The grid minimum bounds the true minimum from above when
/// `tau = 0`; the certified bound bounds it from below.
pub fn grid_min(program: ProgramId, h: f64, tau: f64) -> Result<GridReport> {
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::Param(format!("resolution {h} outside (0, 0.1]")));
    }
    if !(tau >= 0.0) {
        return Err(Error::Param(format!("slack {tau} must be non-negative")));
    }
    let spec = ProgramSpec::new(program);
    let lat = Lattice::new(&spec.bounds, h);

    let whole = spec.bounds;
    let lipschitz_objective = spec
        .objective
        .iter()
        .map(|(_, t)| t.grad_norm())
        .fold(0.0, f64::max);
    let lipschitz_constraints = spec
        .constraints
        .iter()
        .map(|c| (c.name.to_string(), c.expr.lipschitz(&whole)))
        .collect();

    let mut heap = BinaryHeap::new();
    let root_hi = lat.count.map(|c| c - 1);
    if let Bound::Open { lb, .. } = bound(&spec, &lat, &[0; NV], &root_hi, tau) {
        heap.push(Node {
            lb,
            lo: [0; NV],
            hi: root_hi,
        });
    }

    let mut incumbent = f64::INFINITY;
    let mut argmin = None;
    let mut certified = None;
    let (mut nodes, mut leaves) = (0u64, 0u64);
    while let Some(node) = heap.pop() {
        if node.lb >= incumbent {
            break;
        }
        nodes += 1;
        Limits::check("grid_nodes", nodes as u128, MAX_GRID_NODES)?;
        let Bound::Open { split, .. } = bound(&spec, &lat, &node.lo, &node.hi, tau) else {
            continue;
        };
        match split {
            None => {
                leaves += 1;
                certified.get_or_insert(node.lb);
                let mut x = [0.0; NV];
                for j in 0..NV {
                    x[j] = lat.coord(j, node.lo[j]);
                }
                if spec.constraints.iter().all(|c| c.expr.eval(&x) <= tau) {
                    let v = spec.objective_at(&x);
                    if v < incumbent {
                        incumbent = v;
                        argmin = Some(Point::from_array(x));
                    }
                }
            }
            Some(j) => {
                let mid = node.lo[j] + (node.hi[j] - node.lo[j]) / 2;
                let mut left_hi = node.hi;
                left_hi[j] = mid;
                let mut right_lo = node.lo;
                right_lo[j] = mid + 1;
                for (lo, hi) in [(node.lo, left_hi), (right_lo, node.hi)] {
                    if let Bound::Open { lb, .. } = bound(&spec, &lat, &lo, &hi, tau) {
                        let lb = lb.max(node.lb);
                        if lb < incumbent {
                            heap.push(Node { lb, lo, hi });
                        }
                    }
                }
            }
        }
    }

    let argmin = argmin.ok_or_else(|| Error::EmptyFeasible(program.to_string()))?;
    Ok(GridReport {
        program,
        h,
        tau,
        grid_minimum: incumbent,
        argmin,
        certified_lower_bound: certified.expect("a leaf precedes any incumbent"),
        lipschitz_objective,
        lipschitz_constraints,
        nodes,
        leaves,
    })
}
