//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use submodlab_core::factor::{feasible, grid_min, objective, reference_point, verify_certificate};
use submodlab_core::families::{random_instance, Family};
use submodlab_core::hard::{gen_hard, gen_hard_capped, parse_ratio, soundness_probe, HardInstanceParams};
use submodlab_core::oracle::fixtures::mod6;
use submodlab_core::properties::{brute_force_opt, check_nonnegative, check_submodular, Mode};
use submodlab_core::set::set_of;
use submodlab_core::stream::{Buffer, EventKind, StreamOrder};
use submodlab_core::streaming::{symmetric_stream, StreamConfig};
use submodlab_core::{Error, Limits, OracleSession, ProgramId};

struct Outcome {
    notes: Vec<String>,
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            notes: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }
}

fn report(id: usize, title: &str, budget: Duration, body: impl FnOnce(&mut Outcome)) -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    body(&mut out);
    let elapsed = start.elapsed();
    out.check(elapsed <= budget, format!("runtime {elapsed:.2?} within {budget:?}"));
    let pass = out.failures.is_empty();
    println!(
        "{} criterion {id} ({title}) in {elapsed:.2?}",
        if pass { "PASS" } else { "FAIL" }
    );
    for f in &out.failures {
        println!("    failed: {f}");
    }
    for n in &out.notes {
        println!("    ok: {n}");
    }
    pass
}

fn certificates(o: &mut Outcome) {
    match verify_certificate(ProgramId::FptPlusA) {
        Ok(r) => {
            let v = r.contradiction_value.unwrap();
            o.check(
                (v - 0.002857).abs() <= 1e-12 && v > 0.0,
                format!("FPTPLUS-A contradiction value {v:.12}"),
            );
        }
        Err(e) => o.check(false, format!("FPTPLUS-A: {e}")),
    }
    for p in [ProgramId::FptPlusB, ProgramId::FptB] {
        match verify_certificate(p) {
            Ok(r) => o.check(
                r.bound == Some(0.6) && r.sampled_points == 100_000,
                format!("{p} bound 0.6 (exact multipliers, {} sampled points)", r.sampled_points),
            ),
            Err(e) => o.check(false, format!("{p}: {e}")),
        }
    }
    match verify_certificate(ProgramId::SymA) {
        Ok(r) => {
            let v = r.contradiction_value.unwrap();
            o.check(v > 0.0 && (v - 3.9e-4).abs() < 1e-5, format!("SYM-A contradiction value {v:.6e}"));
        }
        Err(e) => o.check(false, format!("SYM-A: {e}")),
    }
    match verify_certificate(ProgramId::SymB) {
        Ok(r) => {
            let v = r.chain_value.unwrap();
            o.check(v > 0.79, format!("SYM-B chain value {v:.6}"));
        }
        Err(e) => o.check(false, format!("SYM-B: {e}")),
    }
    for p in ProgramId::ALL {
        let f = feasible(p, &reference_point(p), 1e-9);
        o.check(f.feasible, format!("{p} reference point feasible at 1e-9"));
    }
    let root = 2.0 * (6.0 - 2f64.sqrt()) / 17.0;
    let v = objective(ProgramId::FptPlusA, &reference_point(ProgramId::FptPlusA));
    o.check((v - root).abs() <= 1e-12, format!("FPTPLUS-A reference objective {v:.12} = 2(6-sqrt2)/17"));
}

fn grids(o: &mut Outcome) {
    let h = 0.005;
    let mut reports = std::collections::HashMap::new();
    for p in ProgramId::ALL {
        let start = Instant::now();
        match grid_min(p, h, 0.0) {
            Ok(r) => {
                let t = start.elapsed();
                o.check(
                    t <= Duration::from_secs(600),
                    format!(
                        "{p}: grid_minimum {:.6}, certified_lower_bound {:.6}, {} nodes, {t:.2?}",
                        r.grid_minimum, r.certified_lower_bound, r.nodes
                    ),
                );
                o.check(r.grid_minimum >= r.certified_lower_bound, format!("{p}: grid_minimum >= certified bound"));
                reports.insert(p, r);
            }
            Err(e) => o.check(false, format!("{p}: {e}")),
        }
    }
    let cert = |a: ProgramId, b: ProgramId| {
        match (reports.get(&a), reports.get(&b)) {
            (Some(x), Some(y)) => x.certified_lower_bound.min(y.certified_lower_bound),
            _ => f64::NAN,
        }
    };
    for (a, b, target) in [
        (ProgramId::FptPlusA, ProgramId::FptPlusB, 0.539),
        (ProgramId::SymA, ProgramId::SymB, 0.5029),
        (ProgramId::FptA, ProgramId::FptB, 0.512),
    ] {
        let v = cert(a, b);
        o.check(v >= target - 0.02, format!("min({a}, {b}) certified {v:.6} >= {target} - 0.02"));
    }
    if let Some(r) = reports.get(&ProgramId::FptPlusA) {
        o.check(
            r.grid_minimum <= 0.5395,
            format!("FPTPLUS-A grid_minimum {:.6} <= 0.5395", r.grid_minimum),
        );
    }
}

fn properties(o: &mut Outcome) {
    let bad = property_suite_failures();
    o.check(
        bad.is_empty(),
        format!("{} shipped instances: submodular, non-negative, symmetric, no-harm, subsample bound, plateau wrapper {bad:?}", shipped_instances().len()),
    );
}

fn hard(o: &mut Outcome) {
    let lim = Limits::default();
    let eps = |s| parse_ratio(s).unwrap();
    let cases = [
        ("hard (10,4,.5)", gen_hard(&HardInstanceParams::new(10, 4, eps("0.5"), 1)), 4.0),
        ("hard (204,16,.25)", gen_hard(&HardInstanceParams::new(204, 16, eps("0.25"), 2).padded()), 24.0),
        ("capped (40,8,.5,2)", gen_hard_capped(&HardInstanceParams::new(40, 8, eps("0.5"), 3).capped(2)), 16.0),
        (
            "capped (204,16,.25,2)",
            gen_hard_capped(&HardInstanceParams::new(204, 16, eps("0.25"), 4).capped(2).padded()),
            24.0,
        ),
    ];
    for (name, res, want) in cases {
        let (inst, w) = match res {
            Ok(x) => x,
            Err(e) => {
                o.check(false, format!("{name}: {e}"));
                continue;
            }
        };
        let v = inst.value(&w.opt_set).unwrap();
        o.check((v - want).abs() <= 1e-9, format!("{name}: f(OPT witness) = {v} (want {want})"));
        let mode = if inst.n() <= 10 {
            Mode::Exhaustive
        } else {
            Mode::Sampled { trials: 100_000, seed: 1 }
        };
        let sub = check_submodular(&inst, mode, &lim).unwrap();
        let nn = check_nonnegative(&inst, mode, &lim).unwrap();
        o.check(sub.holds && nn.holds, format!("{name}: submodular over {} tuples", sub.checked));
        let probe = soundness_probe(&inst, &w, 4, 0.1, 1000, 7).unwrap();
        o.notes.push(format!(
            "{name}: soundness probe max {} vs bound {:.3}, exceed rate {:.3} (report only)",
            probe.max_sampled_value, probe.bound, probe.exceed_rate
        ));
    }
}

fn algorithms(o: &mut Outcome) {
    let order = StreamOrder::explicit(6, &[0, 1, 2, 3, 4, 5]).unwrap();
    let v = symmetric_stream(&mod6(), &order, &StreamConfig::new(1, 0.5)).unwrap().solution.value;
    o.check(v == 9.0, format!("MOD-6 walkthrough value {v}"));

    let mut equal = 0;
    for seed in 0..200u64 {
        let n = 10 + (seed % 5) as usize;
        let inst = random_instance(Family::DistinctModular, n, seed).unwrap();
        let cfg = StreamConfig::new(1, 0.3);
        let out = symmetric_stream(&inst, &StreamOrder::uniform(n, seed ^ 0xabc).unwrap(), &cfg).unwrap();
        let opt = brute_force_opt(&inst, 1, &Limits::default()).unwrap().best_value;
        equal += usize::from(out.solution.value == opt && out.phase.state.h.len() < cfg.threshold());
    }
    o.check(equal == 200, format!("distinct modular, k=1: {equal}/200 runs equal the optimum"));

    for (name, spec) in [("eps=0.3 suite", SPEC_SUITE), ("eps=0.9 suite", WIDE_SUITE)] {
        let runs = run_suite(&spec);
        let bad = domination_failures(&runs).len();
        o.check(bad == 0, format!("{name}: fpt >= max(greedy, alg1) on all {} runs", runs.len()));
        let m = mean_alg1_ratio(&runs);
        o.check(m >= 0.5, format!("{name}: mean alg1 ratio {m:.4} >= 0.5"));
    }
    for (name, spec) in [("tiny eps=0.3", TINY_PLUS_SUITE), ("tiny eps=0.9", TINY_PLUS_WIDE_SUITE)] {
        let runs = run_suite(&spec);
        let bad = domination_failures(&runs).len();
        let worst = runs
            .iter()
            .map(|r| ratio(r.fpt_plus.unwrap(), r.opt))
            .fold(f64::INFINITY, f64::min);
        o.check(bad == 0, format!("{name}: fpt_plus >= greedy on all {} runs", runs.len()));
        o.check(worst >= 0.539, format!("{name}: worst fpt_plus ratio {worst:.4} >= 0.539"));
    }
}

fn fidelity(o: &mut Outcome) {
    let mut violations = 0;
    let mut over_peak = 0;
    let mut runs = 0;
    for spec in [SPEC_SUITE, WIDE_SUITE] {
        let s = SuiteSpec { with_fpt: false, ..spec };
        for r in run_suite(&s) {
            runs += 1;
            violations += usize::from(r.gated_queries != r.queries);
            over_peak += usize::from(r.peak > peak_bound(r.k, s.eps));
        }
    }
    o.check(violations == 0, format!("{runs} streaming runs: every query went through the gate"));
    o.check(over_peak == 0, format!("{runs} streaming runs: peak_stored <= 3k + threshold + 2"));

    let inst = mod6();
    let session = OracleSession::new(&inst);
    let mut buf = Buffer::new(Default::default(), None);
    buf.arrive(submodlab_core::ElementId(0));
    buf.store(submodlab_core::ElementId(0)).unwrap();
    let err = buf.query(&session, &set_of(&[0, 1]));
    o.check(
        matches!(err, Err(Error::OracleGateViolation { element: 1 })),
        "out-of-buffer query raises OracleGateViolation",
    );

    let mut ordered = true;
    let mut detections = 0;
    for seed in 0..20 {
        let p = HardInstanceParams::new(204, 16, parse_ratio("0.25").unwrap(), seed).padded();
        let (inst, w) = gen_hard(&p).unwrap();
        let mut cfg = StreamConfig::new(2, 0.5);
        cfg.buckets = Some(w.buckets.clone());
        cfg.free = w.a2.clone();
        let out = symmetric_stream(&inst, &StreamOrder::uniform(204, seed).unwrap(), &cfg).unwrap();
        let log = &out.phase.log;
        detections += log.count(EventKind::Detection);
        for b in 0..w.buckets.len() {
            if let Some(d) = log.first(b, EventKind::Detection) {
                ordered &= log.first(b, EventKind::Collision).is_some_and(|c| c <= d);
            }
        }
    }
    o.check(ordered, format!("20 hard-instance runs: no detection precedes its bucket's first collision ({detections} detections)"));
}

fn main() {
    let results = [
        report(1, "certificate replay", Duration::from_secs(5), certificates),
        report(2, "grid certification", Duration::from_secs(6 * 600), grids),
        report(3, "property suite", Duration::from_secs(120), properties),
        report(4, "hard-instance completeness", Duration::from_secs(600), hard),
        report(5, "algorithm oracle-equivalence", Duration::from_secs(600), algorithms),
        report(6, "model fidelity", Duration::from_secs(60), fidelity),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
