#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submodlab_core::families::{random_instance, Family};
use submodlab_core::fpt::{fpt, fpt_plus, greedy, FptConfig};
use submodlab_core::properties::brute_force_opt;
use submodlab_core::stream::StreamOrder;
use submodlab_core::streaming::{h_threshold, prefix_len, symmetric_stream, StreamConfig};
use submodlab_core::{Limits, OracleInstance, TOL};

#[derive(Clone, Copy, Debug)]
pub struct SuiteSpec {
    pub eps: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub k_max: usize,
    pub runs: usize,
    pub seed: u64,
    pub t: usize,
    pub with_fpt: bool,
    pub with_fpt_plus: bool,
}

#[derive(Clone, Debug)]
pub struct SuiteRun {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub opt: f64,
    pub alg1: f64,
    pub greedy: f64,
    pub fpt: Option<f64>,
    pub fpt_plus: Option<f64>,
    pub peak: usize,
    pub gated_queries: u64,
    pub queries: u64,
}

/// `value / opt`, with an all-zero instance counted as solved.
pub fn ratio(value: f64, opt: f64) -> f64 {
    if opt <= TOL {
        1.0
    } else {
        value / opt
    }
}

pub fn peak_bound(k: usize, eps: f64) -> usize {
    3 * k + h_threshold(k, eps) + 2
}

/// Draws `(n, k)` uniformly among pairs meeting `⌊εn⌋ ≥ 3k`.
fn draw_shape(rng: &mut ChaCha8Rng, s: &SuiteSpec) -> (usize, usize) {
    let pairs: Vec<(usize, usize)> = (s.n_min..=s.n_max)
        .flat_map(|n| (1..=s.k_max.min(prefix_len(n, s.eps) / 3)).map(move |k| (n, k)))
        .collect();
    assert!(!pairs.is_empty(), "suite has no feasible (n, k)");
    pairs[rng.random_range(0..pairs.len())]
}

pub fn run_one(inst: &OracleInstance, k: usize, eps: f64, seed: u64, s: &SuiteSpec) -> SuiteRun {
    let n = inst.n();
    let order = StreamOrder::uniform(n, seed).unwrap();
    let opt = brute_force_opt(inst, k, &Limits::default()).unwrap().best_value;
    let out = symmetric_stream(inst, &order, &StreamConfig::new(k, eps)).unwrap();
    let (_, g, _) = greedy(inst, k).unwrap();
    let cfg = FptConfig::new(k, eps, s.t);
    let f = s.with_fpt.then(|| fpt(inst, &order, &cfg).unwrap().solution.value);
    let fp = s.with_fpt_plus.then(|| fpt_plus(inst, &order, &cfg).unwrap().solution.value);
    SuiteRun {
        family: Family::ALL[0],
        n,
        k,
        seed,
        opt,
        alg1: out.solution.value,
        greedy: g.value,
        fpt: f,
        fpt_plus: fp,
        peak: out.phase.ledger.peak_stored,
        gated_queries: out.phase.ledger.gated_queries,
        queries: out.queries,
    }
}

pub fn run_suite(s: &SuiteSpec) -> Vec<SuiteRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    (0..s.runs)
        .map(|i| {
            let family = Family::ALL[i % Family::ALL.len()];
            let (n, k) = draw_shape(&mut rng, s);
            let seed = rng.random();
            let inst = random_instance(family, n, seed).unwrap();
            SuiteRun {
                family,
                ..run_one(&inst, k, s.eps, seed, s)
            }
        })
        .collect()
}

/// Runs where a dominance relation fails beyond tolerance.
pub fn domination_failures(runs: &[SuiteRun]) -> Vec<&SuiteRun> {
    runs.iter()
        .filter(|r| {
            let fpt_bad = r.fpt.is_some_and(|v| v < r.greedy.max(r.alg1) - TOL);
            let plus_bad = r.fpt_plus.is_some_and(|v| v < r.greedy - TOL);
            let over = [Some(r.alg1), Some(r.greedy), r.fpt, r.fpt_plus]
                .into_iter()
                .flatten()
                .any(|v| v > r.opt + TOL);
            fpt_bad || plus_bad || over
        })
        .collect()
}

pub fn mean_alg1_ratio(runs: &[SuiteRun]) -> f64 {
    runs.iter().map(|r| ratio(r.alg1, r.opt)).sum::<f64>() / runs.len() as f64
}

pub const SPEC_SUITE: SuiteSpec = SuiteSpec {
    eps: 0.3,
    n_min: 10,
    n_max: 14,
    k_max: 4,
    runs: 200,
    seed: 2024,
    t: 2,
    with_fpt: true,
    with_fpt_plus: false,
};

pub const WIDE_SUITE: SuiteSpec = SuiteSpec {
    eps: 0.9,
    n_min: 4,
    n_max: 14,
    k_max: 4,
    runs: 200,
    seed: 77,
    t: 2,
    with_fpt: true,
    with_fpt_plus: false,
};

pub const TINY_PLUS_SUITE: SuiteSpec = SuiteSpec {
    eps: 0.3,
    n_min: 10,
    n_max: 12,
    k_max: 3,
    runs: 100,
    seed: 9,
    t: 2,
    with_fpt: false,
    with_fpt_plus: true,
};

pub const TINY_PLUS_WIDE_SUITE: SuiteSpec = SuiteSpec {
    eps: 0.9,
    n_min: 4,
    n_max: 12,
    k_max: 3,
    runs: 100,
    seed: 10,
    t: 2,
    with_fpt: false,
    with_fpt_plus: true,
};

use submodlab_core::hard::{gen_hard, parse_ratio, HardInstanceParams};
use submodlab_core::oracle::fixtures;
use submodlab_core::properties::{
    check_nonnegative, check_submodular, check_subsample_bound, check_symmetric,
    check_symmetric_no_harm, Mode,
};
use submodlab_core::{symmetrize, ElementSet};

/// Every shipped family at exhaustive scale, by name.
pub fn shipped_instances() -> Vec<(String, OracleInstance)> {
    let mut out = vec![
        ("toy-cut".to_string(), fixtures::toy_cut()),
        ("mod-6".to_string(), fixtures::mod6()),
        ("cover-3".to_string(), fixtures::cover3()),
        ("sym-2".to_string(), fixtures::sym2()),
        ("plateau".to_string(), fixtures::plateau(10, 8)),
        ("sym-plateau".to_string(), symmetrize(fixtures::plateau(10, 8))),
    ];
    let (hard, _) = gen_hard(&HardInstanceParams::new(10, 4, parse_ratio("0.5").unwrap(), 1)).unwrap();
    out.push(("hard-10".to_string(), hard));
    for fam in Family::ALL {
        for (n, seed) in [(8, 3), (10, 4), (12, 5)] {
            out.push((format!("{fam}-{n}"), random_instance(fam, n, seed).unwrap()));
        }
    }
    out
}

pub fn is_symmetrized(inst: &OracleInstance) -> bool {
    inst.kind_name() == "symmetrized"
}

/// Labels of failed checks across the property suite.
pub fn property_suite_failures() -> Vec<String> {
    let lim = Limits::default();
    let mut bad = Vec::new();
    for (name, inst) in shipped_instances() {
        if inst.n() <= 12 {
            if !check_submodular(&inst, Mode::Exhaustive, &lim).unwrap().holds {
                bad.push(format!("{name}: submodular"));
            }
            if !check_nonnegative(&inst, Mode::Exhaustive, &lim).unwrap().holds {
                bad.push(format!("{name}: non-negative"));
            }
        }
        if is_symmetrized(&inst) && inst.n() <= 10 {
            if !check_symmetric(&inst, Mode::Exhaustive, &lim).unwrap().holds {
                bad.push(format!("{name}: symmetric"));
            }
            if !check_symmetric_no_harm(&inst, &lim).unwrap().holds {
                bad.push(format!("{name}: no-harm"));
            }
        }
        for t in subsample_targets(inst.n()) {
            for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
                if !check_subsample_bound(&inst, &t, p, &lim).unwrap().holds {
                    bad.push(format!("{name}: subsample |T|={} p={p}", t.len()));
                }
            }
        }
    }
    if !plateau_wrapper_agrees(10, 2) {
        bad.push("plateau wrapper".into());
    }
    bad
}

/// A fixed spread of sets with at most 8 members.
pub fn subsample_targets(n: usize) -> Vec<ElementSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let mut out = vec![ElementSet::new(), (0..n.min(8) as u32).collect()];
    for _ in 0..4 {
        let size = rng.random_range(1..=n.min(8));
        let mut ids: Vec<u32> = (0..n as u32).collect();
        rand::seq::SliceRandom::shuffle(ids.as_mut_slice(), &mut rng);
        out.push(ids[..size].iter().copied().collect());
    }
    out
}

/// `g(X) = f(X)` for every `|X| <= k` when `f(X) = min(|X|, 4k)` and `n >= 5k`.
pub fn plateau_wrapper_agrees(n: usize, k: usize) -> bool {
    let f = fixtures::plateau(n, 4 * k);
    let g = symmetrize(f.clone());
    let mut ok = true;
    submodlab_core::search::for_each_subset_up_to(&f.ground_set().to_vec(), k, |x| {
        ok &= (f.value(x).unwrap() - g.value(x).unwrap()).abs() <= TOL;
        Ok(())
    })
    .unwrap();
    ok
}
