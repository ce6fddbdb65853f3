use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submodlab_core::hard::{gen_hard, gen_hard_capped, parse_ratio, HardInstanceParams, HardWitness};
use submodlab_core::properties::{check_nonnegative, check_submodular, Mode};
use submodlab_core::stream::{EventKind, StreamOrder};
use submodlab_core::streaming::{symmetric_stream, StreamConfig};
use submodlab_core::{ElementSet, Limits, OracleInstance, TOL};

fn params(n: usize, k: usize, eps: &str, seed: u64) -> HardInstanceParams {
    HardInstanceParams::new(n, k, parse_ratio(eps).unwrap(), seed)
}

fn completeness(p: &HardInstanceParams) -> f64 {
    let e = *p.eps.numer() as f64 / *p.eps.denom() as f64;
    let k = p.k as f64;
    2.0 * (1.0 - e) * e * e * k * k
}

fn cases() -> Vec<(HardInstanceParams, OracleInstance, HardWitness)> {
    let mut out = Vec::new();
    for p in [params(10, 4, "0.5", 1), params(204, 16, "1/4", 2).padded()] {
        let (i, w) = gen_hard(&p).unwrap();
        out.push((p, i, w));
    }
    for p in [params(40, 8, "0.5", 3).capped(2), params(204, 16, "0.25", 4).capped(2).padded()] {
        let (i, w) = gen_hard_capped(&p).unwrap();
        out.push((p, i, w));
    }
    out
}

#[test]
fn witnesses_attain_the_completeness_value() {
    for (p, inst, w) in cases() {
        assert!((w.opt_value - completeness(&p)).abs() <= 1e-9, "{p:?}");
        assert!((inst.value(&w.opt_set).unwrap() - w.opt_value).abs() <= 1e-9);
        let sh = p.shape().unwrap();
        assert_eq!(w.opt_set.len(), sh.b + sh.a2 - sh.nbhd);
        assert!(w.opt_set.len() <= p.k);
        assert_eq!(HardWitness::from_meta(inst.meta()).unwrap(), w);
    }
}

#[test]
fn generated_instances_are_submodular() {
    let lim = Limits::default();
    for (p, inst, _) in cases() {
        let mode = if p.n <= 12 {
            Mode::Exhaustive
        } else {
            Mode::Sampled { trials: 100_000, seed: p.seed }
        };
        assert!(check_submodular(&inst, mode, &lim).unwrap().holds, "{p:?}");
        assert!(check_nonnegative(&inst, mode, &lim).unwrap().holds, "{p:?}");
    }
}

fn random_subset(rng: &mut ChaCha8Rng, pool: &[u32], max: usize) -> ElementSet {
    let size = rng.random_range(0..=max.min(pool.len()));
    rand::seq::index::sample(rng, pool.len(), size)
        .into_iter()
        .map(|i| pool[i])
        .collect()
}

#[test]
fn fractions_of_the_good_bucket_are_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (p, inst, w) in cases() {
        let bg: Vec<u32> = w.buckets[w.g].ids();
        let all: Vec<u32> = (0..p.n as u32).collect();
        for _ in 0..500 {
            let x = random_subset(&mut rng, &bg, bg.len());
            let s = random_subset(&mut rng, &all, p.k).difference(&x);
            let tau = x.len() as f64 / bg.len() as f64;
            let gain = inst.value(&x.union(&s)).unwrap() - inst.value(&s).unwrap();
            assert!(gain <= tau * w.scale + TOL, "{p:?}: {gain} > {}", tau * w.scale);
        }
    }
}

#[test]
fn fake_buckets_contribute_little_in_total() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (p, inst, w) in cases() {
        let Some(fake) = &w.fake_buckets else { continue };
        let alpha = p.alpha.unwrap() as f64;
        let union: ElementSet = fake
            .iter()
            .filter(|&&i| i != w.g)
            .fold(ElementSet::new(), |acc, &i| acc.union(&w.buckets[i]));
        let all: Vec<u32> = (0..p.n as u32).collect();
        for _ in 0..500 {
            let s = random_subset(&mut rng, &all, p.k).difference(&union);
            let gain = inst.value(&union.union(&s)).unwrap() - inst.value(&s).unwrap();
            assert!(gain <= w.scale / alpha + TOL);
        }
    }
}

#[test]
fn detections_follow_collisions_on_hard_runs() {
    for (p, inst, w) in cases() {
        for seed in 0..10 {
            let eps = 0.5;
            let k = (p.n / 2 / 3).min(2);
            let mut cfg = StreamConfig::new(k, eps);
            cfg.buckets = Some(w.buckets.clone());
            cfg.free = w.a2.clone();
            let order = StreamOrder::uniform(p.n, seed).unwrap();
            let out = symmetric_stream(&inst, &order, &cfg).unwrap();
            let log = &out.phase.log;
            for b in 0..w.buckets.len() {
                if let Some(d) = log.first(b, EventKind::Detection) {
                    let c = log.first(b, EventKind::Collision).expect("collision before detection");
                    assert!(c <= d);
                }
            }
            assert!(out.phase.ledger.peak_stored <= 3 * k + cfg.threshold() + 2);
        }
    }
}
