//! Lower-bound instances: a bipartite directed hypergraph cut plus a modular
//! term, with one hidden good bucket, and the variant with capped fake good
//! buckets. Also an empirical soundness probe.

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{CappedHyperedge, Meta, OracleInstance, OracleSession};
use crate::set::{ElementId, ElementSet};

/// Parses `"0.25"`, `"1/4"` or `"1"` into an exact rational.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let s = s.trim();
    let bad = || Error::Param(format!("cannot parse {s:?} as a rational"));
    if let Some((p, q)) = s.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 18 || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let den = 10u64.pow(frac.len() as u32);
    let num: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    int.checked_mul(den)
        .and_then(|x| x.checked_add(num))
        .map(|x| Ratio::new(x, den))
        .ok_or_else(bad)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardInstanceParams {
    pub n: usize,
    pub k: usize,
    pub eps: Ratio<u64>,
    /// Number of good-looking buckets in the capped variant.
    pub alpha: Option<usize>,
    pub seed: u64,
    /// Let `n - εk` leave a remainder modulo `b`; the leftover ids become
    /// isolated elements with no edges and zero weight.
    #[serde(default)]
    pub padding: bool,
}

/// Integral sizes derived from [`HardInstanceParams`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    /// `|A₂| = εk`.
    pub a2: usize,
    /// `|N_i| = ε²k`.
    pub nbhd: usize,
    /// Bucket size `b = k - εk`.
    pub b: usize,
    /// Number of buckets `ℓ`.
    pub buckets: usize,
    /// Ids after the last bucket.
    pub isolated: usize,
    /// `⌊b/α²⌋` in the capped variant, 1 otherwise.
    pub fake_cap: usize,
}

fn integral(x: Ratio<u64>, what: &str) -> Result<usize> {
    if !x.is_integer() {
        return Err(Error::Param(format!("{what} = {x} is not an integer")));
    }
    Ok(x.to_integer() as usize)
}

impl HardInstanceParams {
    pub fn new(n: usize, k: usize, eps: Ratio<u64>, seed: u64) -> Self {
        Self {
            n,
            k,
            eps,
            alpha: None,
            seed,
            padding: false,
        }
    }

    pub fn capped(mut self, alpha: usize) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn padded(mut self) -> Self {
        self.padding = true;
        self
    }

    pub fn shape(&self) -> Result<Shape> {
        let zero = Ratio::from_integer(0);
        if self.eps <= zero || self.eps >= Ratio::from_integer(1) {
            return Err(Error::Param(format!("eps = {} must lie in (0, 1)", self.eps)));
        }
        let k = Ratio::from_integer(self.k as u64);
        let a2 = integral(self.eps * k, "eps*k")?;
        let nbhd = integral(self.eps * self.eps * k, "eps^2*k")?;
        if a2 == 0 || nbhd == 0 {
            return Err(Error::Param("eps*k and eps^2*k must be at least 1".into()));
        }
        let b = self.k - a2;
        if self.n <= a2 {
            return Err(Error::Param(format!("n = {} leaves no room for buckets", self.n)));
        }
        let rest = self.n - a2;
        if !rest.is_multiple_of(b) && !self.padding {
            return Err(Error::Param(format!(
                "n - eps*k = {rest} is not divisible by the bucket size b = {b}"
            )));
        }
        let buckets = rest / b;
        if buckets == 0 {
            return Err(Error::Param("no complete bucket fits".into()));
        }
        let fake_cap = match self.alpha {
            None => 1,
            Some(alpha) => {
                if alpha == 0 || alpha > buckets {
                    return Err(Error::Param(format!(
                        "alpha = {alpha} must lie in [1, {buckets}]"
                    )));
                }
                let cap = b / (alpha * alpha);
                if cap == 0 {
                    return Err(Error::Param(format!(
                        "floor(b / alpha^2) = floor({b} / {}) is zero",
                        alpha * alpha
                    )));
                }
                cap
            }
        };
        Ok(Shape {
            a2,
            nbhd,
            b,
            buckets,
            isolated: rest - buckets * b,
            fake_cap,
        })
    }
}

/// Hidden structure of a generated instance and its optimum witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardWitness {
    pub g: usize,
    pub fake_buckets: Option<Vec<usize>>,
    pub a2: ElementSet,
    pub buckets: Vec<ElementSet>,
    pub neighborhoods: Vec<ElementSet>,
    pub opt_set: ElementSet,
    pub opt_value: f64,
    /// `ε²k²`, the soundness scale.
    pub scale: f64,
}

impl HardWitness {
    /// Reads the witness stored in an instance's metadata.
    pub fn from_meta(meta: &Meta) -> Result<Self> {
        let v = meta
            .extra
            .get("witness")
            .ok_or_else(|| Error::InvalidInstance("instance carries no witness".into()))?;
        Ok(serde_json::from_value(v.clone())?)
    }
}

fn build(params: &HardInstanceParams) -> Result<(OracleInstance, HardWitness)> {
    let sh = params.shape()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let a2: ElementSet = (0..sh.a2 as u32).collect();
    let buckets: Vec<ElementSet> = (0..sh.buckets)
        .map(|i| {
            let lo = (sh.a2 + i * sh.b) as u32;
            (lo..lo + sh.b as u32).collect()
        })
        .collect();

    let (g, fake) = match params.alpha {
        None => (rng.random_range(0..sh.buckets), None),
        Some(alpha) => {
            let mut chosen = sample(&mut rng, sh.buckets, alpha).into_vec();
            chosen.sort_unstable();
            let g = chosen[rng.random_range(0..alpha)];
            (g, Some(chosen))
        }
    };

    let neighborhoods: Vec<ElementSet> = (0..sh.buckets)
        .map(|_| {
            sample(&mut rng, sh.a2, sh.nbhd)
                .into_iter()
                .map(|j| ElementId(j as u32))
                .collect()
        })
        .collect();

    let mut edges = Vec::new();
    for (i, (bucket, nb)) in buckets.iter().zip(&neighborhoods).enumerate() {
        let cap = match &fake {
            Some(f) if i != g && f.contains(&i) => sh.fake_cap as u32,
            _ => 1,
        };
        for u in nb {
            if i == g {
                for v in bucket {
                    edges.push(CappedHyperedge::new(ElementSet::singleton(v), u, 1)?);
                }
            } else {
                edges.push(CappedHyperedge::new(bucket.clone(), u, cap)?);
            }
        }
    }

    // ε²k² / |A₂| = εk
    let weight = sh.a2 as f64;
    let mut modular = vec![0.0; params.n];
    for e in &a2 {
        modular[e.index()] = weight;
    }
    let scale = (params.eps * params.eps * Ratio::from_integer((params.k * params.k) as u64))
        .to_integer() as f64;

    let inst = OracleInstance::cut_plus_modular(params.n, edges, modular)?;
    let opt_set = buckets[g].union(&a2.difference(&neighborhoods[g]));
    let opt_value = inst.value(&opt_set)?;
    let witness = HardWitness {
        g,
        fake_buckets: fake,
        a2,
        buckets,
        neighborhoods,
        opt_set,
        opt_value,
        scale,
    };

    let generator = if params.alpha.is_some() { "hard-capped" } else { "hard" };
    let mut meta = Meta::new(generator, params.seed);
    meta.extra.insert("opt_value".into(), serde_json::json!(opt_value));
    meta.extra.insert("params".into(), serde_json::to_value(params)?);
    meta.extra.insert("witness".into(), serde_json::to_value(&witness)?);
    Ok((inst.with_meta(meta), witness))
}

/// The single-good-bucket instance. `params.alpha` must be unset.
pub fn gen_hard(params: &HardInstanceParams) -> Result<(OracleInstance, HardWitness)> {
    if params.alpha.is_some() {
        return Err(Error::Param("alpha is only used by the capped variant".into()));
    }
    build(params)
}

/// The variant with `α` good-looking buckets, all but one capped at `⌊b/α²⌋`.
pub fn gen_hard_capped(params: &HardInstanceParams) -> Result<(OracleInstance, HardWitness)> {
    if params.alpha.is_none() {
        return Err(Error::Param("the capped variant needs alpha".into()));
    }
    build(params)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub trials: u64,
    pub max_sampled_value: f64,
    pub max_sampled_set: ElementSet,
    /// `(1+δ)ε²k²`.
    pub bound: f64,
    pub exceed_rate: f64,
}

/// Samples sets avoiding the good bucket: a size drawn uniformly from
/// `0..=k`, then a uniform subset of that size. Reports only; nothing is
/// asserted about the outcome.
pub fn soundness_probe(
    instance: &OracleInstance,
    witness: &HardWitness,
    k: usize,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<SoundnessReport> {
    if trials == 0 {
        return Err(Error::Param("trials must be at least 1".into()));
    }
    let pool = instance.ground_set().difference(&witness.buckets[witness.g]).to_vec();
    let session = OracleSession::new(instance);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = (1.0 + delta) * witness.scale;
    let mut best = (f64::NEG_INFINITY, ElementSet::new());
    let mut exceed = 0u64;
    for _ in 0..trials {
        let size = rng.random_range(0..=k.min(pool.len()));
        let s: ElementSet = sample(&mut rng, pool.len(), size)
            .into_iter()
            .map(|j| pool[j])
            .collect();
        let v = session.evaluate(&s)?;
        if v > bound {
            exceed += 1;
        }
        if v > best.0 {
            best = (v, s);
        }
    }
    Ok(SoundnessReport {
        trials,
        max_sampled_value: best.0,
        max_sampled_set: best.1,
        bound,
        exceed_rate: exceed as f64 / trials as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Ratio<u64> {
        parse_ratio(s).unwrap()
    }

    #[test]
    fn ratios() {
        assert_eq!(r("0.25"), Ratio::new(1, 4));
        assert_eq!(r("1/2"), Ratio::new(1, 2));
        assert_eq!(r(".5"), Ratio::new(1, 2));
        assert_eq!(r("1"), Ratio::from_integer(1));
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("").is_err());
    }

    #[test]
    fn small_instance_values() {
        let p = HardInstanceParams::new(10, 4, r("0.5"), 1);
        let sh = p.shape().unwrap();
        assert_eq!((sh.a2, sh.b, sh.buckets, sh.nbhd), (2, 2, 4, 1));
        let (inst, w) = gen_hard(&p).unwrap();
        assert_eq!(w.opt_value, 4.0);
        assert_eq!(w.opt_set.len(), 3);
        assert_eq!(inst.value(&ElementSet::new()).unwrap(), 0.0);
        assert_eq!(inst.value(&w.a2).unwrap(), 4.0);
        let rest = w.a2.difference(&w.neighborhoods[w.g]);
        assert_eq!(inst.value(&rest).unwrap(), 2.0);
        assert_eq!(HardWitness::from_meta(inst.meta()).unwrap(), w);
    }

    #[test]
    fn divisibility_is_enforced() {
        let err = gen_hard(&HardInstanceParams::new(11, 4, r("0.5"), 1)).unwrap_err();
        assert!(matches!(err, Error::Param(m) if m.contains("divisible")));
        assert!(gen_hard(&HardInstanceParams::new(10, 4, r("0.3"), 1)).is_err());
        let p = HardInstanceParams::new(11, 4, r("0.5"), 1).padded();
        assert_eq!(p.shape().unwrap().isolated, 1);
    }

    #[test]
    fn capped_variant() {
        let p = HardInstanceParams::new(40, 8, r("0.5"), 3).capped(2);
        let (inst, w) = gen_hard_capped(&p).unwrap();
        let fake = w.fake_buckets.clone().unwrap();
        assert_eq!(fake.len(), 2);
        assert!(fake.contains(&w.g));
        assert_eq!(w.opt_value, 2.0 * 0.5 * 0.25 * 64.0);
        // cap 1: same topology as the uncapped generator with the same draws
        if let crate::oracle::Kind::CutPlusModular { hyperedges, .. } = inst.kind() {
            assert!(hyperedges.iter().all(|h| h.cap == 1));
        }

        let p = HardInstanceParams::new(204, 16, r("0.25"), 5).capped(2).padded();
        let sh = p.shape().unwrap();
        assert_eq!((sh.b, sh.fake_cap, sh.isolated), (12, 3, 8));
        let (inst, w) = gen_hard_capped(&p).unwrap();
        assert!((w.opt_value - 2.0 * 0.75 * 16.0).abs() < 1e-9);
        let g2 = *w.fake_buckets.as_ref().unwrap().iter().find(|&&i| i != w.g).unwrap();
        assert_eq!(inst.value(&w.buckets[g2]).unwrap(), 3.0);
        assert!(gen_hard_capped(&HardInstanceParams::new(204, 16, r("0.25"), 5).capped(2)).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let p = HardInstanceParams::new(10, 4, r("0.5"), 9);
        let (a, wa) = gen_hard(&p).unwrap();
        let (b, wb) = gen_hard(&p).unwrap();
        assert_eq!(wa, wb);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn probe_shape() {
        let p = HardInstanceParams::new(10, 4, r("0.5"), 1);
        let (inst, w) = gen_hard(&p).unwrap();
        let rep = soundness_probe(&inst, &w, 4, 0.1, 1000, 2).unwrap();
        assert!((0.0..=1.0).contains(&rep.exceed_rate));
        assert!(rep.max_sampled_set.is_disjoint(&w.buckets[w.g]));
        assert!(rep.max_sampled_value <= inst.value(&inst.ground_set()).unwrap().max(8.0));
        assert!(soundness_probe(&inst, &w, 4, 0.1, 0, 2).is_err());
    }
}
