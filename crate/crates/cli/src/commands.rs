use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use submodlab_core::factor::{grid_min, verify_certificate};
use submodlab_core::families::{random_instance, Family};
use submodlab_core::fpt::{fpt, fpt_plus, greedy, FptConfig};
use submodlab_core::hard::{
    gen_hard, gen_hard_capped, parse_ratio, HardInstanceParams, HardWitness,
};
use submodlab_core::oracle::fixtures;
use submodlab_core::properties::{
    brute_force_opt, check_monotone, check_nonnegative, check_submodular, check_subsample_bound,
    check_symmetric, check_symmetric_no_harm, Mode,
};
use submodlab_core::stream::StreamOrder;
use submodlab_core::streaming::{symmetric_stream, StreamConfig};
use submodlab_core::{
    symmetrize, ElementSet, Error, Limits, Meta, OracleInstance, ProgramId, Result,
};

use crate::args::{
    Alg, CertArgs, CertMode, CheckArgs, CheckMode, Format, GenArgs, OptArgs, PropertyArg, RunArgs,
};
use crate::record::{ratio, RunRecord, HEADER};
use crate::Outcome;

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Param(format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<OracleInstance> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    OracleInstance::from_json(&text)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn need<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| Error::Param(format!("--{flag} is required for --kind {kind}")))
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

pub fn gen(a: GenArgs) -> Result<Outcome> {
    let kind = a.kind.as_str();
    let inst = match kind {
        "hard" | "hard-capped" => {
            let n = need(a.n, "n", kind)?;
            let k = need(a.k, "k", kind)?;
            let eps = parse_ratio(&need(a.eps.clone(), "eps", kind)?)?;
            let mut params = HardInstanceParams::new(n, k, eps, a.seed);
            if a.padding {
                params = params.padded();
            }
            if kind == "hard" {
                gen_hard(&params)?.0
            } else {
                gen_hard_capped(&params.capped(need(a.alpha, "alpha", kind)?))?.0
            }
        }
        "toy-cut" => fixtures::toy_cut(),
        "mod-6" => fixtures::mod6(),
        "cover-3" => fixtures::cover3(),
        "sym-2" => fixtures::sym2(),
        "plateau" => fixtures::plateau(need(a.n, "n", kind)?, need(a.cap, "cap", kind)?),
        other => {
            let family: Family = other
                .parse()
                .map_err(|_| Error::Param(format!("unknown instance kind `{other}`")))?;
            random_instance(family, need(a.n, "n", kind)?, a.seed)?
        }
    };
    let inst = if a.symmetrize {
        let meta = Meta::new(format!("sym-{}", inst.meta().generator), a.seed);
        symmetrize(inst).with_meta(meta)
    } else {
        inst
    };
    let text = inst.to_json() + "\n";
    match &a.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(Outcome::Pass)
}

fn parse_order(spec: &str) -> Result<Option<Vec<u32>>> {
    if spec == "uniform" {
        return Ok(None);
    }
    let bad = || Error::InvalidOrder(format!("cannot parse order `{spec}`"));
    let ids = spec.strip_prefix("explicit:").ok_or_else(bad)?;
    ids.split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Optimum recorded by the generator for the same `k`, else by brute force.
fn optimum(inst: &OracleInstance, k: usize) -> Result<f64> {
    let extra = &inst.meta().extra;
    let recorded_k = extra
        .get("params")
        .and_then(|p| p.get("k"))
        .and_then(|v| v.as_u64());
    match extra.get("opt_value").and_then(|v| v.as_f64()) {
        Some(v) if recorded_k == Some(k as u64) => Ok(v),
        _ => Ok(brute_force_opt(inst, k, &Limits::default())?.best_value),
    }
}

fn stream_config(a: &RunArgs, inst: &OracleInstance, single: bool) -> Result<StreamConfig> {
    let eps = a
        .eps
        .ok_or_else(|| Error::Param("--eps is required for streaming algorithms".into()))?;
    let mut cfg = StreamConfig::new(a.k, eps);
    cfg.threshold = a.threshold;
    cfg.capacity = a.capacity;
    cfg.transcript = single && a.transcript.is_some();
    if single && a.collision_log.is_some() {
        let w = HardWitness::from_meta(inst.meta())?;
        cfg.free = w.a2;
        cfg.buckets = Some(w.buckets);
    }
    Ok(cfg)
}

struct Trial {
    record: RunRecord,
    artifacts: Option<(Option<String>, Option<String>)>,
}

fn run_trial(
    a: &RunArgs,
    inst: &OracleInstance,
    id: u64,
    opt: Option<f64>,
    single: bool,
) -> Result<Trial> {
    let seed = a.seed + id;
    let n = inst.n();
    let order = match parse_order(&a.order)? {
        Some(ids) => StreamOrder::explicit(n, &ids)?,
        None => StreamOrder::uniform(n, seed)?,
    };
    let start = Instant::now();
    let (algorithm, value, queries, eps, t, peak, phase) = match a.alg {
        Alg::Greedy => {
            let (_, sol, q) = greedy(inst, a.k)?;
            ("greedy", sol.value, q, None, None, None, None)
        }
        Alg::Stream => {
            let cfg = stream_config(a, inst, single)?;
            let out = symmetric_stream(inst, &order, &cfg)?;
            let peak = out.phase.ledger.peak_stored;
            (
                "stream",
                out.solution.value,
                out.queries,
                Some(cfg.eps),
                None,
                Some(peak),
                Some(out.phase),
            )
        }
        Alg::Fpt | Alg::Fptplus => {
            let mut cfg = FptConfig::new(a.k, 0.0, a.t);
            cfg.stream = stream_config(a, inst, single)?;
            cfg.reset_selected_per_guess = a.reset_selected_per_guess;
            cfg.pass_guess = a.pass_guess;
            let (name, out) = if a.alg == Alg::Fpt {
                ("fpt", fpt(inst, &order, &cfg)?)
            } else {
                ("fptplus", fpt_plus(inst, &order, &cfg)?)
            };
            let peak = out.stream.ledger.peak_stored;
            let eps = Some(cfg.stream.eps);
            (
                name,
                out.solution.value,
                out.queries,
                eps,
                Some(a.t),
                Some(peak),
                Some(out.stream),
            )
        }
    };
    let wall_ms = (!a.no_timing).then(|| start.elapsed().as_secs_f64() * 1e3);
    let artifacts = match (single, phase) {
        (true, Some(p)) => {
            let transcript = match (&a.transcript, p.transcript) {
                (Some(_), Some(entries)) => Some(
                    entries
                        .iter()
                        .map(serde_json::to_string)
                        .collect::<std::result::Result<Vec<_>, _>>()?
                        .join("\n")
                        + "\n",
                ),
                _ => None,
            };
            let log = match &a.collision_log {
                Some(_) => Some(serde_json::to_string_pretty(&p.log)? + "\n"),
                None => None,
            };
            Some((transcript, log))
        }
        _ => None,
    };
    Ok(Trial {
        record: RunRecord {
            run_id: id,
            algorithm,
            n,
            k: a.k,
            eps,
            t,
            seed,
            value,
            opt_value: opt,
            ratio: ratio(value, opt),
            queries,
            peak_buffer: peak,
            wall_ms,
        },
        artifacts,
    })
}

pub fn run(a: RunArgs) -> Result<Outcome> {
    if a.trials == 0 {
        return Err(Error::Param("--trials must be at least 1".into()));
    }
    let single = a.trials == 1;
    if !single && (a.transcript.is_some() || a.collision_log.is_some()) {
        return Err(Error::Param(
            "--transcript and --collision-log need a single trial".into(),
        ));
    }
    let inst = load(&a.instance)?;
    let opt = if a.with_opt {
        Some(optimum(&inst, a.k)?)
    } else {
        None
    };
    let trials: Vec<Trial> = (0..a.trials)
        .into_par_iter()
        .map(|id| run_trial(&a, &inst, id, opt, single))
        .collect::<Result<_>>()?;

    if let Some((transcript, log)) = trials.first().and_then(|t| t.artifacts.as_ref()) {
        if let (Some(path), Some(text)) = (&a.transcript, transcript) {
            write(path, text)?;
        }
        if let (Some(path), Some(text)) = (&a.collision_log, log) {
            write(path, text)?;
        }
    }
    match a.format {
        Format::Csv => {
            println!("{HEADER}");
            for t in &trials {
                println!("{}", t.record.csv_row());
            }
        }
        Format::Json => {
            let rows: Vec<&RunRecord> = trials.iter().map(|t| &t.record).collect();
            print_json(&rows)?;
        }
    }
    Ok(Outcome::Pass)
}

pub fn opt(a: OptArgs) -> Result<Outcome> {
    let inst = load(&a.instance)?;
    let r = brute_force_opt(&inst, a.k, &Limits::default())?;
    print_json(&json!({
        "k": a.k,
        "best_value": r.best_value,
        "best_set": r.best_set,
        "ties": r.ties,
    }))?;
    Ok(Outcome::Pass)
}

pub fn check(a: CheckArgs) -> Result<Outcome> {
    let inst = load(&a.instance)?;
    let limits = Limits::default();
    let mode = match a.mode {
        CheckMode::Exhaustive => Mode::Exhaustive,
        CheckMode::Sampled => Mode::Sampled {
            trials: a.trials,
            seed: a.seed,
        },
    };
    let report = match a.property {
        PropertyArg::Submodular => check_submodular(&inst, mode, &limits)?,
        PropertyArg::Symmetric => check_symmetric(&inst, mode, &limits)?,
        PropertyArg::Nonnegative => check_nonnegative(&inst, mode, &limits)?,
        PropertyArg::Monotone => check_monotone(&inst, mode, &limits)?,
        PropertyArg::NoHarm => check_symmetric_no_harm(&inst, &limits)?,
        PropertyArg::Subsample => {
            let t: ElementSet = a.set.iter().copied().collect();
            check_subsample_bound(&inst, &t, a.p, &limits)?
        }
    };
    print_json(&report)?;
    Ok(if report.holds {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

pub fn cert(a: CertArgs) -> Result<Outcome> {
    let program: ProgramId = a.program.parse()?;
    match a.mode {
        CertMode::Certificate => {
            let report = verify_certificate(program)?;
            print_json(&report)?;
            Ok(if report.passed {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
        CertMode::Grid => match grid_min(program, a.resolution, a.tau) {
            Ok(report) => {
                print_json(&report)?;
                Ok(Outcome::Pass)
            }
            Err(Error::EmptyFeasible(p)) => {
                print_json(&json!({
                    "program": p,
                    "h": a.resolution,
                    "tau": a.tau,
                    "empty_feasible": true,
                }))?;
                Ok(Outcome::Pass)
            }
            Err(e) => Err(e),
        },
    }
}
