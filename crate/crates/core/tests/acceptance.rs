//! Acceptance criteria. Each prints one PASS/FAIL line; the process exits
//! nonzero if any criterion fails or overruns its time limit.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{interpolation_instance, params, tiny};
use frs_gap::harness::design_check::exhaustive_collisions;
use frs_gap::harness::{run, ExperimentConfig, ExperimentReport};
use frs_gap::rational::{parse_rational, ratio};
use frs_gap::stitching::interpolation_bound_check;
use frs_gap::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

fn config(pairs: &[(&str, &str)]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::preset("tiny").unwrap();
    for (k, v) in pairs {
        cfg = cfg.with(k, v).unwrap();
    }
    cfg
}

fn report(pairs: &[(&str, &str)]) -> Result<ExperimentReport, String> {
    run(&config(pairs)).map_err(|e| e.to_string())
}

fn agg<'a>(r: &'a ExperimentReport, key: &str) -> &'a Value {
    r.aggregate.get(key).unwrap_or(&Value::Null)
}

fn rat(v: &Value) -> Rational {
    parse_rational(v.as_str().expect("rational string")).unwrap()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac1() -> Outcome {
    let p = tiny();
    let mut words = 0;
    let mut min = usize::MAX;
    for (f, w) in p.enumerate_codewords(1 << 20).map_err(|e| e.to_string())? {
        words += 1;
        if !f.is_zero() {
            min = min.min(p.n() - w.zero_blocks());
        }
    }
    ensure(words == 289 && min >= 3, format!("codewords={words} min_weight={min} need>=3"))
}

fn ac2() -> Outcome {
    let r = report(&[
        ("experiment", "design-check"),
        ("q", "17"),
        ("gamma", "3"),
        ("m", "3"),
        ("n", "5"),
        ("k", "5"),
        ("dims", "1,2,3"),
        ("trials", "1000"),
    ])?;
    let v = agg(&r, "design_violations").as_u64().unwrap_or(u64::MAX);
    ensure(r.trials.len() == 1000 && v == 0, format!("subspaces={} violations={v}", r.trials.len()))
}

fn ac3() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for k in [2, 3, 4] {
        let s = exhaustive_collisions(&params(17, 3, 2, 8, k), 1 << 20).map_err(|e| e.to_string())?;
        ok &= s.violations == 0 && s.polynomials == 17u128.pow(k as u32) - 1;
        parts.push(format!("k={k}: max={} bound={} violations={}", s.max_count, s.bound, s.violations));
    }
    ensure(ok, parts.join("; "))
}

fn ac4() -> Outcome {
    let r = report(&[
        ("experiment", "decoder-check"),
        ("q", "17"),
        ("gamma", "3"),
        ("m", "4"),
        ("n", "4"),
        ("k", "3"),
        ("trials", "500"),
    ])?;
    let s = agg(&r, "s").as_u64();
    let mismatches = agg(&r, "mismatches").as_u64().unwrap_or(u64::MAX);
    let nonempty = agg(&r, "nonempty_lists").as_u64().unwrap_or(0);
    ensure(
        s == Some(2) && mismatches == 0 && r.violations == 0,
        format!("words={} s={s:?} mismatches={mismatches} nonempty={nonempty} radius<={}", r.trials.len(), agg(&r, "guaranteed_radius")),
    )
}

fn ac5() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for eps in ["1/4", "1/2"] {
        let r = report(&[
            ("experiment", "pin-test"),
            ("q", "17"),
            ("gamma", "3"),
            ("m", "2"),
            ("n", "8"),
            ("k", "6"),
            ("eps", eps),
            ("dims", "1,2,3"),
            ("trials", "30"),
            ("draws", "10000"),
        ])?;
        ok &= r.violations == 0 && r.trials.len() == 30;
        parts.push(format!("eps={eps}: instances={} failures={} min_margin={:.4}", r.trials.len(), r.violations, agg(&r, "min_margin").as_f64().unwrap_or(f64::NAN)));
    }
    ensure(ok, parts.join("; "))
}

fn ac6() -> Outcome {
    let p = tiny();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    let one = Rational::from_integer(1);
    for _ in 0..1000 {
        let ell = rng.random_range(1..=2);
        let t = rng.random_range(ell + 1..=p.q() as usize);
        let inst = interpolation_instance(&p, ell, t, &mut rng);
        let delta = ratio(inst.delta_blocks as i64, p.n() as i64);
        let check = interpolation_bound_check(p.field(), &inst.u, &inst.c, &inst.a, delta, 1 << 20).map_err(|e| e.to_string())?;
        if !check.holds || check.max_distance > delta / (one - ratio(ell as i64, t as i64)) {
            violations += 1;
        }
    }
    ensure(violations == 0, format!("instances=1000 violations={violations}"))
}

fn ac7() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for delta in ["0", "1/4"] {
        let r = report(&[("experiment", "line-gap"), ("line", "planted"), ("corruption", "joint-block"), ("delta", delta), ("trials", "200")])?;
        let recovered = agg(&r, "planted_recovered").as_u64().unwrap_or(0);
        let mut bound_ok = 0;
        for t in &r.trials {
            let exhaustive = t["exhaustive"].as_bool() == Some(true);
            if exhaustive && !t["max_distance"].is_null() && rat(&t["max_distance"]) <= rat(&t["far_radius"]) {
                bound_ok += 1;
            }
        }
        ok &= recovered == 200 && bound_ok == 200 && r.violations == 0;
        parts.push(format!("delta={delta}: recovered={recovered}/200 bound_all_alpha={bound_ok}/200"));
    }
    ensure(ok, parts.join("; "))
}

fn ac8() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for choice in ["nearest", "farthest"] {
        let r = report(&[("experiment", "line-gap"), ("line", "random"), ("delta", "1/4"), ("choice", choice), ("trials", "10000")])?;
        ok &= r.violations == 0 && r.trials.len() == 10000;
        parts.push(format!("{choice}: lines={} violations={} verdicts={}", r.trials.len(), r.violations, agg(&r, "verdicts")));
    }
    ensure(ok, parts.join("; "))
}

fn ac9() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for source in ["random", "planted"] {
        let r = report(&[("experiment", "affine-gap"), ("ell", "2"), ("line", source), ("corruption", "per-alpha"), ("delta", "1/4"), ("trials", "40")])?;
        let with_far: Vec<&Value> = r.trials.iter().filter(|t| !t["far_point"].is_null()).collect();
        let density_ok = with_far.iter().all(|t| t["density_ok"].as_bool() == Some(true));
        let identity_ok = with_far.iter().all(|t| t["multiplicity"]["holds"].as_bool() == Some(true));
        let full = r.trials.iter().all(|t| t["points"].as_u64() == Some(289));
        ok &= r.violations == 0 && density_ok && identity_ok && full && !with_far.is_empty();
        parts.push(format!(
            "{source}: planes={} with_far={} density_ok={density_ok} multiplicity_q-1={identity_ok} max_density={} eps_emp={}",
            r.trials.len(),
            with_far.len(),
            agg(&r, "max_density_with_far_point"),
            agg(&r, "eps_emp")
        ));
    }
    ensure(ok, parts.join("; "))
}

fn ac10() -> Outcome {
    let cfg = ExperimentConfig::preset("small").unwrap().with("experiment", "trend").unwrap().with("alpha-samples", "32").unwrap();
    let r = frs_gap::harness::sweep::run_trend(&cfg).map_err(|e| e.to_string())?;
    let exponent = agg(&r, "exponent").as_f64();
    let decreasing = agg(&r, "decreasing").as_bool() == Some(true);
    let in_range = exponent.is_some_and(|e| (0.8..=1.2).contains(&e));
    ensure(
        in_range && decreasing && r.violations == 0,
        format!("exponent={:?} range=[0.8,1.2] decreasing={decreasing} decoder_misses={}", exponent, agg(&r, "decoder_misses")),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1", "distance bound", 1, ac1),
        ("AC2", "subspace design", 30, ac2),
        ("AC3", "block collisions", 30, ac3),
        ("AC4", "decoder oracle", 120, ac4),
        ("AC5", "pinning", 120, ac5),
        ("AC6", "interpolation", 60, ac6),
        ("AC7", "correlated agreement", 120, ac7),
        ("AC8", "line dichotomy", 300, ac8),
        ("AC9", "affine lifting", 60, ac9),
        ("AC10", "field-size trend", 600, ac10),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (ok, detail) = match result {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {id} {name}: {detail} [{:.2}s, limit {limit}s{}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", exceeded" }
        );
    }
    println!("acceptance: {}/10 passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
