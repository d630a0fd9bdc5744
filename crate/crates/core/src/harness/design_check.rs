//! Subspace-design and block-collision checks.

use serde::Serialize;
use serde_json::Map;

use super::config::{ExperimentConfig, ExperimentKind};
use super::report::{to_value, ExperimentReport};
use super::rng::trial_rng;
use crate::design::{block_collision_bound, block_collision_count, design_sum, random_subspace, DesignReport, DesignScope};
use crate::error::Result;
use crate::frs::CodeParams;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionSummary {
    pub polynomials: u128,
    pub max_count: usize,
    pub bound: usize,
    pub violations: usize,
}

/// Block collisions of every nonzero message of degree below `k`.
pub fn exhaustive_collisions(p: &CodeParams, cap: u128) -> Result<CollisionSummary> {
    let bound = block_collision_bound(p);
    let mut out = CollisionSummary { polynomials: 0, max_count: 0, bound, violations: 0 };
    for (f, _) in p.enumerate_codewords(cap)? {
        if f.is_zero() {
            continue;
        }
        let count = block_collision_count(p, &f)?;
        out.polynomials += 1;
        out.max_count = out.max_count.max(count);
        if count > bound {
            out.violations += 1;
        }
    }
    Ok(out)
}

pub fn run_design_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate(ExperimentKind::DesignCheck)?;
    let start = std::time::Instant::now();
    let p = cfg.code_params()?;
    let scope = DesignScope::auto(p.q());
    let mut records: Vec<DesignReport> = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        let d = cfg.dims[trial % cfg.dims.len()];
        let u = random_subspace(&p, d, &mut rng)?;
        records.push(design_sum(&p, &u, scope)?);
    }
    let mut violations = records.iter().filter(|r| !r.pass).count();
    let mut aggregate = Map::new();
    aggregate.insert("scope".into(), to_value(&scope)?);
    aggregate.insert("design_violations".into(), violations.into());
    let basepoint_violations =
        records.iter().filter(|r| Rational::from_integer(r.basepoint_sum as i64) > r.bound).count();
    aggregate.insert("basepoint_violations".into(), basepoint_violations.into());
    if p.message_count() <= cfg.cap {
        let collisions = exhaustive_collisions(&p, cfg.cap)?;
        violations += collisions.violations;
        aggregate.insert("collisions".into(), to_value(&collisions)?);
    }
    Ok(ExperimentReport {
        experiment: ExperimentKind::DesignCheck,
        config: cfg.echo(),
        seed: cfg.seed,
        trials: records.iter().map(to_value).collect::<Result<_>>()?,
        aggregate,
        violations,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collisions_at_tiny_scale() {
        let cfg = ExperimentConfig::preset("tiny").unwrap();
        for k in 2..=4 {
            let p = cfg.with("k", &k.to_string()).unwrap().code_params().unwrap();
            let s = exhaustive_collisions(&p, cfg.cap).unwrap();
            assert_eq!(s.polynomials, 17u128.pow(k as u32) - 1);
            assert_eq!(s.violations, 0);
        }
    }

    #[test]
    fn design_check_reports_each_trial() {
        let cfg = ExperimentConfig::preset("tiny").unwrap().with("trials", "6").unwrap();
        let report = run_design_check(&cfg).unwrap();
        assert_eq!(report.trials.len(), 6);
        assert!(report.aggregate.contains_key("collisions"));
    }
}
