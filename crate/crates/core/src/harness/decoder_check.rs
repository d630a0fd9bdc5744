//! Algebraic decoder against the brute-force oracle.

use rand::Rng;
use serde::Serialize;
use serde_json::Map;

use super::config::{ExperimentConfig, ExperimentKind};
use super::line_gap::{corrupt_blocks, random_blocks};
use super::report::{to_value, ExperimentReport};
use super::rng::trial_rng;
use crate::decoder::{brute_force_list, candidate_space, prune, DecoderParams};
use crate::error::{Error, Result};
use crate::frs::{block_distance, CodeParams, Word};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecoderTrial {
    pub s: usize,
    pub errors: usize,
    #[serde(with = "rational::serde_str")]
    pub radius: Rational,
    pub candidate_dim: Option<usize>,
    pub decoded: usize,
    pub oracle: usize,
    pub complete: bool,
    pub agree: bool,
}

/// Random codeword with a uniform number of corrupted blocks, decoded at a
/// uniform radius `j/n` up to the decoder's guaranteed radius.
pub fn decoder_trial<R: Rng + ?Sized>(p: &CodeParams, dp: DecoderParams, cap: u128, rng: &mut R) -> Result<DecoderTrial> {
    let guaranteed = dp
        .guaranteed_radius(p)
        .ok_or_else(|| Error::Config(format!("window size s = {} guarantees no radius", dp.s)))?;
    let n = p.n();
    let steps = (guaranteed * Rational::from_integer(n as i64)).floor().to_integer() as usize;
    let radius = Rational::new(rng.random_range(0..=steps) as i64, n as i64);
    let c = p.encode(&p.random_message(rng))?;
    let errors = rng.random_range(0..=n);
    let mut y: Word = c.clone();
    corrupt_blocks(p.field(), &mut y, &random_blocks(n, errors, rng), rng);
    let cands = candidate_space(p, &y, dp)?;
    let decoded = prune(p, &cands, &y, radius, cap)?;
    let oracle = brute_force_list(p, &y, radius, cap)?;
    debug_assert!(oracle.list.iter().all(|w| block_distance(&w.word, &y).is_ok_and(|d| d <= radius)));
    Ok(DecoderTrial {
        s: dp.s,
        errors,
        radius,
        candidate_dim: cands.dim,
        decoded: decoded.list.len(),
        oracle: oracle.list.len(),
        complete: decoded.complete,
        agree: decoded.list == oracle.list,
    })
}

pub fn run_decoder_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate(ExperimentKind::DecoderCheck)?;
    let start = std::time::Instant::now();
    let p = cfg.code_params()?;
    let dp = DecoderParams::auto(&p)?;
    let mut records = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        records.push(decoder_trial(&p, dp, cfg.cap, &mut rng)?);
    }
    let violations = records.iter().filter(|r| !r.agree || !r.complete).count();
    let mut aggregate = Map::new();
    aggregate.insert("s".into(), dp.s.into());
    aggregate.insert("d".into(), dp.d.into());
    aggregate.insert("guaranteed_radius".into(), dp.guaranteed_radius(&p).map(|g| rational::format_rational(&g)).into());
    aggregate.insert("nonempty_lists".into(), records.iter().filter(|r| r.oracle > 0).count().into());
    aggregate.insert("mismatches".into(), records.iter().filter(|r| !r.agree).count().into());
    Ok(ExperimentReport {
        experiment: ExperimentKind::DecoderCheck,
        config: cfg.echo(),
        seed: cfg.seed,
        trials: records.iter().map(to_value).collect::<Result<_>>()?,
        aggregate,
        violations,
        elapsed: start.elapsed(),
    })
}
