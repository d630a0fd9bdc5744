//! Line proximity-gap experiments.
//!
//! Each trial builds a received line, classifies `u(α)` for every (or a
//! sample of) `α ∈ F_q`, runs correlated agreement on the close parameters
//! and records which side of the dichotomy the line falls on.

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;
use serde_json::Map;

use super::config::{Corruption, ExperimentConfig, ExperimentKind, LineSource, Mode};
use super::report::{tally, to_value, ExperimentReport, Verdict};
use super::rng::trial_rng;
use crate::decoder::{Codeword, ListDecoder};
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::frs::{block_distance, CodeParams, Word};
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::stitching::{
    choices_from_scan, correlated_agreement, line_max_distance, scan_line, Choices, CodeLine, Line, StitchParams,
};

/// Replaces each listed block of `w` by a uniform symbol different from it.
pub(crate) fn corrupt_blocks<R: Rng + ?Sized>(field: PrimeField, w: &mut Word, blocks: &[usize], rng: &mut R) {
    let m = w.m();
    for &i in blocks {
        loop {
            let sym: Vec<FieldElement> = (0..m).map(|_| field.random(rng)).collect();
            if sym.as_slice() != w.block(i) {
                w.set_block(i, &sym);
                break;
            }
        }
    }
}

pub(crate) fn corrupted_count(delta: Rational, n: usize) -> Result<usize> {
    if delta < Rational::from_integer(0) || delta > Rational::from_integer(1) {
        return Err(Error::PreconditionFailed(format!("delta = {} outside [0, 1]", rational::format_rational(&delta))));
    }
    Ok((delta * Rational::from_integer(n as i64)).floor().to_integer() as usize)
}

pub(crate) fn random_blocks<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<usize> {
    let mut out = sample(rng, n, count).into_vec();
    out.sort_unstable();
    out
}

/// `(u⁰, u¹)` at joint distance `⌊δ'n⌋/n` from `(c⁰, c¹)`.
///
/// `JointBlock` corrupts the same blocks in both endpoints, `PerAlpha` uses
/// independent block sets (so `u(α)` is generally far from `c(α)`), `None`
/// returns the code-line itself.
pub fn plant_corrupted_line<R: Rng + ?Sized>(
    p: &CodeParams,
    c0: &Word,
    c1: &Word,
    delta: Rational,
    model: Corruption,
    rng: &mut R,
) -> Result<Line> {
    if !p.is_codeword(c0) || !p.is_codeword(c1) {
        return Err(Error::NotACodeword);
    }
    let count = corrupted_count(delta, p.n())?;
    let (mut u0, mut u1) = (c0.clone(), c1.clone());
    match model {
        Corruption::None => {}
        Corruption::JointBlock => {
            let blocks = random_blocks(p.n(), count, rng);
            corrupt_blocks(p.field(), &mut u0, &blocks, rng);
            corrupt_blocks(p.field(), &mut u1, &blocks, rng);
        }
        Corruption::PerAlpha => {
            let b0 = random_blocks(p.n(), count, rng);
            let b1 = random_blocks(p.n(), count, rng);
            corrupt_blocks(p.field(), &mut u0, &b0, rng);
            corrupt_blocks(p.field(), &mut u1, &b1, rng);
        }
    }
    Line::new(u0, u1)
}

/// A received line and, when planted, the code-line it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineInstance {
    pub line: Line,
    pub witness: Option<CodeLine>,
}

pub fn build_line<R: Rng + ?Sized>(cfg: &ExperimentConfig, p: &CodeParams, rng: &mut R) -> Result<LineInstance> {
    match cfg.line {
        LineSource::Planted => {
            let c0 = Codeword::encode(p, p.random_message(rng))?;
            let c1 = Codeword::encode(p, p.random_message(rng))?;
            let line = plant_corrupted_line(p, &c0.word, &c1.word, cfg.delta, cfg.corruption, rng)?;
            Ok(LineInstance { line, witness: Some(CodeLine::from_endpoints(c0, c1)) })
        }
        LineSource::Random => Ok(LineInstance { line: Line::new(p.random_word(rng), p.random_word(rng))?, witness: None }),
    }
}

pub fn make_decoder(cfg: &ExperimentConfig, p: &CodeParams) -> Result<ListDecoder> {
    match cfg.mode {
        Mode::Oracle => ListDecoder::oracle(p, cfg.cap),
        Mode::Decoder => ListDecoder::algebraic(p, cfg.cap),
    }
}

/// The parameters to evaluate and whether they cover all of F_q.
pub fn sample_params<R: Rng + ?Sized>(field: PrimeField, samples: Option<usize>, rng: &mut R) -> (Vec<FieldElement>, bool) {
    let q = field.modulus() as usize;
    match samples {
        Some(s) if s < q => {
            let mut idx = sample(rng, q, s).into_vec();
            idx.sort_unstable();
            (idx.into_iter().map(|i| field.elem(i as u64)).collect(), false)
        }
        _ => (field.elements().collect(), true),
    }
}

/// `δ'/(1 − 1/t)`.
pub fn widened(delta: Rational, t: usize) -> Rational {
    delta / (Rational::from_integer(1) - Rational::new(1, t as i64))
}

/// Classification of the evaluated parameters of one line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineProfile {
    pub evaluated: usize,
    pub exhaustive: bool,
    /// `Δ(u(α), C) ≤ δ'`.
    pub close: Vec<FieldElement>,
    /// No listed codeword within `δ'/(1−1/t₂)`, with a complete list.
    pub far_certified: Vec<FieldElement>,
    /// No listed codeword within `δ'/(1−1/t₂)`, list incomplete.
    pub far_uncertified: Vec<FieldElement>,
    /// Largest list at the scan radius `δ'/(1−1/t₁)`.
    pub list_max: usize,
    /// Largest distance to the nearest listed codeword, when every list is nonempty.
    pub max_distance: Option<Rational>,
    pub choices: Choices,
}

impl LineProfile {
    pub fn first_far(&self) -> Option<FieldElement> {
        self.far_certified.first().copied()
    }

    pub fn close_fraction(&self) -> Rational {
        Rational::new(self.close.len() as i64, self.evaluated as i64)
    }
}

pub fn profile_line(
    decoder: &ListDecoder,
    line: &Line,
    alphas: &[FieldElement],
    exhaustive: bool,
    cfg: &ExperimentConfig,
    witness: Option<&CodeLine>,
) -> Result<LineProfile> {
    let scan_radius = widened(cfg.delta, cfg.t1);
    let far_radius = widened(cfg.delta, cfg.t2);
    let scan = scan_line(decoder, line, scan_radius, alphas, witness)?;
    let mut profile = LineProfile {
        evaluated: alphas.len(),
        exhaustive,
        close: Vec::new(),
        far_certified: Vec::new(),
        far_uncertified: Vec::new(),
        list_max: 0,
        max_distance: Some(Rational::from_integer(0)),
        choices: choices_from_scan(line, &scan, cfg.delta, cfg.choice)?,
    };
    for (alpha, res) in &scan {
        let y = line.at(*alpha);
        profile.list_max = profile.list_max.max(res.list.len());
        let mut nearest: Option<Rational> = None;
        for c in &res.list {
            let d = block_distance(&c.word, &y)?;
            nearest = Some(nearest.map_or(d, |b| b.min(d)));
        }
        profile.max_distance = match (profile.max_distance, nearest) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        match nearest {
            Some(d) if d <= cfg.delta => profile.close.push(*alpha),
            Some(d) if d <= far_radius => {}
            _ if res.complete => profile.far_certified.push(*alpha),
            _ => profile.far_uncertified.push(*alpha),
        }
    }
    Ok(profile)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaOutcome {
    /// Fewer than `a` close parameters.
    Skipped,
    NotFound,
    Found,
    StitchFailed,
    ClusterTooLarge,
    InvariantViolated(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecoveredLine {
    pub c0: Poly,
    pub c1: Poly,
    pub agreement: Vec<usize>,
    pub matched: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineGapTrial {
    pub source: LineSource,
    pub evaluated: usize,
    pub exhaustive: bool,
    pub close_count: usize,
    #[serde(with = "rational::serde_str")]
    pub close_fraction: Rational,
    pub list_max: usize,
    /// `(t₂−1)·L + a`.
    pub threshold: usize,
    pub far_point: Option<FieldElement>,
    pub uncertified_far: usize,
    #[serde(with = "rational::serde_opt")]
    pub max_distance: Option<Rational>,
    pub ca: CaOutcome,
    pub recovered: Option<RecoveredLine>,
    pub peel_stages: usize,
    pub peeled_lines: usize,
    pub residual: usize,
    /// `max_α Δ(u(α), c(α))` along the recovered code-line.
    #[serde(with = "rational::serde_opt")]
    pub global_distance: Option<Rational>,
    #[serde(with = "rational::serde_str")]
    pub far_radius: Rational,
    pub all_close_certified: bool,
    pub planted_recovered: Option<bool>,
    /// `q > (L+1)²`.
    pub field_condition: bool,
    pub verdict: Verdict,
}

fn same_line(a: &CodeLine, b: &CodeLine) -> bool {
    a.c0.word == b.c0.word && a.c1.word == b.c1.word
}

/// One trial on a given instance.
pub fn line_gap_trial<R: Rng + ?Sized>(
    cfg: &ExperimentConfig,
    p: &CodeParams,
    decoder: &ListDecoder,
    inst: &LineInstance,
    rng: &mut R,
) -> Result<LineGapTrial> {
    let (alphas, exhaustive) = sample_params(p.field(), cfg.alpha_samples, rng);
    let profile = profile_line(decoder, &inst.line, &alphas, exhaustive, cfg, inst.witness.as_ref())?;
    let far_radius = widened(cfg.delta, cfg.t2);
    let threshold = (cfg.t2 - 1) * profile.list_max + cfg.a;
    let q = p.q();

    let sp = StitchParams { delta: cfg.delta, eps: cfg.eps, r: cfg.r, a: cfg.a, t1: cfg.t1 };
    let (mut ca, mut recovered, mut trace) = (CaOutcome::Skipped, None, None);
    let mut found_line = None;
    if profile.choices.len() >= cfg.a {
        match correlated_agreement(p, &inst.line, &profile.choices, sp, cfg.t2, rng) {
            Ok((Some(ag), tr)) => {
                ca = CaOutcome::Found;
                recovered = Some(RecoveredLine {
                    c0: ag.line.c0.message.clone(),
                    c1: ag.line.c1.message.clone(),
                    agreement: ag.agreement.clone(),
                    matched: ag.matched,
                });
                found_line = Some(ag.line);
                trace = Some(tr);
            }
            Ok((None, tr)) => {
                ca = CaOutcome::NotFound;
                trace = Some(tr);
            }
            Err(Error::StitchFailed { .. }) => ca = CaOutcome::StitchFailed,
            Err(Error::ClusterTooLarge { .. }) => ca = CaOutcome::ClusterTooLarge,
            Err(Error::InvariantViolated(msg)) => ca = CaOutcome::InvariantViolated(msg),
            Err(e) => return Err(e),
        }
    }
    let global_distance = found_line.as_ref().map(|l| line_max_distance(p.field(), &inst.line, &l.as_line()));
    let no_far = profile.far_certified.is_empty() && profile.far_uncertified.is_empty();
    let all_close_certified = global_distance.is_some_and(|d| d <= far_radius) || (no_far && exhaustive);
    let estimate = profile.close_fraction() * Rational::from_integer(q as i64);
    let verdict = if matches!(ca, CaOutcome::InvariantViolated(_)) {
        Verdict::Violation
    } else if all_close_certified || no_far {
        Verdict::AllClose
    } else if estimate <= Rational::from_integer(threshold as i64) {
        Verdict::Sound
    } else if !profile.far_certified.is_empty() {
        Verdict::Violation
    } else {
        Verdict::Inconclusive
    };
    let planted_recovered = inst.witness.as_ref().map(|w| found_line.as_ref().is_some_and(|l| same_line(l, w)));
    let l1 = profile.list_max as u128 + 1;
    Ok(LineGapTrial {
        source: cfg.line,
        evaluated: profile.evaluated,
        exhaustive,
        close_count: profile.close.len(),
        close_fraction: profile.close_fraction(),
        list_max: profile.list_max,
        threshold,
        far_point: profile.first_far(),
        uncertified_far: profile.far_uncertified.len(),
        max_distance: profile.max_distance,
        ca,
        recovered,
        peel_stages: trace.as_ref().map_or(0, |t| t.stages.len()),
        peeled_lines: trace.as_ref().map_or(0, |t| t.lines.len()),
        residual: trace.as_ref().map_or(0, |t| t.residual),
        global_distance,
        far_radius,
        all_close_certified,
        planted_recovered,
        field_condition: q as u128 > l1 * l1,
        verdict,
    })
}

pub fn run_line_gap(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate(ExperimentKind::LineGap)?;
    let start = std::time::Instant::now();
    let p = cfg.code_params()?;
    let decoder = make_decoder(cfg, &p)?;
    let mut records = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        let inst = build_line(cfg, &p, &mut rng)?;
        records.push(line_gap_trial(cfg, &p, &decoder, &inst, &mut rng)?);
    }
    let verdicts: Vec<Verdict> = records.iter().map(|r| r.verdict).collect();
    let mut aggregate = Map::new();
    aggregate.insert("verdicts".into(), tally(&verdicts).into());
    let max_frac = records.iter().map(|r| r.close_fraction).max().unwrap_or_default();
    aggregate.insert("max_close_fraction".into(), rational::format_rational(&max_frac).into());
    // empirical ε: the largest close fraction on a line with a far point
    let eps_emp = records.iter().filter(|r| r.far_point.is_some()).map(|r| r.close_fraction).max();
    aggregate.insert("eps_emp".into(), eps_emp.map(|e| rational::format_rational(&e)).into());
    aggregate.insert("list_max".into(), records.iter().map(|r| r.list_max).max().unwrap_or(0).into());
    aggregate.insert("recovered".into(), records.iter().filter(|r| r.ca == CaOutcome::Found).count().into());
    if cfg.line == LineSource::Planted {
        let planted = records.iter().filter(|r| r.planted_recovered == Some(true)).count();
        aggregate.insert("planted_recovered".into(), planted.into());
    }
    aggregate.insert("field_condition".into(), records.iter().all(|r| r.field_condition).into());
    let violations = verdicts.iter().filter(|&&v| v == Verdict::Violation).count();
    Ok(ExperimentReport {
        experiment: ExperimentKind::LineGap,
        config: cfg.echo(),
        seed: cfg.seed,
        trials: records.iter().map(to_value).collect::<Result<_>>()?,
        aggregate,
        violations,
        elapsed: start.elapsed(),
    })
}
