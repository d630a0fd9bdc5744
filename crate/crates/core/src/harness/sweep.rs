//! Parameter campaigns and the field-size trend experiment.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use super::config::{ExperimentConfig, ExperimentKind};
use super::line_gap::{random_blocks, sample_params};
use super::report::{to_value, ExperimentReport};
use super::rng::trial_rng;
use super::run;
use crate::decoder::{Codeword, ListDecoder};
use crate::error::Result;
use crate::field::FieldElement;
use crate::frs::{block_distance, CodeParams};
use crate::rational::{self, Rational};
use crate::stitching::{CodeLine, Line};

/// One entry of a campaign stream.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepItem {
    Report(ExperimentReport),
    Error { point: BTreeMap<String, String>, message: String },
}

impl SweepItem {
    pub fn to_json_lines(&self) -> String {
        match self {
            Self::Report(r) => r.to_json_lines(),
            Self::Error { point, message } => format!("{}\n", json!({ "record": "error", "point": point, "message": message })),
        }
    }

    /// Errors count as failures for the campaign's exit status.
    pub fn passed(&self) -> bool {
        matches!(self, Self::Report(r) if r.passed())
    }
}

/// Cartesian product of the grid axes, first axis slowest. No axes, or an
/// axis with no values, gives no points.
pub fn grid_points(cfg: &ExperimentConfig) -> Vec<BTreeMap<String, String>> {
    if cfg.grid.is_empty() {
        return Vec::new();
    }
    let mut points = vec![BTreeMap::new()];
    for (key, values) in &cfg.grid {
        points = points
            .into_iter()
            .flat_map(|pt| {
                values.iter().map(move |v| {
                    let mut pt = pt.clone();
                    pt.insert(key.clone(), v.clone());
                    pt
                })
            })
            .collect();
    }
    points
}

fn point_config(base: &ExperimentConfig, point: &BTreeMap<String, String>) -> Result<ExperimentConfig> {
    let pairs = base.to_pairs().into_iter().filter(|(k, _)| !k.starts_with("grid-"));
    ExperimentConfig::from_pairs(pairs.chain(point.iter().map(|(k, v)| (k.clone(), v.clone()))))
}

/// Runs every point of `base.grid`; a failing point is recorded and the
/// campaign continues.
pub fn sweep(base: &ExperimentConfig) -> Vec<SweepItem> {
    grid_points(base)
        .into_iter()
        .map(|point| match point_config(base, &point).and_then(|cfg| run(&cfg)) {
            Ok(r) => SweepItem::Report(r),
            Err(e) => SweepItem::Error { point, message: e.to_string() },
        })
        .collect()
}

pub fn sweep_configs(configs: &[ExperimentConfig]) -> Vec<SweepItem> {
    configs
        .iter()
        .map(|cfg| match run(cfg) {
            Ok(r) => SweepItem::Report(r),
            Err(e) => SweepItem::Error { point: cfg.echo(), message: e.to_string() },
        })
        .collect()
}

/// A line whose points are each close to the planted code-line for only a
/// handful of parameters: `(u⁰, u¹)` agrees with `(c⁰, c¹)` jointly on
/// `core` blocks, and every other block `i` carries the error
/// `(α − β_i)·v_i`, which vanishes exactly at `α = β_i`.
pub fn far_line<R: Rng + ?Sized>(p: &CodeParams, core: usize, rng: &mut R) -> Result<(Line, CodeLine, Vec<FieldElement>)> {
    let field = p.field();
    let c0 = Codeword::encode(p, p.random_message(rng))?;
    let c1 = Codeword::encode(p, p.random_message(rng))?;
    let (mut u0, mut u1) = (c0.word.clone(), c1.word.clone());
    let keep = random_blocks(p.n(), core, rng);
    let mut betas = Vec::new();
    for i in (0..p.n()).filter(|i| !keep.contains(i)) {
        let beta = field.random(rng);
        let v: Vec<FieldElement> = loop {
            let v: Vec<FieldElement> = (0..p.m()).map(|_| field.random(rng)).collect();
            if v.iter().any(|e| !e.is_zero()) {
                break v;
            }
        };
        let b0: Vec<FieldElement> = c0.word.block(i).iter().zip(&v).map(|(&c, &x)| c - beta * x).collect();
        let b1: Vec<FieldElement> = c1.word.block(i).iter().zip(&v).map(|(&c, &x)| c + x).collect();
        u0.set_block(i, &b0);
        u1.set_block(i, &b1);
        betas.push(beta);
    }
    Ok((Line::new(u0, u1)?, CodeLine::from_endpoints(c0, c1), betas))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrendTrial {
    #[serde(with = "rational::serde_str")]
    pub eta: Rational,
    pub q: u64,
    pub line: usize,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub core: usize,
    /// Parameters where the planted code-line is within `δ'`; exhaustive.
    pub witness_close: usize,
    pub sampled: usize,
    pub decoder_close: usize,
    /// Sampled parameters close only through some other codeword.
    pub extra: usize,
    /// Sampled parameters where the decoder missed the planted codeword
    /// inside its guaranteed radius.
    pub misses: usize,
    pub decoder_certified: bool,
    /// `witness_close/q + extra/sampled`.
    #[serde(with = "rational::serde_str")]
    pub close_fraction: Rational,
}

pub fn trend_trial<R: Rng + ?Sized>(
    cfg: &ExperimentConfig,
    p: &CodeParams,
    decoder: &ListDecoder,
    eta: Rational,
    line_index: usize,
    rng: &mut R,
) -> Result<TrendTrial> {
    let n = p.n() as i64;
    let one = Rational::from_integer(1);
    let rate = p.rate();
    let delta = one - rate - eta;
    let core = ((rate + eta) * Rational::from_integer(n)).ceil().to_integer() as usize - 1;
    let (line, witness, _) = far_line(p, core, rng)?;
    let field = p.field();
    let planted_close: Vec<bool> = field
        .elements()
        .map(|a| block_distance(&line.at(a), &witness.at(a).word).map(|d| d <= delta))
        .collect::<Result<_>>()?;
    let witness_close = planted_close.iter().filter(|&&c| c).count();
    let (alphas, _) = sample_params(field, cfg.alpha_samples, rng);
    let certified = delta <= decoder.completeness_radius();
    let (mut decoder_close, mut extra, mut misses) = (0, 0, 0);
    for &a in &alphas {
        let y = line.at(a);
        let res = decoder.decode(&y, delta)?;
        let close = !res.list.is_empty();
        let planted = planted_close[a.value() as usize];
        decoder_close += close as usize;
        if planted && certified && !res.list.contains(&witness.at(a)) {
            misses += 1;
        }
        if close && !res.list.iter().all(|c| *c == witness.at(a)) {
            extra += !planted as usize;
        }
    }
    let (q, s) = (p.q() as i64, alphas.len() as i64);
    Ok(TrendTrial {
        eta,
        q: p.q(),
        line: line_index,
        delta,
        core,
        witness_close,
        sampled: alphas.len(),
        decoder_close,
        extra,
        misses,
        decoder_certified: certified,
        close_fraction: Rational::new(witness_close as i64 * s + extra as i64 * q, q * s),
    })
}

/// Least-squares slope of `ln y` against `ln x` with a separate intercept
/// per group. `None` if a value is not positive or the x spread is zero.
pub fn pooled_log_slope(groups: &[Vec<(f64, f64)>]) -> Option<f64> {
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for g in groups {
        if g.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
            return None;
        }
        let pts: Vec<(f64, f64)> = g.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
        let len = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
        sxy += pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
        sxx += pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

pub const TREND_EXPONENT_RANGE: (f64, f64) = (0.8, 1.2);

/// Close fraction of far lines over the `qs × etas` grid at fixed
/// `(m, n, k)`, with the fitted exponent of `ε ∝ q^{-e}` in the aggregate.
pub fn run_trend(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate(ExperimentKind::Trend)?;
    let start = std::time::Instant::now();
    let mut records = Vec::new();
    let mut index = 0u64;
    for &q in &cfg.qs {
        let p = cfg.code_params_at(q)?;
        let decoder = ListDecoder::algebraic(&p, cfg.cap)?;
        for &eta in &cfg.etas {
            for l in 0..cfg.lines {
                let mut rng = trial_rng(cfg.seed, index);
                index += 1;
                records.push(trend_trial(cfg, &p, &decoder, eta, l, &mut rng)?);
            }
        }
    }
    let mut points = Vec::new();
    let mut groups = Vec::new();
    let mut decreasing = true;
    for &eta in &cfg.etas {
        let mut group = Vec::new();
        for &q in &cfg.qs {
            let rows: Vec<&TrendTrial> = records.iter().filter(|r| r.eta == eta && r.q == q).collect();
            let mean = rows.iter().map(|r| rational::to_f64(&r.close_fraction)).sum::<f64>() / rows.len() as f64;
            if group.last().is_some_and(|&(_, prev): &(f64, f64)| mean >= prev) {
                decreasing = false;
            }
            group.push((q as f64, mean));
            points.push(json!({ "eta": rational::format_rational(&eta), "q": q, "close_fraction": mean }));
        }
        groups.push(group);
    }
    let exponent = pooled_log_slope(&groups).map(|s| -s);
    let (lo, hi) = TREND_EXPONENT_RANGE;
    let in_range = exponent.is_some_and(|e| (lo..=hi).contains(&e));
    let misses: usize = records.iter().map(|r| r.misses).sum();
    let mut aggregate = Map::new();
    aggregate.insert("points".into(), Value::Array(points));
    aggregate.insert("exponent".into(), exponent.map_or(Value::Null, Value::from));
    aggregate.insert("exponent_range".into(), json!([lo, hi]));
    aggregate.insert("exponent_in_range".into(), in_range.into());
    aggregate.insert("decreasing".into(), decreasing.into());
    aggregate.insert("decoder_misses".into(), misses.into());
    let violations = misses + usize::from(!in_range);
    Ok(ExperimentReport {
        experiment: ExperimentKind::Trend,
        config: cfg.echo(),
        seed: cfg.seed,
        trials: records.iter().map(to_value).collect::<Result<_>>()?,
        aggregate,
        violations,
        elapsed: start.elapsed(),
    })
}
