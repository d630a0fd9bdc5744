//! Affine proximity-gap experiments via lines through a far point.

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;
use serde_json::Map;

use super::config::{Corruption, ExperimentConfig, ExperimentKind, LineSource};
use super::line_gap::{corrupt_blocks, corrupted_count, make_decoder, random_blocks, widened};
use super::report::{tally, to_value, ExperimentReport, Verdict};
use super::rng::trial_rng;
use crate::decoder::ListDecoder;
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::frs::{block_distance, CodeParams, Word};
use crate::linalg::LinearSubspace;
use crate::rational::{self, Rational};

/// `U = { u₀ + Σ_j x_j d_j : x ∈ F_q^ℓ }` with independent `d_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineInstance {
    pub anchor: Word,
    pub directions: Vec<Word>,
}

impl AffineInstance {
    pub fn new(anchor: Word, directions: Vec<Word>) -> Result<Self> {
        if directions.iter().any(|d| d.m() != anchor.m() || d.n() != anchor.n()) {
            return Err(Error::ShapeError("directions differ in shape from the anchor".into()));
        }
        if let Some(first) = anchor.entries().first() {
            let rows: Vec<Vec<FieldElement>> = directions.iter().map(|d| d.entries().to_vec()).collect();
            let span = LinearSubspace::span(first.field(), anchor.entries().len(), &rows)?;
            if span.dim() != directions.len() {
                return Err(Error::PreconditionFailed("directions are linearly dependent".into()));
            }
        }
        Ok(Self { anchor, directions })
    }

    pub fn ell(&self) -> usize {
        self.directions.len()
    }

    pub fn at(&self, x: &[FieldElement]) -> Word {
        x.iter().zip(&self.directions).fold(self.anchor.clone(), |acc, (&c, d)| acc.add_scaled(d, c))
    }
}

fn draw_instance<R: Rng + ?Sized>(cfg: &ExperimentConfig, p: &CodeParams, rng: &mut R) -> Result<AffineInstance> {
    let ell = cfg.ell;
    for _ in 0..64 {
        let mut words: Vec<Word> = match cfg.line {
            LineSource::Random => (0..=ell).map(|_| p.random_word(rng)).collect(),
            LineSource::Planted => (0..=ell).map(|_| p.encode(&p.random_message(rng))).collect::<Result<_>>()?,
        };
        if cfg.line == LineSource::Planted {
            let count = corrupted_count(cfg.delta, p.n())?;
            match cfg.corruption {
                Corruption::None => {}
                Corruption::JointBlock => {
                    let blocks = random_blocks(p.n(), count, rng);
                    for w in &mut words {
                        corrupt_blocks(p.field(), w, &blocks, rng);
                    }
                }
                Corruption::PerAlpha => {
                    for w in &mut words {
                        let blocks = random_blocks(p.n(), count, rng);
                        corrupt_blocks(p.field(), w, &blocks, rng);
                    }
                }
            }
        }
        let anchor = words.remove(0);
        match AffineInstance::new(anchor, words) {
            Ok(inst) => return Ok(inst),
            Err(Error::PreconditionFailed(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::PreconditionFailed("could not draw independent directions".into()))
}

/// Coefficient vectors of `F_q^ℓ` in lexicographic order, last coordinate fastest.
pub fn coefficient_vectors(field: PrimeField, ell: usize, cap: u128) -> Result<Vec<Vec<FieldElement>>> {
    let q = field.modulus() as u128;
    let size = q.checked_pow(ell as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::EnumerationTooLarge { size, cap });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut cur = vec![0u64; ell];
    for _ in 0..size {
        out.push(cur.iter().map(|&v| field.elem(v)).collect());
        for c in cur.iter_mut().rev() {
            *c += 1;
            if (*c as u128) < q {
                break;
            }
            *c = 0;
        }
    }
    Ok(out)
}

/// Projective representatives of `F_q^ℓ ∖ {0}`: first nonzero coordinate 1.
fn line_directions(points: &[Vec<FieldElement>]) -> Vec<&Vec<FieldElement>> {
    points
        .iter()
        .filter(|x| x.iter().find(|e| !e.is_zero()).is_some_and(|e| e.value() == 1))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PointClass {
    Close,
    Middle,
    Far { certified: bool },
}

fn classify(decoder: &ListDecoder, y: &Word, cfg: &ExperimentConfig) -> Result<(PointClass, usize)> {
    let far_radius = widened(cfg.delta, cfg.t2);
    let res = decoder.decode(y, widened(cfg.delta, cfg.t1))?;
    let mut nearest: Option<Rational> = None;
    for c in &res.list {
        let d = block_distance(&c.word, y)?;
        nearest = Some(nearest.map_or(d, |b| b.min(d)));
    }
    let class = match nearest {
        Some(d) if d <= cfg.delta => PointClass::Close,
        Some(d) if d <= far_radius => PointClass::Middle,
        _ => PointClass::Far { certified: res.complete },
    };
    Ok((class, res.list.len()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityCheck {
    pub pairs: usize,
    pub min_hits: usize,
    pub max_hits: usize,
    pub hits_on_far_point: usize,
    pub points_hit: usize,
    pub holds: bool,
}

/// Counts, over `α ∈ F_q^×` and `d ∈ W∖{0}`, how often `u* + α·d` lands on
/// each point of `U`; every point other than `u*` must be hit `q−1` times.
pub fn multiplicity_check(inst: &AffineInstance, far: &[FieldElement], points: &[Vec<FieldElement>]) -> MultiplicityCheck {
    let field = far[0].field();
    let q = field.modulus() as usize;
    let u_star = inst.at(far);
    let mut hits: HashMap<Word, usize> = HashMap::new();
    let mut pairs = 0;
    for d in points.iter().filter(|x| x.iter().any(|e| !e.is_zero())) {
        let step = inst.directions.iter().zip(d).fold(Word::zeros(field, inst.anchor.m(), inst.anchor.n()), |acc, (w, &c)| {
            acc.add_scaled(w, c)
        });
        for alpha in field.nonzero_elements() {
            *hits.entry(u_star.add_scaled(&step, alpha)).or_default() += 1;
            pairs += 1;
        }
    }
    let hits_on_far_point = hits.remove(&u_star).unwrap_or(0);
    let min_hits = hits.values().copied().min().unwrap_or(0);
    let max_hits = hits.values().copied().max().unwrap_or(0);
    let points_hit = hits.len();
    let holds = hits_on_far_point == 0 && points_hit == points.len() - 1 && min_hits == q - 1 && max_hits == q - 1;
    MultiplicityCheck { pairs, min_hits, max_hits, hits_on_far_point, points_hit, holds }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineGapTrial {
    pub source: LineSource,
    pub ell: usize,
    pub points: usize,
    pub close_count: usize,
    #[serde(with = "rational::serde_str")]
    pub density: Rational,
    /// Coefficients of the first point outside `δ'/(1−1/t₂)`.
    pub far_point: Option<Vec<FieldElement>>,
    pub far_certified: bool,
    pub lines_through_far: usize,
    /// Largest close fraction over lines through the far point.
    #[serde(with = "rational::serde_opt")]
    pub eps_emp: Option<Rational>,
    /// `ε_emp · q/(q−1)`.
    #[serde(with = "rational::serde_opt")]
    pub bound: Option<Rational>,
    pub density_ok: Option<bool>,
    pub list_max: usize,
    pub threshold: usize,
    pub lines_over_threshold: usize,
    pub multiplicity: Option<MultiplicityCheck>,
    pub verdict: Verdict,
}

/// One trial on a given affine subspace.
pub fn affine_gap_trial(cfg: &ExperimentConfig, p: &CodeParams, decoder: &ListDecoder, inst: &AffineInstance) -> Result<AffineGapTrial> {
    let field = p.field();
    let q = p.q() as i64;
    let points = coefficient_vectors(field, inst.ell(), cfg.cap)?;
    let mut classes = HashMap::with_capacity(points.len());
    let mut list_max = 0;
    for x in &points {
        let (class, len) = classify(decoder, &inst.at(x), cfg)?;
        list_max = list_max.max(len);
        classes.insert(x.clone(), class);
    }
    let close_count = classes.values().filter(|c| **c == PointClass::Close).count();
    let density = Rational::new(close_count as i64, points.len() as i64);
    let threshold = (cfg.t2 - 1) * list_max + cfg.a;
    let far = points.iter().find(|x| matches!(classes[*x], PointClass::Far { .. })).cloned();
    let mut trial = AffineGapTrial {
        source: cfg.line,
        ell: inst.ell(),
        points: points.len(),
        close_count,
        density,
        far_point: far.clone(),
        far_certified: false,
        lines_through_far: 0,
        eps_emp: None,
        bound: None,
        density_ok: None,
        list_max,
        threshold,
        lines_over_threshold: 0,
        multiplicity: None,
        verdict: Verdict::AllClose,
    };
    let Some(far) = far else {
        return Ok(trial);
    };
    trial.far_certified = classes[&far] == PointClass::Far { certified: true };
    let mut eps_emp = Rational::from_integer(0);
    let dirs = line_directions(&points);
    for d in &dirs {
        let close = field
            .elements()
            .filter(|&alpha| {
                let x: Vec<FieldElement> = far.iter().zip(d.iter()).map(|(&f, &c)| f + alpha * c).collect();
                classes[&x] == PointClass::Close
            })
            .count();
        if close > threshold {
            trial.lines_over_threshold += 1;
        }
        eps_emp = eps_emp.max(Rational::new(close as i64, q));
    }
    trial.lines_through_far = dirs.len();
    let bound = eps_emp * Rational::new(q, q - 1);
    trial.eps_emp = Some(eps_emp);
    trial.bound = Some(bound);
    trial.density_ok = Some(density <= bound);
    let pairs = (q as u128 - 1) * (points.len() as u128 - 1);
    if pairs <= cfg.cap {
        trial.multiplicity = Some(multiplicity_check(inst, &far, &points));
    }
    let identity_ok = trial.multiplicity.as_ref().is_none_or(|m| m.holds);
    trial.verdict = match (density <= bound && identity_ok, trial.far_certified && trial.lines_over_threshold == 0) {
        (false, _) => Verdict::Violation,
        (true, true) => Verdict::Sound,
        // a line through a certified far point over threshold breaks the line gap
        (true, false) if trial.far_certified => Verdict::Violation,
        (true, false) => Verdict::Inconclusive,
    };
    Ok(trial)
}

pub fn run_affine_gap(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate(ExperimentKind::AffineGap)?;
    let start = std::time::Instant::now();
    let p = cfg.code_params()?;
    let decoder = make_decoder(cfg, &p)?;
    let mut records = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        let inst = draw_instance(cfg, &p, &mut rng)?;
        records.push(affine_gap_trial(cfg, &p, &decoder, &inst)?);
    }
    let verdicts: Vec<Verdict> = records.iter().map(|r| r.verdict).collect();
    let mut aggregate = Map::new();
    aggregate.insert("verdicts".into(), tally(&verdicts).into());
    let max_density = records.iter().filter(|r| r.far_point.is_some()).map(|r| r.density).max();
    aggregate.insert("max_density_with_far_point".into(), max_density.map(|d| rational::format_rational(&d)).into());
    let eps = records.iter().filter_map(|r| r.eps_emp).max();
    aggregate.insert("eps_emp".into(), eps.map(|e| rational::format_rational(&e)).into());
    let checked = records.iter().filter(|r| r.multiplicity.is_some()).count();
    let identity = records.iter().filter_map(|r| r.multiplicity.as_ref()).all(|m| m.holds);
    aggregate.insert("multiplicity_checked".into(), checked.into());
    aggregate.insert("multiplicity_holds".into(), identity.into());
    let violations = verdicts.iter().filter(|&&v| v == Verdict::Violation).count();
    Ok(ExperimentReport {
        experiment: ExperimentKind::AffineGap,
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
    use crate::harness::line_gap::{line_gap_trial, LineInstance};
    use crate::stitching::Line;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn subspace_of_codewords_is_all_close() {
        let cfg = ExperimentConfig::preset("tiny").unwrap().with("corruption", "none").unwrap().with("trials", "2").unwrap();
        let report = run_affine_gap(&cfg).unwrap();
        for t in &report.trials {
            assert_eq!(t["density"], "1/1");
            assert_eq!(t["verdict"], "all-close");
        }
    }

    #[test]
    fn random_plane_has_far_point_and_identity() {
        let cfg = ExperimentConfig::preset("tiny").unwrap().with("line", "random").unwrap().with("trials", "3").unwrap();
        let report = run_affine_gap(&cfg).unwrap();
        assert!(report.passed());
        assert_eq!(report.aggregate["multiplicity_holds"], true);
        for t in &report.trials {
            assert_eq!(t["points"], 289);
            assert_eq!(t["lines_through_far"], 18);
        }
    }

    #[test]
    fn one_dimensional_case_matches_line_gap() {
        let cfg = ExperimentConfig::preset("tiny").unwrap().with("ell", "1").unwrap();
        let p = cfg.code_params().unwrap();
        let decoder = make_decoder(&cfg, &p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let (u0, u1) = (p.random_word(&mut rng), p.random_word(&mut rng));
            let inst = AffineInstance::new(u0.clone(), vec![u1.clone()]).unwrap();
            let affine = affine_gap_trial(&cfg, &p, &decoder, &inst).unwrap();
            let line = LineInstance { line: Line::new(u0, u1).unwrap(), witness: None };
            let lg = line_gap_trial(&cfg, &p, &decoder, &line, &mut rng).unwrap();
            assert_eq!(affine.close_count, lg.close_count);
            assert_eq!(affine.far_point.is_some(), lg.far_point.is_some() || lg.uncertified_far > 0);
            if affine.far_point.is_some() {
                assert_eq!(affine.eps_emp, Some(lg.close_fraction));
            }
        }
    }

    #[test]
    fn enumeration_respects_cap() {
        let f = PrimeField::new(17).unwrap();
        assert_eq!(coefficient_vectors(f, 2, 1000).unwrap().len(), 289);
        assert!(coefficient_vectors(f, 3, 1000).is_err());
    }
}
