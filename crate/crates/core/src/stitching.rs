//! Received lines, code-lines, stitching and peeling.
//!
//! A received line is `u(α) = u⁰ + α·u¹`. Near each parameter we choose a
//! codeword `f(α)`; stitching pins the cluster of choices to a few blocks and
//! recovers a code-line through many of them, peeling repeats this on the
//! unmatched parameters, and correlated agreement reads off a code-line that
//! agrees with `(u⁰, u¹)` jointly on most blocks.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::decoder::{Codeword, DecodeResult, ListDecoder};
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::frs::{block_distance, CodeParams, Word};
use crate::linalg::{AffineSubspace, LinearSubspace};
use crate::pinning::{PinSampler, PinSet};
use crate::poly::Poly;
use crate::rational::{self, Rational};

/// Nearby codewords chosen along a line, keyed by parameter.
pub type Choices = BTreeMap<FieldElement, Codeword>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Line {
    pub u0: Word,
    pub u1: Word,
}

impl Line {
    pub fn new(u0: Word, u1: Word) -> Result<Self> {
        if u0.m() != u1.m() || u0.n() != u1.n() {
            return Err(Error::ShapeError("line endpoints differ in shape".into()));
        }
        Ok(Self { u0, u1 })
    }

    pub fn at(&self, alpha: FieldElement) -> Word {
        self.u0.add_scaled(&self.u1, alpha)
    }

    pub fn n(&self) -> usize {
        self.u0.n()
    }

    /// Blocks where `(u⁰_i, u¹_i) = (c⁰_i, c¹_i)`.
    pub fn joint_agreement(&self, c0: &Word, c1: &Word) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.u0.block(i) == c0.block(i) && self.u1.block(i) == c1.block(i))
            .collect()
    }

    /// Distance between pairs in `(Σ×Σ)^n`.
    pub fn joint_distance(&self, c0: &Word, c1: &Word) -> Rational {
        let n = self.n();
        Rational::new((n - self.joint_agreement(c0, c1).len()) as i64, n as i64)
    }
}

/// `α ↦ c⁰ + α·c¹` with both endpoints codewords.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CodeLine {
    pub c0: Codeword,
    pub c1: Codeword,
    /// The two parameters the line was fitted through.
    pub fitted_from: (FieldElement, FieldElement),
}

impl CodeLine {
    /// The code-line through `(α₁, f₁)` and `(α₂, f₂)`.
    pub fn through(a1: FieldElement, f1: &Codeword, a2: FieldElement, f2: &Codeword) -> Result<Self> {
        let inv = (a2 - a1).inv()?;
        let m1 = (&f2.message - &f1.message).scale(inv);
        let w1 = f2.word.sub(&f1.word).scale(inv);
        let m0 = &f1.message - &m1.scale(a1);
        let w0 = f1.word.add_scaled(&w1, -a1);
        Ok(Self {
            c0: Codeword { message: m0, word: w0 },
            c1: Codeword { message: m1, word: w1 },
            fitted_from: (a1, a2),
        })
    }

    /// The planted line `(c⁰, c¹)` itself.
    pub fn from_endpoints(c0: Codeword, c1: Codeword) -> Self {
        let zero = c0.message.field().zero();
        Self { c0, c1, fitted_from: (zero, zero) }
    }

    pub fn at(&self, alpha: FieldElement) -> Codeword {
        Codeword {
            message: &self.c0.message + &self.c1.message.scale(alpha),
            word: self.c0.word.add_scaled(&self.c1.word, alpha),
        }
    }

    /// Same affine map, regardless of how it was fitted.
    pub fn same_as(&self, other: &CodeLine) -> bool {
        self.c0.word == other.c0.word && self.c1.word == other.c1.word
    }

    /// Both endpoints re-encode from their messages.
    pub fn verify(&self, p: &CodeParams) -> Result<bool> {
        Ok(p.encode(&self.c0.message)? == self.c0.word && p.encode(&self.c1.message)? == self.c1.word)
    }

    pub fn as_line(&self) -> Line {
        Line { u0: self.c0.word.clone(), u1: self.c1.word.clone() }
    }
}

fn eval_param(words: &[Word], alpha: FieldElement) -> Word {
    let mut acc = words.last().expect("at least one coefficient").clone();
    for w in words.iter().rev().skip(1) {
        acc = w.add(&acc.scale(alpha));
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InterpolationCheck {
    #[serde(with = "rational::serde_str")]
    pub max_distance: Rational,
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    pub holds: bool,
}

/// Exhaustive check that `Δ(u(α), c(α)) ≤ δ/(1−ℓ/t)` for every `α ∈ F_q`
/// given it on the `t` parameters in `a`, where `u(α) = Σ_j α^j u^{(j)}`.
pub fn interpolation_bound_check(
    field: PrimeField,
    u_coeffs: &[Word],
    c_coeffs: &[Word],
    a: &[FieldElement],
    delta: Rational,
    cap: u128,
) -> Result<InterpolationCheck> {
    if u_coeffs.is_empty() || u_coeffs.len() != c_coeffs.len() {
        return Err(Error::ShapeError("need matching nonempty coefficient sequences".into()));
    }
    let ell = u_coeffs.len() - 1;
    let mut params = a.to_vec();
    params.sort();
    params.dedup();
    if params.len() != a.len() {
        return Err(Error::PreconditionFailed("parameters must be distinct".into()));
    }
    let t = a.len();
    if t <= ell {
        return Err(Error::PreconditionFailed(format!("need t = {t} > l = {ell}")));
    }
    if field.modulus() as u128 > cap {
        return Err(Error::EnumerationTooLarge { size: field.modulus() as u128, cap });
    }
    for &alpha in a {
        let d = block_distance(&eval_param(u_coeffs, alpha), &eval_param(c_coeffs, alpha))?;
        if d > delta {
            return Err(Error::PreconditionFailed(format!(
                "distance {} > delta at a chosen parameter",
                rational::format_rational(&d)
            )));
        }
    }
    let mut max_distance = Rational::from_integer(0);
    for alpha in field.elements() {
        let d = block_distance(&eval_param(u_coeffs, alpha), &eval_param(c_coeffs, alpha))?;
        max_distance = max_distance.max(d);
    }
    let bound = delta / (Rational::from_integer(1) - Rational::new(ell as i64, t as i64));
    Ok(InterpolationCheck { max_distance, bound, holds: max_distance <= bound })
}

/// `max_α Δ(u(α), c(α))` for two lines, without sweeping `α`.
///
/// A block where the lines differ as affine maps agrees for at most one `α`,
/// so the maximum is attained at any parameter hitting the fewest such roots.
pub fn line_max_distance(field: PrimeField, u: &Line, c: &Line) -> Rational {
    let n = u.n();
    let mut differing = 0;
    let mut roots: BTreeMap<FieldElement, usize> = BTreeMap::new();
    for i in 0..n {
        let d0: Vec<FieldElement> = u.u0.block(i).iter().zip(c.u0.block(i)).map(|(&x, &y)| x - y).collect();
        let d1: Vec<FieldElement> = u.u1.block(i).iter().zip(c.u1.block(i)).map(|(&x, &y)| x - y).collect();
        if d0.iter().chain(&d1).all(|e| e.is_zero()) {
            continue;
        }
        differing += 1;
        // d0 + α d1 = 0 has at most one solution
        if let Some(j) = d1.iter().position(|e| !e.is_zero()) {
            let alpha = -d0[j] * d1[j].inv().expect("nonzero");
            if d0.iter().zip(&d1).all(|(&x, &y)| (x + alpha * y).is_zero()) {
                *roots.entry(alpha).or_default() += 1;
            }
        }
    }
    let fewest = if (roots.len() as u64) < field.modulus() { 0 } else { *roots.values().min().unwrap_or(&0) };
    Rational::new((differing - fewest) as i64, n as i64)
}

/// How to pick `f(α)` among the codewords within radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChoiceRule {
    /// Smallest distance; ties to the least message.
    Nearest,
    /// Largest admissible distance; ties to the least message.
    Farthest,
}

/// Picks from a decoded list, which is sorted by message.
pub fn choose(y: &Word, list: &DecodeResult, delta: Rational, rule: ChoiceRule) -> Result<Option<Codeword>> {
    let mut best: Option<(Rational, &Codeword)> = None;
    for c in &list.list {
        let d = block_distance(&c.word, y)?;
        if d > delta {
            continue;
        }
        let better = match (&best, rule) {
            (None, _) => true,
            (Some((b, _)), ChoiceRule::Nearest) => d < *b,
            (Some((b, _)), ChoiceRule::Farthest) => d > *b,
        };
        if better {
            best = Some((d, c));
        }
    }
    Ok(best.map(|(_, c)| c.clone()))
}

/// Decodes `u(α)` at `radius` for each parameter. A known code-line `witness`
/// is admitted into each list when it is within radius.
pub fn scan_line(
    decoder: &ListDecoder,
    line: &Line,
    radius: Rational,
    alphas: &[FieldElement],
    witness: Option<&CodeLine>,
) -> Result<Vec<(FieldElement, DecodeResult)>> {
    alphas
        .iter()
        .map(|&alpha| {
            let y = line.at(alpha);
            let res = match witness {
                Some(w) => decoder.decode_with_hints(&y, radius, &[w.at(alpha)])?,
                None => decoder.decode(&y, radius)?,
            };
            Ok((alpha, res))
        })
        .collect()
}

/// `A₀ = {α : Δ(u(α), C) ≤ δ'}` over all of F_q with one choice per α.
pub fn near_params(decoder: &ListDecoder, line: &Line, delta: Rational, rule: ChoiceRule) -> Result<Choices> {
    let field = decoder.params().field();
    let alphas: Vec<FieldElement> = field.elements().collect();
    choices_from_scan(line, &scan_line(decoder, line, delta, &alphas, None)?, delta, rule)
}

pub fn choices_from_scan(line: &Line, scan: &[(FieldElement, DecodeResult)], delta: Rational, rule: ChoiceRule) -> Result<Choices> {
    let mut out = Choices::new();
    for (alpha, res) in scan {
        if let Some(c) = choose(&line.at(*alpha), res, delta, rule)? {
            out.insert(*alpha, c);
        }
    }
    Ok(out)
}

/// Affine span of the chosen codewords, as a subspace of F_q^{mn}.
///
/// The span is computed on messages and then encoded, which is the same
/// subspace because encoding is linear and injective.
pub fn ambient_cluster(p: &CodeParams, chosen: &Choices) -> Result<AffineSubspace> {
    let messages: Vec<Vec<FieldElement>> =
        chosen.values().map(|c| c.message.to_vector(p.k())).collect::<Result<_>>()?;
    if messages.is_empty() {
        return Err(Error::PreconditionFailed("cluster of no codewords".into()));
    }
    let span = AffineSubspace::affine_span(p.field(), &messages)?;
    let encode = |v: &[FieldElement]| p.encode_coeffs(v).map(Word::into_entries);
    let dirs: Vec<Vec<FieldElement>> = span.directions().basis().iter().map(|b| encode(b)).collect::<Result<_>>()?;
    let directions = LinearSubspace::span(p.field(), p.length(), &dirs)?;
    AffineSubspace::new(encode(span.anchor())?, directions)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StitchOutcome {
    pub code_line: CodeLine,
    pub matched: Vec<FieldElement>,
    pub pin_set: PinSet,
    pub attempts: usize,
    pub cluster_dim: usize,
    pub anchor_param: FieldElement,
}

/// Pin samples allowed per stitching stage.
pub fn retry_budget(r: usize) -> usize {
    32 * r * r
}

/// One stitching stage over `chosen`: pin the cluster, collect the
/// parameters whose choice agrees with `u(α)` on the pin set, and fit the
/// code-line through the two least of them. Retries until at least
/// `max(2, t)` parameters match.
pub fn stitch<R: Rng + ?Sized>(
    p: &CodeParams,
    line: &Line,
    chosen: &Choices,
    eps: Rational,
    r: usize,
    t: usize,
    rng: &mut R,
) -> Result<StitchOutcome> {
    if chosen.len() < 2 {
        return Err(Error::PreconditionFailed(format!("stitching needs two choices, got {}", chosen.len())));
    }
    let cluster = ambient_cluster(p, chosen)?;
    if cluster.dim() > r {
        return Err(Error::ClusterTooLarge { dim: cluster.dim(), r });
    }
    let (&anchor_param, _) = chosen.iter().next().expect("nonempty");
    let v = cluster.directions();
    let need = t.max(2);
    let budget = retry_budget(r);
    let received: BTreeMap<FieldElement, Word> = chosen.keys().map(|&a| (a, line.at(a))).collect();
    let mut sampler = PinSampler::new(v, p.m(), eps)?;
    for attempt in 1..=budget {
        let pin_set = sampler.sample(rng)?;
        let matched: Vec<FieldElement> = chosen
            .iter()
            .filter(|(a, f)| pin_set.coords.iter().all(|&i| f.word.block(i) == received[*a].block(i)))
            .map(|(&a, _)| a)
            .collect();
        if matched.len() < need {
            continue;
        }
        let (a1, a2) = (matched[0], matched[1]);
        let code_line = CodeLine::through(a1, &chosen[&a1], a2, &chosen[&a2])?;
        for a in &matched {
            if code_line.at(*a).word != chosen[a].word {
                return Err(Error::InvariantViolated(format!("choice at {a} is off the stitched line")));
            }
        }
        return Ok(StitchOutcome { code_line, matched, pin_set, attempts: attempt, cluster_dim: cluster.dim(), anchor_param });
    }
    Err(Error::StitchFailed { attempts: budget })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeelStage {
    pub outcome: StitchOutcome,
    /// `max_α Δ(u(α), c_s(α))` and `δ'/(1 − 1/|B_s|)`.
    #[serde(with = "rational::serde_str")]
    pub global_distance: Rational,
    #[serde(with = "rational::serde_str")]
    pub global_bound: Rational,
}

/// Distinct peeled code-lines with all parameters matched to each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeeledLine {
    pub line: CodeLine,
    pub matched: Vec<FieldElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeelTrace {
    pub stages: Vec<PeelStage>,
    pub lines: Vec<PeeledLine>,
    pub residual: usize,
}

/// Stitching parameters shared by peeling and correlated agreement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StitchParams {
    pub delta: Rational,
    pub eps: Rational,
    pub r: usize,
    pub a: usize,
    pub t1: usize,
}

/// Peels stitched lines off `chosen` while at least `a` parameters remain.
pub fn peel<R: Rng + ?Sized>(p: &CodeParams, line: &Line, chosen: &Choices, sp: StitchParams, rng: &mut R) -> Result<PeelTrace> {
    if sp.t1 < 2 || sp.a < 2 {
        return Err(Error::InvalidParams(format!("peeling needs t1 >= 2 and a >= 2, got t1 = {}, a = {}", sp.t1, sp.a)));
    }
    let field = p.field();
    let mut residual = chosen.clone();
    let mut stages = Vec::new();
    let mut lines: Vec<PeeledLine> = Vec::new();
    while residual.len() >= sp.a {
        let outcome = stitch(p, line, &residual, sp.eps, sp.r, sp.t1, rng)?;
        let global_distance = line_max_distance(field, line, &outcome.code_line.as_line());
        let t = outcome.matched.len() as i64;
        let global_bound = sp.delta / (Rational::from_integer(1) - Rational::new(1, t));
        if global_distance > global_bound {
            return Err(Error::InvariantViolated("peeled line is not globally close".into()));
        }
        for a in &outcome.matched {
            residual.remove(a);
        }
        match lines.iter_mut().find(|l| l.line.same_as(&outcome.code_line)) {
            Some(l) => l.matched.extend(&outcome.matched),
            None => lines.push(PeeledLine { line: outcome.code_line.clone(), matched: outcome.matched.clone() }),
        }
        stages.push(PeelStage { outcome, global_distance, global_bound });
    }
    for l in &mut lines {
        l.matched.sort();
    }
    Ok(PeelTrace { stages, lines, residual: residual.len() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Agreement {
    pub line: CodeLine,
    /// Blocks where `(u⁰, u¹)` and `(c⁰, c¹)` agree.
    pub agreement: Vec<usize>,
    pub matched: usize,
}

/// Peels and returns the first line collecting at least `t2` matches.
pub fn correlated_agreement<R: Rng + ?Sized>(
    p: &CodeParams,
    line: &Line,
    chosen: &Choices,
    sp: StitchParams,
    t2: usize,
    rng: &mut R,
) -> Result<(Option<Agreement>, PeelTrace)> {
    if t2 < sp.t1 {
        return Err(Error::InvalidParams(format!("need t2 >= t1, got t2 = {t2}, t1 = {}", sp.t1)));
    }
    let trace = peel(p, line, chosen, sp, rng)?;
    let Some(found) = trace.lines.iter().find(|l| l.matched.len() >= t2) else {
        return Ok((None, trace));
    };
    let agreement = line.joint_agreement(&found.line.c0.word, &found.line.c1.word);
    let n = p.n() as i64;
    let need = (Rational::from_integer(1) - sp.delta / (Rational::from_integer(1) - Rational::new(1, t2 as i64))) * n;
    if Rational::from_integer(agreement.len() as i64) < need {
        return Err(Error::InvariantViolated(format!(
            "agreement on {} blocks is below {}",
            agreement.len(),
            rational::format_rational(&need)
        )));
    }
    let out = Agreement { line: found.line.clone(), matched: found.matched.len(), agreement };
    Ok((Some(out), trace))
}

/// Lift a message-space code-line into one with explicit codewords.
pub fn code_line_from_messages(p: &CodeParams, m0: Poly, m1: Poly) -> Result<CodeLine> {
    Ok(CodeLine::from_endpoints(Codeword::encode(p, m0)?, Codeword::encode(p, m1)?))
}
