//! List decoding for folded Reed-Solomon codes.
//!
//! Two paths share one result type: exhaustive enumeration over all
//! messages, and the linear-algebraic decoder, which interpolates
//! `Q(X, Y_1..Y_s) = A_0(X) + Σ_j A_j(X) Y_j` through the length-`s` windows
//! of the received word and then solves `Q(X, f(X), …, f(γ^{s-1}X)) ≡ 0`
//! for an affine space of candidate messages that is pruned by enumeration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::frs::{block_distance, CodeParams, Word};
use crate::linalg::{null_space, solve, AffineSubspace};
use crate::poly::Poly;
use crate::rational::{self, Rational};

/// A message together with its encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Codeword {
    pub message: Poly,
    pub word: Word,
}

impl Codeword {
    pub fn encode(p: &CodeParams, message: Poly) -> Result<Self> {
        let word = p.encode(&message)?;
        Ok(Self { message, word })
    }

    /// Message coefficients padded to length `k`, the order key for ties.
    pub fn key(&self, k: usize) -> Vec<u64> {
        let mut out: Vec<u64> = self.message.coeffs().iter().map(|c| c.value()).collect();
        out.resize(k, 0);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeResult {
    #[serde(with = "rational::serde_str")]
    pub radius: Rational,
    /// Sorted by message coefficient vector.
    pub list: Vec<Codeword>,
    pub candidate_space: Option<CandidateSpace>,
    /// Whether the list is certified to contain every codeword within `radius`.
    pub complete: bool,
}

impl DecodeResult {
    fn sorted(radius: Rational, mut list: Vec<Codeword>, k: usize, candidate_space: Option<CandidateSpace>, complete: bool) -> Self {
        list.sort_by_cached_key(|c| c.key(k));
        list.dedup();
        Self { radius, list, candidate_space, complete }
    }
}

/// Every codeword, for exhaustive decoding at tiny scale.
#[derive(Clone, Debug)]
pub struct Codebook {
    params: CodeParams,
    entries: Vec<Codeword>,
}

impl Codebook {
    pub fn new(p: &CodeParams, cap: u128) -> Result<Self> {
        let entries = p.enumerate_codewords(cap)?.map(|(message, word)| Codeword { message, word }).collect();
        Ok(Self { params: p.clone(), entries })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    /// In message-lexicographic order.
    pub fn entries(&self) -> &[Codeword] {
        &self.entries
    }

    pub fn list(&self, y: &Word, radius: Rational) -> Result<DecodeResult> {
        let n = self.params.n();
        let mut list = Vec::new();
        for c in &self.entries {
            let d = block_distance(&c.word, y)?;
            if d <= radius {
                list.push(c.clone());
            }
        }
        debug_assert!(n > 0);
        Ok(DecodeResult::sorted(radius, list, self.params.k(), None, true))
    }

    /// Smallest block distance from `y` to the code.
    pub fn distance_to_code(&self, y: &Word) -> Result<Rational> {
        let mut best = Rational::from_integer(1);
        for c in &self.entries {
            best = best.min(block_distance(&c.word, y)?);
        }
        Ok(best)
    }
}

/// Exhaustive `{c : Δ(c, y) ≤ ρ}`.
pub fn brute_force_list(p: &CodeParams, y: &Word, radius: Rational, cap: u128) -> Result<DecodeResult> {
    Codebook::new(p, cap)?.list(y, radius)
}

/// Window length `s` and interpolation degree parameter `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DecoderParams {
    pub s: usize,
    pub d: usize,
}

impl DecoderParams {
    /// Smallest `D` with more unknowns than window constraints.
    pub fn for_window(p: &CodeParams, s: usize) -> Result<Self> {
        if s == 0 || s > p.m() {
            return Err(Error::InvalidParams(format!("window s = {s} must lie in 1..={}", p.m())));
        }
        let constraints = p.n() * (p.m() - s + 1);
        // unknowns (D + k) + s(D + 1) = (s + 1) D + k + s
        let fixed = p.k() + s;
        let d = if fixed > constraints { 0 } else { (constraints - fixed) / (s + 1) + 1 };
        Ok(Self { s, d })
    }

    /// The window with the largest guaranteed radius; ties go to smaller `s`.
    pub fn auto(p: &CodeParams) -> Result<Self> {
        let mut best: Option<(Rational, Self)> = None;
        for s in 1..=p.m() {
            let dp = Self::for_window(p, s)?;
            let Some(rho) = dp.guaranteed_radius(p) else { continue };
            if best.as_ref().is_none_or(|(r, _)| rho > *r) {
                best = Some((rho, dp));
            }
        }
        best.map(|(_, dp)| dp).ok_or(Error::InterpolationInfeasible)
    }

    pub fn unknowns(&self, p: &CodeParams) -> usize {
        (self.d + p.k()) + self.s * (self.d + 1)
    }

    pub fn constraints(&self, p: &CodeParams) -> usize {
        p.n() * (p.m() - self.s + 1)
    }

    /// Agreeing windows needed: more than `D + k − 1`.
    pub fn window_threshold(&self, p: &CodeParams) -> usize {
        self.d + p.k() - 1
    }

    /// Fewest agreeing blocks that force a codeword into the candidate space.
    pub fn min_agreeing_blocks(&self, p: &CodeParams) -> usize {
        self.window_threshold(p) / (p.m() - self.s + 1) + 1
    }

    /// Largest `ρ` for which every codeword within `ρ` lands in the candidate
    /// space; `None` when even exact codewords are not guaranteed.
    pub fn guaranteed_radius(&self, p: &CodeParams) -> Option<Rational> {
        let t = self.min_agreeing_blocks(p);
        (t <= p.n()).then(|| Rational::new((p.n() - t) as i64, p.n() as i64))
    }
}

/// Affine space of messages cut out by the interpolant. `None` when the
/// interpolant admits no message at all.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateSpace {
    pub params: DecoderParams,
    #[serde(skip)]
    pub space: Option<AffineSubspace>,
    pub dim: Option<usize>,
    pub min_agreeing_blocks: usize,
}

/// Interpolates and solves for the candidate messages.
pub fn candidate_space(p: &CodeParams, y: &Word, dp: DecoderParams) -> Result<CandidateSpace> {
    if y.m() != p.m() || y.n() != p.n() {
        return Err(Error::ShapeError(format!("word (m={}, n={}) for code (m={}, n={})", y.m(), y.n(), p.m(), p.n())));
    }
    let DecoderParams { s, d } = dp;
    if s == 0 || s > p.m() {
        return Err(Error::InvalidParams(format!("window s = {s} must lie in 1..={}", p.m())));
    }
    let field = p.field();
    let k = p.k();
    let cols = dp.unknowns(p);
    let mut rows = Vec::with_capacity(dp.constraints(p));
    for i in 0..p.n() {
        let block = y.block(i);
        for j0 in 0..=p.m() - s {
            let x = p.point(i, j0);
            let powers: Vec<FieldElement> =
                std::iter::successors(Some(field.one()), |&acc| Some(acc * x)).take(d + k).collect();
            let mut row = Vec::with_capacity(cols);
            row.extend_from_slice(&powers);
            for j in 0..s {
                let yv = block[j0 + j];
                row.extend(powers[..=d].iter().map(|&xe| xe * yv));
            }
            rows.push(row);
        }
    }
    let kernel = null_space(field, &rows, cols)?;
    let q = kernel.basis().first().ok_or(Error::InterpolationInfeasible)?;
    let a0 = &q[..d + k];
    let a = |j: usize, e: usize| q[d + k + j * (d + 1) + e];

    // coefficient of X^e in A_0 + Σ_j A_j(X) f(γ^j X), j = 0..s
    let gamma = p.gamma();
    let gpow: Vec<FieldElement> = (0..s as u64).map(|j| gamma.pow(j)).collect();
    let mut system = vec![vec![field.zero(); k]; d + k];
    for (j, &g) in gpow.iter().enumerate() {
        let mut gl = field.one();
        for l in 0..k {
            for e in l..=l + d {
                system[e][l] += a(j, e - l) * gl;
            }
            gl *= g;
        }
    }
    let rhs: Vec<FieldElement> = a0.iter().map(|&c| -c).collect();
    let space = solve(field, &system, &rhs, k)?;
    Ok(CandidateSpace { params: dp, dim: space.as_ref().map(|s| s.dim()), space, min_agreeing_blocks: dp.min_agreeing_blocks(p) })
}

/// Members of the candidate space within `radius` of `y`.
pub fn prune(p: &CodeParams, candidates: &CandidateSpace, y: &Word, radius: Rational, cap: u128) -> Result<DecodeResult> {
    let mut list = Vec::new();
    if let Some(space) = &candidates.space {
        for coeffs in space.elements(cap)? {
            let c = Codeword::encode(p, Poly::from_coeffs(p.field(), coeffs))?;
            if block_distance(&c.word, y)? <= radius {
                list.push(c);
            }
        }
    }
    let complete = candidates.params.guaranteed_radius(p).is_some_and(|g| radius <= g);
    Ok(DecodeResult::sorted(radius, list, p.k(), Some(candidates.clone()), complete))
}

/// Either decoding path behind one interface.
#[derive(Clone, Debug)]
pub enum ListDecoder {
    Oracle(Codebook),
    Algebraic { params: CodeParams, decoder: DecoderParams, cap: u128 },
}

impl ListDecoder {
    pub fn oracle(p: &CodeParams, cap: u128) -> Result<Self> {
        Ok(Self::Oracle(Codebook::new(p, cap)?))
    }

    pub fn algebraic(p: &CodeParams, cap: u128) -> Result<Self> {
        Ok(Self::Algebraic { params: p.clone(), decoder: DecoderParams::auto(p)?, cap })
    }

    pub fn params(&self) -> &CodeParams {
        match self {
            Self::Oracle(book) => book.params(),
            Self::Algebraic { params, .. } => params,
        }
    }

    /// Radius up to which [`decode`](Self::decode) returns complete lists.
    pub fn completeness_radius(&self) -> Rational {
        match self {
            Self::Oracle(_) => Rational::from_integer(1),
            Self::Algebraic { params, decoder, .. } => decoder.guaranteed_radius(params).unwrap_or_default(),
        }
    }

    pub fn decode(&self, y: &Word, radius: Rational) -> Result<DecodeResult> {
        match self {
            Self::Oracle(book) => book.list(y, radius),
            Self::Algebraic { params, decoder, cap } => {
                let cands = candidate_space(params, y, *decoder)?;
                prune(params, &cands, y, radius, *cap)
            }
        }
    }

    /// Like [`decode`](Self::decode), also admitting any `hints` within `radius`.
    pub fn decode_with_hints(&self, y: &Word, radius: Rational, hints: &[Codeword]) -> Result<DecodeResult> {
        let mut res = self.decode(y, radius)?;
        let before = res.list.len();
        for h in hints {
            if block_distance(&h.word, y)? <= radius && !res.list.contains(h) {
                res.list.push(h.clone());
            }
        }
        if res.list.len() != before {
            let DecodeResult { radius, list, candidate_space, complete } = res;
            res = DecodeResult::sorted(radius, list, self.params().k(), candidate_space, complete);
        }
        Ok(res)
    }
}
