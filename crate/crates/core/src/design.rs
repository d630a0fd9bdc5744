//! Subspace-design checks for folded Reed-Solomon codes.
//!
//! `H_a` is the kernel of the folded evaluation map
//! `E_a : f ↦ (f(a), f(γa), …, f(γ^{m-1}a))` on the message space F_q^k.
//! Intersections `U ∩ H_a` are computed as `d − rank(E_a|_U)`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::frs::CodeParams;
use crate::linalg::{null_space, rank, LinearSubspace};
use crate::poly::{poly_matrix_det, Poly};
use crate::rational::{self, Rational};

/// Largest `q` for which sums range over all of F_q^×.
pub const FULL_SUM_CAP: u64 = 1 << 16;

/// Which basepoints a design sum ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignScope {
    /// Every `a ∈ F_q^×`.
    AllNonzero,
    /// Only the code's basepoints `α_1..α_n`.
    Basepoints,
}

impl DesignScope {
    /// All of F_q^× when `q ≤ FULL_SUM_CAP`, basepoints otherwise.
    pub fn auto(q: u64) -> Self {
        if q <= FULL_SUM_CAP {
            Self::AllNonzero
        } else {
            Self::Basepoints
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DesignReport {
    pub d: usize,
    pub scope: DesignScope,
    pub sum_dims: u64,
    /// The same sum restricted to the basepoints.
    pub basepoint_sum: u64,
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    pub wronskian_degree: Option<usize>,
    pub pass: bool,
}

/// Matrix of `E_a` in the coefficient basis: row `j` is `((γ^j a)^e)_e`.
fn evaluation_rows(p: &CodeParams, a: FieldElement) -> Vec<Vec<FieldElement>> {
    let gamma = p.gamma();
    (0..p.m() as u64)
        .map(|j| {
            let x = gamma.pow(j) * a;
            std::iter::successors(Some(p.field().one()), |&acc| Some(acc * x)).take(p.k()).collect()
        })
        .collect()
}

/// `H_a = Ker(E_a) ≤ F_q^k`.
pub fn kernel_at(p: &CodeParams, a: FieldElement) -> Result<LinearSubspace> {
    p.field().check(a)?;
    if a.is_zero() {
        return Err(Error::InvalidBasepoint);
    }
    null_space(p.field(), &evaluation_rows(p, a), p.k())
}

/// `dim(U ∩ H_a)` for `U` in message space.
pub fn intersection_dim(p: &CodeParams, u: &LinearSubspace, a: FieldElement) -> Result<usize> {
    if u.ambient_dim() != p.k() {
        return Err(Error::ShapeError(format!("subspace of F_q^{} for k = {}", u.ambient_dim(), p.k())));
    }
    let gamma = p.gamma();
    let polys: Vec<Poly> = u.basis().iter().map(|b| Poly::from_coeffs(p.field(), b.clone())).collect();
    let rows: Vec<Vec<FieldElement>> = (0..p.m() as u64)
        .map(|j| {
            let x = gamma.pow(j) * a;
            polys.iter().map(|f| f.evaluate(x)).collect()
        })
        .collect();
    Ok(u.dim() - rank(p.field(), &rows, u.dim())?)
}

/// `d(k−d)/(m−d+1)`.
pub fn design_bound(k: usize, m: usize, d: usize) -> Rational {
    Rational::new((d * (k - d)) as i64, (m - d + 1) as i64)
}

/// `Σ_a dim(U ∩ H_a)` compared against `d(k−d)/(m−d+1)`.
///
/// `pass` is judged on the sum over `scope`; the basepoint-only sum is always
/// reported as well.
pub fn design_sum(p: &CodeParams, u: &LinearSubspace, scope: DesignScope) -> Result<DesignReport> {
    let d = u.dim();
    if d == 0 || d > p.m() {
        return Err(Error::DesignPreconditionViolated { dim: d, m: p.m() });
    }
    let basepoint_sum = p
        .basepoints()
        .iter()
        .map(|&a| intersection_dim(p, u, a).map(|v| v as u64))
        .sum::<Result<u64>>()?;
    let sum_dims = match scope {
        DesignScope::Basepoints => basepoint_sum,
        DesignScope::AllNonzero => {
            if p.q() > FULL_SUM_CAP {
                return Err(Error::EnumerationTooLarge { size: p.q() as u128 - 1, cap: FULL_SUM_CAP as u128 });
            }
            p.field()
                .nonzero_elements()
                .map(|a| intersection_dim(p, u, a).map(|v| v as u64))
                .sum::<Result<u64>>()?
        }
    };
    let bound = design_bound(p.k(), p.m(), d);
    let wronskian_degree = folded_wronskian(p, u)?.degree();
    Ok(DesignReport {
        d,
        scope,
        sum_dims,
        basepoint_sum,
        bound,
        wronskian_degree,
        pass: Rational::from_integer(sum_dims as i64) <= bound,
    })
}

/// `W(X) = det(f_j(γ^{i-1} X))_{i,j ≤ d}` for the echelon basis of `U`.
pub fn folded_wronskian(p: &CodeParams, u: &LinearSubspace) -> Result<Poly> {
    let d = u.dim();
    if d > p.m() {
        return Err(Error::DesignPreconditionViolated { dim: d, m: p.m() });
    }
    let polys: Vec<Poly> = u.basis().iter().map(|b| Poly::from_coeffs(p.field(), b.clone())).collect();
    let gamma = p.gamma();
    let matrix: Vec<Vec<Poly>> =
        (0..d as u64).map(|i| polys.iter().map(|f| f.dilate(gamma.pow(i))).collect()).collect();
    if d == 0 {
        return Ok(Poly::constant(p.field().one()));
    }
    poly_matrix_det(p.field(), &matrix)
}

/// Number of basepoints whose whole folded block of `h` vanishes.
pub fn block_collision_count(p: &CodeParams, h: &Poly) -> Result<usize> {
    match h.degree() {
        None => Err(Error::ZeroPolynomial),
        Some(d) if d >= p.k() => Err(Error::DegreeOverflow { degree: d, bound: p.k() }),
        Some(_) => Ok((0..p.n()).filter(|&i| (0..p.m()).all(|j| h.evaluate(p.point(i, j)).is_zero())).count()),
    }
}

/// `⌊(k−1)/m⌋`.
pub fn block_collision_bound(p: &CodeParams) -> usize {
    (p.k() - 1) / p.m()
}

/// `(1/(n·d)) Σ_i dim(A_i)` for the code subspace `A = encode(U)`.
///
/// `dim(A_i) = dim(U ∩ H_{α_i})` because encoding is injective.
pub fn kernel_ratio(p: &CodeParams, u: &LinearSubspace) -> Result<Rational> {
    let d = u.dim();
    if d == 0 {
        return Ok(Rational::from_integer(0));
    }
    let total = p
        .basepoints()
        .iter()
        .map(|&a| intersection_dim(p, u, a))
        .sum::<Result<usize>>()?;
    Ok(Rational::new(total as i64, (p.n() * d) as i64))
}

/// Random message subspace of dimension exactly `d`.
pub fn random_subspace<R: Rng + ?Sized>(p: &CodeParams, d: usize, rng: &mut R) -> Result<LinearSubspace> {
    if d > p.k() {
        return Err(Error::InvalidParams(format!("cannot draw a {d}-dim subspace of F_q^{}", p.k())));
    }
    loop {
        let vectors: Vec<Vec<FieldElement>> =
            (0..d).map(|_| (0..p.k()).map(|_| p.field().random(rng)).collect()).collect();
        let u = LinearSubspace::span(p.field(), p.k(), &vectors)?;
        if u.dim() == d {
            return Ok(u);
        }
    }
}

/// Max over `trials` random subspaces (dims uniform in `1..=r`) of
/// [`kernel_ratio`]: an empirical lower bound on the best admissible `τ(r)`.
pub fn tau_estimate<R: Rng + ?Sized>(p: &CodeParams, r: usize, trials: usize, rng: &mut R) -> Result<Rational> {
    if r == 0 || trials == 0 {
        return Err(Error::InvalidParams("tau estimation needs r >= 1 and trials >= 1".into()));
    }
    let top = r.min(p.k());
    let mut best = Rational::from_integer(0);
    for _ in 0..trials {
        let d = rng.random_range(1..=top);
        let u = random_subspace(p, d, rng)?;
        best = best.max(kernel_ratio(p, &u)?);
    }
    Ok(best)
}

/// Exact `τ(1)`: the largest fraction of zero blocks of a nonzero codeword.
pub fn exact_tau_r1(p: &CodeParams, cap: u128) -> Result<Rational> {
    let best = p
        .enumerate_codewords(cap)?
        .filter(|(f, _)| !f.is_zero())
        .map(|(_, w)| w.zero_blocks())
        .max()
        .unwrap_or(0);
    Ok(Rational::new(best as i64, p.n() as i64))
}
