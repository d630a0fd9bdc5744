//! The `Pin_ε(H)` distribution: weighted coordinate sampling that pins down a
//! low-dimensional code subspace.
//!
//! Starting from `K = H`, each step draws a block `i` with weight
//! `dim(K_i) + ε` (zero when `K_i = K`) and descends to `K_i`, stopping at
//! `K = {0}`. The chosen blocks `S` make restriction to `S` injective on `H`.

use std::collections::HashMap;

use num_rational::Ratio;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frs::{block_distance, Word};
use crate::linalg::LinearSubspace;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PinStep {
    pub index: usize,
    pub dim_before: usize,
    pub dim_after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PinSet {
    pub coords: Vec<usize>,
    pub trace: Vec<PinStep>,
}

fn check_eps(eps: Rational) -> Result<()> {
    if eps <= Rational::from_integer(0) || eps >= Rational::from_integer(1) {
        return Err(Error::InvalidParams(format!("pinning needs 0 < eps < 1, got {}", rational::format_rational(&eps))));
    }
    Ok(())
}

fn block_count(h: &LinearSubspace, m: usize) -> Result<usize> {
    if m == 0 || !h.ambient_dim().is_multiple_of(m) {
        return Err(Error::ShapeError(format!("ambient dimension {} is not a multiple of m = {m}", h.ambient_dim())));
    }
    Ok(h.ambient_dim() / m)
}

/// Coordinate kernels of `K` with integer weights `den·dim(K_i) + num`
/// (zero when `K_i = K`), where `ε = num/den`.
fn weighted_kernels(k: &LinearSubspace, m: usize, eps: Rational) -> Result<Vec<(u64, LinearSubspace)>> {
    let n = block_count(k, m)?;
    let (num, den) = (*eps.numer() as u64, *eps.denom() as u64);
    (0..n)
        .map(|i| {
            let ki = k.coordinate_kernel(i, m)?;
            let w = if ki.dim() == k.dim() { 0 } else { den * ki.dim() as u64 + num };
            Ok((w, ki))
        })
        .collect()
}

/// Repeated draws from `Pin_ε(H)`, caching the weighted kernels of every
/// state visited so far.
#[derive(Clone, Debug)]
pub struct PinSampler {
    h: LinearSubspace,
    m: usize,
    eps: Rational,
    cache: HashMap<LinearSubspace, Vec<(u64, LinearSubspace)>>,
}

impl PinSampler {
    pub fn new(h: &LinearSubspace, m: usize, eps: Rational) -> Result<Self> {
        check_eps(eps)?;
        block_count(h, m)?;
        Ok(Self { h: h.clone(), m, eps, cache: HashMap::new() })
    }

    pub fn subspace(&self) -> &LinearSubspace {
        &self.h
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<PinSet> {
        let mut k = self.h.clone();
        let mut set = PinSet { coords: Vec::new(), trace: Vec::new() };
        while k.dim() > 0 {
            if !self.cache.contains_key(&k) {
                let kernels = weighted_kernels(&k, self.m, self.eps)?;
                self.cache.insert(k.clone(), kernels);
            }
            let kernels = &self.cache[&k];
            let total: u64 = kernels.iter().map(|(w, _)| w).sum();
            if total == 0 {
                return Err(Error::DegenerateSubspace);
            }
            let mut draw = rng.random_range(0..total);
            let (index, next) = kernels
                .iter()
                .enumerate()
                .find_map(|(i, (w, ki))| {
                    if draw < *w {
                        Some((i, ki.clone()))
                    } else {
                        draw -= w;
                        None
                    }
                })
                .expect("draw lies below the total weight");
            set.trace.push(PinStep { index, dim_before: k.dim(), dim_after: next.dim() });
            set.coords.push(index);
            k = next;
        }
        Ok(set)
    }
}

/// One draw from `Pin_ε(H)` for `H ≤ F_q^{mn}`.
pub fn sample_pin<R: Rng + ?Sized>(h: &LinearSubspace, m: usize, eps: Rational, rng: &mut R) -> Result<PinSet> {
    PinSampler::new(h, m, eps)?.sample(rng)
}

/// Checks the two structural guarantees of a pin set.
pub fn verify_pin(h: &LinearSubspace, m: usize, pin: &PinSet) -> Result<bool> {
    Ok(pin.coords.len() <= h.dim() && h.restriction_kernel(&pin.coords, m)?.is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PinEstimate {
    pub successes: u64,
    pub trials: u64,
    #[serde(with = "rational::serde_str")]
    pub frequency: Rational,
    /// `ε/(d+ε)`.
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
}

impl PinEstimate {
    /// `bound − 3σ` with `σ² = bound(1−bound)/trials`.
    pub fn lower_tolerance(&self) -> f64 {
        let b = rational::to_f64(&self.bound);
        b - 3.0 * (b * (1.0 - b) / self.trials as f64).sqrt()
    }

    pub fn passes(&self) -> bool {
        rational::to_f64(&self.frequency) >= self.lower_tolerance()
    }
}

fn check_instance(h: &LinearSubspace, m: usize, c: &Word, y: &Word, max_distance: Rational) -> Result<()> {
    if !h.contains(c.entries())? {
        return Err(Error::PreconditionFailed("c is not a member of H".into()));
    }
    let dist = block_distance(c, y)?;
    if dist > max_distance {
        return Err(Error::PreconditionFailed(format!(
            "distance {} exceeds {}",
            rational::format_rational(&dist),
            rational::format_rational(&max_distance)
        )));
    }
    if c.m() != m {
        return Err(Error::ShapeError(format!("word blocks of size {} for m = {m}", c.m())));
    }
    Ok(())
}

/// Empirical `Pr[c|_S = y|_S]` over `trials` draws of `S`.
///
/// `max_distance` is the caller's `1 − τ − ε`; instances beyond it are rejected.
pub fn pin_success_estimate<R: Rng + ?Sized>(
    h: &LinearSubspace,
    m: usize,
    c: &Word,
    y: &Word,
    eps: Rational,
    max_distance: Rational,
    trials: u64,
    rng: &mut R,
) -> Result<PinEstimate> {
    check_eps(eps)?;
    check_instance(h, m, c, y, max_distance)?;
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be positive".into()));
    }
    let mut sampler = PinSampler::new(h, m, eps)?;
    let mut verified = std::collections::HashSet::new();
    let mut successes = 0;
    for _ in 0..trials {
        let pin = sampler.sample(rng)?;
        if !verified.contains(&pin.coords) {
            if !verify_pin(h, m, &pin)? {
                return Err(Error::InvariantViolated(format!("pin set {:?} does not pin H", pin.coords)));
            }
            verified.insert(pin.coords.clone());
        }
        if pin.coords.iter().all(|&i| c.block(i) == y.block(i)) {
            successes += 1;
        }
    }
    let d = h.dim() as i64;
    Ok(PinEstimate {
        successes,
        trials,
        frequency: Rational::new(successes as i64, trials as i64),
        bound: eps / (Rational::from_integer(d) + eps),
    })
}

/// Exact `Pr[c|_S = y|_S]`, by recursion over the sampling tree.
pub fn exact_success_probability(h: &LinearSubspace, m: usize, c: &Word, y: &Word, eps: Rational) -> Result<Rational> {
    check_eps(eps)?;
    let agree: Vec<bool> = c.blocks().zip(y.blocks()).map(|(a, b)| a == b).collect();
    let mut memo = HashMap::new();
    let p = success_from(h, m, eps, &agree, &mut memo)?;
    let num = i64::try_from(*p.numer()).map_err(|_| Error::InvariantViolated("probability numerator overflow".into()))?;
    let den = i64::try_from(*p.denom()).map_err(|_| Error::InvariantViolated("probability denominator overflow".into()))?;
    Ok(Rational::new(num, den))
}

// Probability of success from state K, given success so far. The state is
// determined by K itself.
fn success_from(
    k: &LinearSubspace,
    m: usize,
    eps: Rational,
    agree: &[bool],
    memo: &mut HashMap<LinearSubspace, Ratio<i128>>,
) -> Result<Ratio<i128>> {
    if k.dim() == 0 {
        return Ok(Ratio::from_integer(1));
    }
    if let Some(p) = memo.get(k) {
        return Ok(*p);
    }
    let kernels = weighted_kernels(k, m, eps)?;
    let total: u64 = kernels.iter().map(|(w, _)| w).sum();
    if total == 0 {
        return Err(Error::DegenerateSubspace);
    }
    let mut acc = Ratio::from_integer(0i128);
    for (i, (w, ki)) in kernels.iter().enumerate() {
        if *w > 0 && agree[i] {
            acc += Ratio::new(*w as i128, total as i128) * success_from(ki, m, eps, agree, memo)?;
        }
    }
    memo.insert(k.clone(), acc);
    Ok(acc)
}

/// Smallest `τ` for which the averaging inequality
/// `(1/n) Σ_i dim(K_i) ≤ dim(K)·τ` holds at every state `K ≠ {0}` the sampler
/// can visit from `H`. These are exactly the subspaces the success bound
/// inspects, so `1 − τ − ε` is a valid distance threshold for this `H`.
pub fn required_tau(h: &LinearSubspace, m: usize) -> Result<Rational> {
    let n = block_count(h, m)?;
    let mut best = Rational::from_integer(0);
    let mut stack = vec![h.clone()];
    let mut seen = std::collections::HashSet::new();
    while let Some(k) = stack.pop() {
        if k.dim() == 0 || !seen.insert(k.clone()) {
            continue;
        }
        let mut total = 0;
        for i in 0..n {
            let ki = k.coordinate_kernel(i, m)?;
            total += ki.dim();
            if ki.dim() < k.dim() {
                stack.push(ki);
            }
        }
        best = best.max(Rational::new(total as i64, (n * k.dim()) as i64));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;
    use crate::frs::CodeParams;
    use crate::poly::Poly;
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p0() -> CodeParams {
        CodeParams::with_default_basepoints(FieldContext::new(17, 3).unwrap(), 2, 4, 2).unwrap()
    }

    fn code_span(p: &CodeParams, words: &[Word]) -> LinearSubspace {
        let rows: Vec<_> = words.iter().map(|w| w.entries().to_vec()).collect();
        LinearSubspace::span(p.field(), p.length(), &rows).unwrap()
    }

    #[test]
    fn one_dimensional_is_uniform() {
        let p = p0();
        let c = p.encode(&Poly::from_values(p.field(), &[1, 1])).unwrap();
        assert_eq!(c.zero_blocks(), 0);
        let h = code_span(&p, std::slice::from_ref(&c));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut counts = [0u32; 4];
        for _ in 0..4000 {
            let pin = sample_pin(&h, 2, ratio(1, 2), &mut rng).unwrap();
            assert_eq!(pin.coords.len(), 1);
            counts[pin.coords[0]] += 1;
        }
        assert!(counts.iter().all(|&n| (850..1150).contains(&n)), "{counts:?}");

        // agreement on g of n blocks gives g/n exactly
        let mut y = c.clone();
        y.set_block(0, &[p.field().zero(), p.field().zero()]);
        assert_eq!(exact_success_probability(&h, 2, &c, &y, ratio(1, 2)).unwrap(), ratio(3, 4));
    }

    #[test]
    fn zero_subspace_pins_nothing() {
        let p = p0();
        let h = LinearSubspace::zero(p.field(), p.length());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_pin(&h, 2, ratio(1, 4), &mut rng).unwrap().coords.is_empty());
        assert!(sample_pin(&h, 2, ratio(1, 1), &mut rng).is_err());
    }

    #[test]
    fn two_dimensional_pins_are_injective() {
        let p = p0();
        let f = p.field();
        let a = p.encode(&Poly::linear(f.one())).unwrap();
        let b = p.encode(&Poly::x(f)).unwrap();
        let h = code_span(&p, &[a, b]);
        assert_eq!(h.dim(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let pin = sample_pin(&h, 2, ratio(1, 4), &mut rng).unwrap();
            assert!(verify_pin(&h, 2, &pin).unwrap());
            for s in &pin.trace {
                assert!(s.dim_after < s.dim_before);
            }
        }
    }

    #[test]
    fn estimate_matches_exact_probability() {
        let p = CodeParams::with_default_basepoints(FieldContext::new(17, 3).unwrap(), 2, 8, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let words: Vec<Word> = (0..2).map(|_| p.encode(&p.random_message(&mut rng)).unwrap()).collect();
        let h = code_span(&p, &words);
        let c = words[0].add(&words[1]);
        let mut y = c.clone();
        y.set_block(5, &[p.field().elem(1), p.field().elem(2)]);
        let eps = ratio(1, 2);
        let tau = required_tau(&h, 2).unwrap();
        let threshold = Rational::from_integer(1) - tau - eps;
        let exact = exact_success_probability(&h, 2, &c, &y, eps).unwrap();
        if block_distance(&c, &y).unwrap() <= threshold {
            assert!(exact >= eps / (Rational::from_integer(2) + eps));
        }
        let est = pin_success_estimate(&h, 2, &c, &y, eps, Rational::from_integer(1), 4000, &mut rng).unwrap();
        let diff = (rational::to_f64(&est.frequency) - rational::to_f64(&exact)).abs();
        assert!(diff < 0.04, "estimate {} vs exact {}", rational::to_f64(&est.frequency), rational::to_f64(&exact));
        assert!(pin_success_estimate(&h, 2, &c, &y, eps, ratio(0, 1), 10, &mut rng).is_err());
    }

    #[test]
    fn identical_word_always_succeeds() {
        let p = p0();
        let c = p.encode(&Poly::from_values(p.field(), &[2, 5])).unwrap();
        let h = code_span(&p, std::slice::from_ref(&c));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let est = pin_success_estimate(&h, 2, &c, &c, ratio(1, 4), ratio(0, 1), 200, &mut rng).unwrap();
        assert_eq!(est.frequency, ratio(1, 1));
        assert!(est.passes());
    }
}
