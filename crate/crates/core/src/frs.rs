//! Folded Reed-Solomon codes FRS^m_{n,k} over F_q.
//!
//! A message is a polynomial `f` of degree `< k`; block `i` of its codeword is
//! `(f(α_i), f(γα_i), …, f(γ^{m-1}α_i))`. Words are stored flat in F_q^{mn},
//! block-major, which is the representation all subspace computations use.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement, PrimeField};
use crate::poly::Poly;
use crate::rational::Rational;

/// One alphabet symbol of Σ = F_q^m.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol(Vec<FieldElement>);

impl Symbol {
    pub fn new(entries: Vec<FieldElement>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|e| e.is_zero())
    }
}

/// A length-n sequence of symbols, stored flat.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    m: usize,
    entries: Vec<FieldElement>,
}

impl Word {
    pub fn new(m: usize, entries: Vec<FieldElement>) -> Result<Self> {
        if m == 0 || !entries.len().is_multiple_of(m) {
            return Err(Error::ShapeError(format!(
                "{} entries do not split into blocks of size {m}",
                entries.len()
            )));
        }
        Ok(Self { m, entries })
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Result<Self> {
        let m = symbols.first().map_or(0, |s| s.0.len());
        if m == 0 || symbols.iter().any(|s| s.0.len() != m) {
            return Err(Error::ShapeError("symbols must be nonempty and share one length".into()));
        }
        Ok(Self { m, entries: symbols.into_iter().flat_map(|s| s.0).collect() })
    }

    pub fn zeros(field: PrimeField, m: usize, n: usize) -> Self {
        Self { m, entries: vec![field.zero(); m * n] }
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, m: usize, n: usize, rng: &mut R) -> Self {
        Self { m, entries: (0..m * n).map(|_| field.random(rng)).collect() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.entries.len() / self.m
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<FieldElement> {
        self.entries
    }

    pub fn block(&self, i: usize) -> &[FieldElement] {
        &self.entries[i * self.m..(i + 1) * self.m]
    }

    pub fn blocks(&self) -> std::slice::Chunks<'_, FieldElement> {
        self.entries.chunks(self.m)
    }

    pub fn symbol(&self, i: usize) -> Symbol {
        Symbol(self.block(i).to_vec())
    }

    pub fn set_block(&mut self, i: usize, values: &[FieldElement]) {
        assert_eq!(values.len(), self.m);
        self.entries[i * self.m..(i + 1) * self.m].copy_from_slice(values);
    }

    pub fn values(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.value()).collect()
    }

    fn check_shape(&self, other: &Word) -> Result<()> {
        if self.m != other.m || self.entries.len() != other.entries.len() {
            return Err(Error::ShapeError(format!(
                "word shapes (m={}, n={}) and (m={}, n={}) differ",
                self.m,
                self.n(),
                other.m,
                other.n()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Word) -> Word {
        self.check_shape(other).expect("word shapes must match");
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a + b).collect();
        Word { m: self.m, entries }
    }

    pub fn sub(&self, other: &Word) -> Word {
        self.check_shape(other).expect("word shapes must match");
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a - b).collect();
        Word { m: self.m, entries }
    }

    pub fn scale(&self, c: FieldElement) -> Word {
        Word { m: self.m, entries: self.entries.iter().map(|&a| a * c).collect() }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, other: &Word, c: FieldElement) -> Word {
        self.check_shape(other).expect("word shapes must match");
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a + c * b).collect();
        Word { m: self.m, entries }
    }

    /// Number of blocks where the words differ.
    pub fn differing_blocks(&self, other: &Word) -> usize {
        self.blocks().zip(other.blocks()).filter(|(a, b)| a != b).count()
    }

    /// Indices of blocks where the words agree.
    pub fn agreement_set(&self, other: &Word) -> Vec<usize> {
        self.blocks().zip(other.blocks()).enumerate().filter(|(_, (a, b))| a == b).map(|(i, _)| i).collect()
    }

    pub fn agrees_on(&self, other: &Word, blocks: &[usize]) -> bool {
        blocks.iter().all(|&i| self.block(i) == other.block(i))
    }

    /// Number of all-zero blocks.
    pub fn zero_blocks(&self) -> usize {
        self.blocks().filter(|b| b.iter().all(|e| e.is_zero())).count()
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.entries.iter().map(|e| e.value()))
    }
}

/// Normalized block Hamming distance `|{i : x_i ≠ y_i}| / n`.
pub fn block_distance(x: &Word, y: &Word) -> Result<Rational> {
    x.check_shape(y)?;
    let n = x.n();
    if n == 0 {
        return Ok(Rational::from_integer(0));
    }
    Ok(Rational::new(x.differing_blocks(y) as i64, n as i64))
}

/// Parameters `(q, γ, m, n, k, α_1..α_n)` of FRS^m_{n,k}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeParams {
    ctx: FieldContext,
    m: usize,
    n: usize,
    k: usize,
    basepoints: Vec<FieldElement>,
    // points[i*m + j] = γ^j α_i
    points: Vec<FieldElement>,
}

impl CodeParams {
    pub fn new(ctx: FieldContext, m: usize, n: usize, k: usize, basepoints: Vec<FieldElement>) -> Result<Self> {
        let gamma = ctx.gamma();
        let points = basepoints
            .iter()
            .flat_map(|&a| (0..m as u64).map(move |j| gamma.pow(j) * a))
            .collect();
        let params = Self { ctx, m, n, k, basepoints, points };
        params.validate()?;
        Ok(params)
    }

    /// The standard layout `α_i = γ^{m(i-1)}`: consecutive disjoint γ-orbits.
    pub fn with_default_basepoints(ctx: FieldContext, m: usize, n: usize, k: usize) -> Result<Self> {
        let gamma = ctx.gamma();
        let basepoints = (0..n as u64).map(|i| gamma.pow(m as u64 * i)).collect();
        Self::new(ctx, m, n, k, basepoints)
    }

    /// Checks every invariant of the parameter tuple.
    pub fn validate(&self) -> Result<()> {
        let field = self.ctx.field();
        if self.m < 2 {
            return Err(Error::InvalidParams(format!("folding parameter m = {} must be >= 2", self.m)));
        }
        if self.n == 0 || self.k == 0 {
            return Err(Error::InvalidParams("n and k must be positive".into()));
        }
        let mn = self.m as u64 * self.n as u64;
        if self.k as u64 > mn {
            return Err(Error::DegreeOverflow { degree: self.k, bound: mn as usize });
        }
        if self.ctx.q() <= mn {
            return Err(Error::FieldTooSmall { q: self.ctx.q(), mn });
        }
        if self.ctx.gamma_order() < mn {
            return Err(Error::OrderTooSmall { order: self.ctx.gamma_order(), required: mn });
        }
        if self.basepoints.len() != self.n {
            return Err(Error::ShapeError(format!("{} basepoints for n = {}", self.basepoints.len(), self.n)));
        }
        for &a in &self.basepoints {
            field.check(a)?;
            if a.is_zero() {
                return Err(Error::InvalidBasepoint);
            }
        }
        let mut seen: Vec<(FieldElement, usize)> = self.points.iter().copied().zip(0..).collect();
        seen.sort();
        for w in seen.windows(2) {
            if w[0].0 == w[1].0 {
                let (a, b) = (w[0].1.min(w[1].1), w[0].1.max(w[1].1));
                return Err(Error::PointCollision { i1: a / self.m, j1: a % self.m, i2: b / self.m, j2: b % self.m });
            }
        }
        Ok(())
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn field(&self) -> PrimeField {
        self.ctx.field()
    }

    pub fn q(&self) -> u64 {
        self.ctx.q()
    }

    pub fn gamma(&self) -> FieldElement {
        self.ctx.gamma()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Scalar length `m·n` of a flattened word.
    pub fn length(&self) -> usize {
        self.m * self.n
    }

    pub fn basepoints(&self) -> &[FieldElement] {
        &self.basepoints
    }

    /// `γ^j α_i`.
    pub fn point(&self, block: usize, j: usize) -> FieldElement {
        self.points[block * self.m + j]
    }

    /// All `mn` evaluation points in flattened word order.
    pub fn points(&self) -> &[FieldElement] {
        &self.points
    }

    /// Rate `R = k / (mn)`.
    pub fn rate(&self) -> Rational {
        Rational::new(self.k as i64, self.length() as i64)
    }

    /// `q^k`, saturating.
    pub fn message_count(&self) -> u128 {
        (self.q() as u128).checked_pow(self.k as u32).unwrap_or(u128::MAX)
    }

    pub fn encode(&self, f: &Poly) -> Result<Word> {
        self.field().check(f.coeff(0))?;
        if f.field() != self.field() {
            return Err(Error::ContextMismatch { left: self.q(), right: f.field().modulus() });
        }
        if let Some(d) = f.degree().filter(|&d| d >= self.k) {
            return Err(Error::DegreeOverflow { degree: d, bound: self.k });
        }
        Ok(Word { m: self.m, entries: self.points.iter().map(|&x| f.evaluate(x)).collect() })
    }

    pub fn encode_coeffs(&self, coeffs: &[FieldElement]) -> Result<Word> {
        self.encode(&Poly::from_coeffs(self.field(), coeffs.to_vec()))
    }

    /// Recovers the message of a codeword, or `None` if `w` is not in the code.
    pub fn message_of(&self, w: &Word) -> Result<Option<Poly>> {
        if w.m != self.m || w.n() != self.n {
            return Err(Error::ShapeError(format!("word (m={}, n={}) for code (m={}, n={})", w.m, w.n(), self.m, self.n)));
        }
        let pts: Vec<_> = self.points.iter().copied().zip(w.entries.iter().copied()).take(self.k).collect();
        let f = Poly::interpolate(self.field(), &pts)?;
        Ok((self.encode(&f)? == *w).then_some(f))
    }

    pub fn is_codeword(&self, w: &Word) -> bool {
        matches!(self.message_of(w), Ok(Some(_)))
    }

    pub fn zero_word(&self) -> Word {
        Word::zeros(self.field(), self.m, self.n)
    }

    pub fn random_message<R: Rng + ?Sized>(&self, rng: &mut R) -> Poly {
        let field = self.field();
        Poly::from_coeffs(field, (0..self.k).map(|_| field.random(rng)).collect())
    }

    pub fn random_word<R: Rng + ?Sized>(&self, rng: &mut R) -> Word {
        Word::random(self.field(), self.m, self.n, rng)
    }

    /// All `q^k` messages with their codewords, messages in lexicographic
    /// order of their length-k coefficient vectors.
    pub fn enumerate_codewords(&self, cap: u128) -> Result<Codewords<'_>> {
        let size = self.message_count();
        if size > cap {
            return Err(Error::EnumerationTooLarge { size, cap });
        }
        Ok(Codewords { params: self, next: Some(vec![0; self.k]) })
    }
}

/// Iterator returned by [`CodeParams::enumerate_codewords`].
pub struct Codewords<'a> {
    params: &'a CodeParams,
    next: Option<Vec<u64>>,
}

impl Iterator for Codewords<'_> {
    type Item = (Poly, Word);

    fn next(&mut self) -> Option<Self::Item> {
        let digits = self.next.take()?;
        let field = self.params.field();
        let f = Poly::from_values(field, &digits);
        let word = self.params.encode(&f).expect("enumerated messages have degree < k");
        // odometer, last coefficient fastest so the order is lexicographic
        let mut succ = digits;
        let mut pos = succ.len();
        let q = self.params.q();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < q {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some((f, word))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p0() -> CodeParams {
        CodeParams::with_default_basepoints(FieldContext::new(17, 3).unwrap(), 2, 4, 2).unwrap()
    }

    #[test]
    fn default_layout_and_validation() {
        let p = p0();
        let bp: Vec<u64> = p.basepoints().iter().map(|a| a.value()).collect();
        assert_eq!(bp, vec![1, 9, 13, 15]);
        // the 8 evaluation points are 3^0..3^7 mod 17, all distinct
        let mut pts: Vec<u64> = p.points().iter().map(|a| a.value()).collect();
        assert_eq!(pts, vec![1, 3, 9, 10, 13, 5, 15, 11]);
        pts.sort();
        pts.dedup();
        assert_eq!(pts.len(), 8);
        assert_eq!(p.rate(), ratio(1, 4));
    }

    #[test]
    fn validation_errors() {
        let f = PrimeField::new(17).unwrap();
        let bp: Vec<_> = [1, 9, 13, 15].iter().map(|&v| f.elem(v)).collect();
        let ctx16 = FieldContext::new(17, 16).unwrap();
        assert_eq!(CodeParams::new(ctx16, 2, 4, 2, bp.clone()), Err(Error::OrderTooSmall { order: 2, required: 8 }));
        let ctx = FieldContext::new(17, 3).unwrap();
        assert_eq!(CodeParams::new(ctx, 2, 4, 9, bp.clone()), Err(Error::DegreeOverflow { degree: 9, bound: 8 }));
        assert_eq!(
            CodeParams::with_default_basepoints(ctx, 3, 6, 2),
            Err(Error::FieldTooSmall { q: 17, mn: 18 })
        );
        let colliding: Vec<_> = [1, 3, 13, 15].iter().map(|&v| f.elem(v)).collect();
        assert!(matches!(CodeParams::new(ctx, 2, 4, 2, colliding), Err(Error::PointCollision { .. })));
        let with_zero: Vec<_> = [0, 9, 13, 15].iter().map(|&v| f.elem(v)).collect();
        assert_eq!(CodeParams::new(ctx, 2, 4, 2, with_zero), Err(Error::InvalidBasepoint));
        assert!(matches!(CodeParams::new(ctx, 1, 4, 2, bp), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn encode_examples() {
        let p = p0();
        let f = p.field();
        let one = p.encode(&Poly::constant(f.one())).unwrap();
        assert!(one.blocks().all(|b| b.iter().all(|&e| e == f.one())));
        let x = p.encode(&Poly::x(f)).unwrap();
        assert_eq!(x.values(), vec![1, 3, 9, 10, 13, 5, 15, 11]);
        assert_eq!(p.encode(&Poly::zero(f)).unwrap(), p.zero_word());
        let too_big = Poly::from_values(f, &[0, 0, 1]);
        assert_eq!(p.encode(&too_big), Err(Error::DegreeOverflow { degree: 2, bound: 2 }));
    }

    #[test]
    fn distance_examples() {
        let p = p0();
        let f = p.field();
        let one = p.encode(&Poly::constant(f.one())).unwrap();
        let x = p.encode(&Poly::x(f)).unwrap();
        assert_eq!(block_distance(&x, &x).unwrap(), ratio(0, 1));
        assert_eq!(block_distance(&one, &x).unwrap(), ratio(1, 1));
        let mut y = x.clone();
        y.set_block(2, &[f.elem(0), f.elem(0)]);
        assert_eq!(block_distance(&x, &y).unwrap(), ratio(1, 4));
        let other = Word::zeros(f, 4, 2);
        assert!(matches!(block_distance(&x, &other), Err(Error::ShapeError(_))));
    }

    #[test]
    fn enumeration_counts_and_distance_bound() {
        let p = p0();
        let all: Vec<_> = p.enumerate_codewords(1_000_000).unwrap().collect();
        assert_eq!(all.len(), 289);
        let min_weight = all.iter().filter(|(f, _)| !f.is_zero()).map(|(_, w)| p.n() - w.zero_blocks()).min().unwrap();
        assert!(min_weight >= 3);
        let k1 = CodeParams::with_default_basepoints(*p.ctx(), 2, 4, 1).unwrap();
        let constants: Vec<_> = k1.enumerate_codewords(100).unwrap().collect();
        assert_eq!(constants.len(), 17);
        assert!(constants.iter().all(|(f, _)| f.degree().unwrap_or(0) == 0));
        assert_eq!(p.enumerate_codewords(100).err(), Some(Error::EnumerationTooLarge { size: 289, cap: 100 }));
    }

    #[test]
    fn membership_roundtrip() {
        let p = p0();
        let f = p.field();
        let msg = Poly::from_values(f, &[4, 7]);
        let w = p.encode(&msg).unwrap();
        assert_eq!(p.message_of(&w).unwrap(), Some(msg));
        let mut bad = w.clone();
        bad.set_block(0, &[f.elem(0), f.elem(1)]);
        assert_eq!(p.message_of(&bad).unwrap(), None);
    }
}
