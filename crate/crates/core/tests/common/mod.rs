//! Instance generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use frs_gap::field::{FieldElement, PrimeField};
use frs_gap::frs::{CodeParams, Word};
use frs_gap::{FieldContext, Poly};
use rand::seq::index::sample;
use rand::Rng;

pub fn params(q: u64, gamma: u64, m: usize, n: usize, k: usize) -> CodeParams {
    CodeParams::with_default_basepoints(FieldContext::new(q, gamma).unwrap(), m, n, k).unwrap()
}

pub fn tiny() -> CodeParams {
    params(17, 3, 2, 4, 2)
}

/// Determinant by the Leibniz formula, for tiny matrices.
pub fn leibniz_det(field: PrimeField, m: &[Vec<FieldElement>]) -> FieldElement {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    let n = m.len();
    let mut acc = field.zero();
    for p in perms(n) {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let term = (0..n).fold(field.one(), |t, i| t * m[i][p[i]]);
        acc = if inversions % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Number of blocks in which the words differ, counted directly.
pub fn hamming_blocks(x: &Word, y: &Word) -> usize {
    (0..x.n()).filter(|&i| x.block(i) != y.block(i)).count()
}

fn random_nonzero_symbol<R: Rng + ?Sized>(field: PrimeField, m: usize, rng: &mut R) -> Vec<FieldElement> {
    loop {
        let v: Vec<FieldElement> = (0..m).map(|_| field.random(rng)).collect();
        if v.iter().any(|e| !e.is_zero()) {
            return v;
        }
    }
}

/// A degree-`ell` polynomially parameterised word `u(α) = Σ_j α^j u^{(j)}`
/// over a parametrised codeword `c(α)`, and `t` parameters on which `u` is
/// `δ`-close to `c` for the returned `δ`.
///
/// Every corrupted block carries an error `p_i(α)·v_i` with `p_i` of degree
/// at most `ell` whose roots lie in the chosen parameter set, so the errors
/// are as coherent on `A` as the degree allows.
pub struct InterpolationInstance {
    pub u: Vec<Word>,
    pub c: Vec<Word>,
    pub a: Vec<FieldElement>,
    pub delta_blocks: usize,
}

pub fn interpolation_instance<R: Rng + ?Sized>(p: &CodeParams, ell: usize, t: usize, rng: &mut R) -> InterpolationInstance {
    let field = p.field();
    let (m, n) = (p.m(), p.n());
    let c: Vec<Word> = (0..=ell).map(|_| p.encode(&p.random_message(rng)).unwrap()).collect();
    let mut u = c.clone();
    let a: Vec<FieldElement> =
        sample(rng, p.q() as usize, t).into_iter().map(|i| field.elem(i as u64)).collect();
    let corrupted = rng.random_range(0..=n);
    let blocks = sample(rng, n, corrupted).into_vec();
    let mut bad_count = vec![0usize; t];
    for &i in &blocks {
        let nroots = rng.random_range(0..=ell);
        let roots: Vec<usize> = sample(rng, t, nroots).into_vec();
        // p_i(α) = λ·Π (α − a_r), padded to degree ell with zero coefficients
        let lambda = field.random_nonzero(rng);
        let poly = roots.iter().fold(Poly::constant(lambda), |acc, &r| &acc * &Poly::linear(a[r]));
        let v = random_nonzero_symbol(field, m, rng);
        for (j, uj) in u.iter_mut().enumerate() {
            let coeff = poly.coeff(j);
            let block: Vec<FieldElement> = uj.block(i).iter().zip(&v).map(|(&x, &y)| x + coeff * y).collect();
            uj.set_block(i, &block);
        }
        for (idx, count) in bad_count.iter_mut().enumerate() {
            if !roots.contains(&idx) {
                *count += 1;
            }
        }
    }
    let delta_blocks = bad_count.into_iter().max().unwrap_or(0);
    InterpolationInstance { u, c, a, delta_blocks }
}
