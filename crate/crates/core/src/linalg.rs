//! Exact linear algebra over F_q.
//!
//! Subspaces of F_q^D are stored by their reduced row-echelon basis, which is
//! canonical: two subspaces are equal iff their bases are identical. Block
//! operations treat a vector of length `m·n` as `n` consecutive blocks of `m`.

use rand::Rng;

use crate::arith::{mul_mod, Reducer};
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

/// In-place reduced row-echelon form on raw residues. Returns pivot columns.
/// Zero rows are dropped.
fn rref_raw(q: u64, rows: &mut Vec<Vec<u64>>, cols: usize) -> Vec<usize> {
    let red = Reducer::new(q);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = crate::arith::pow_mod(rows[r][c], q - 2, q);
        if inv != 1 {
            for v in rows[r][c..].iter_mut() {
                *v = mul_mod(*v, inv, q);
            }
        }
        let pivot_row = std::mem::take(&mut rows[r]);
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = q - row[c];
            for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = red.mul_add(*x, f, y);
            }
        }
        rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

fn to_raw(field: PrimeField, rows: &[Vec<FieldElement>], cols: usize) -> Result<Vec<Vec<u64>>> {
    rows.iter()
        .map(|row| {
            if row.len() != cols {
                return Err(Error::ShapeError(format!("row of length {} in a {cols}-column matrix", row.len())));
            }
            row.iter().map(|&e| field.check(e).map(|e| e.value())).collect()
        })
        .collect()
}

fn from_raw(field: PrimeField, rows: Vec<Vec<u64>>) -> Vec<Vec<FieldElement>> {
    rows.into_iter().map(|r| r.into_iter().map(|v| field.elem(v)).collect()).collect()
}

/// Reduced row-echelon form of a `rows × cols` matrix (zero rows removed)
/// together with its pivot columns.
pub fn rref(field: PrimeField, rows: &[Vec<FieldElement>], cols: usize) -> Result<(Vec<Vec<FieldElement>>, Vec<usize>)> {
    let mut raw = to_raw(field, rows, cols)?;
    let pivots = rref_raw(field.modulus(), &mut raw, cols);
    Ok((from_raw(field, raw), pivots))
}

pub fn rank(field: PrimeField, rows: &[Vec<FieldElement>], cols: usize) -> Result<usize> {
    Ok(rref(field, rows, cols)?.1.len())
}

// Kernel basis read off an RREF: one vector per free column, in column order.
fn kernel_from_rref(q: u64, rows: &[Vec<u64>], pivots: &[usize], cols: usize) -> Vec<Vec<u64>> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0u64; cols];
            v[free] = 1;
            for (row, &p) in rows.iter().zip(pivots) {
                v[p] = (q - row[free]) % q;
            }
            v
        })
        .collect()
}

/// Basis of `{x : M x = 0}` for a matrix given by rows.
pub fn null_space(field: PrimeField, rows: &[Vec<FieldElement>], cols: usize) -> Result<LinearSubspace> {
    let q = field.modulus();
    let mut raw = to_raw(field, rows, cols)?;
    let pivots = rref_raw(q, &mut raw, cols);
    let kernel = kernel_from_rref(q, &raw, &pivots, cols);
    LinearSubspace::span_raw(field, cols, kernel)
}

/// Solution set of `M x = b`, or `None` when the system is inconsistent.
pub fn solve(field: PrimeField, rows: &[Vec<FieldElement>], rhs: &[FieldElement], cols: usize) -> Result<Option<AffineSubspace>> {
    if rows.len() != rhs.len() {
        return Err(Error::ShapeError(format!("{} rows but {} right-hand sides", rows.len(), rhs.len())));
    }
    let q = field.modulus();
    let mut raw = to_raw(field, rows, cols)?;
    for (row, &b) in raw.iter_mut().zip(rhs) {
        row.push(field.check(b)?.value());
    }
    let pivots = rref_raw(q, &mut raw, cols + 1);
    if pivots.last() == Some(&cols) {
        return Ok(None);
    }
    let mut anchor = vec![0u64; cols];
    for (row, &p) in raw.iter().zip(&pivots) {
        anchor[p] = row[cols];
    }
    for row in raw.iter_mut() {
        row.pop();
    }
    let kernel = kernel_from_rref(q, &raw, &pivots, cols);
    let directions = LinearSubspace::span_raw(field, cols, kernel)?;
    let anchor = anchor.into_iter().map(|v| field.elem(v)).collect();
    Ok(Some(AffineSubspace::new(anchor, directions)?))
}

/// A linear subspace of F_q^D in canonical echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearSubspace {
    field: PrimeField,
    ambient_dim: usize,
    basis: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
}

impl LinearSubspace {
    pub fn zero(field: PrimeField, ambient_dim: usize) -> Self {
        Self { field, ambient_dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: PrimeField, ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| (0..ambient_dim).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect();
        Self { field, ambient_dim, basis, pivots: (0..ambient_dim).collect() }
    }

    pub fn span(field: PrimeField, ambient_dim: usize, vectors: &[Vec<FieldElement>]) -> Result<Self> {
        let mut raw = to_raw(field, vectors, ambient_dim)?;
        let pivots = rref_raw(field.modulus(), &mut raw, ambient_dim);
        Ok(Self { field, ambient_dim, basis: from_raw(field, raw), pivots })
    }

    fn span_raw(field: PrimeField, ambient_dim: usize, mut raw: Vec<Vec<u64>>) -> Result<Self> {
        let pivots = rref_raw(field.modulus(), &mut raw, ambient_dim);
        Ok(Self { field, ambient_dim, basis: from_raw(field, raw), pivots })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<FieldElement>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ContextMismatch { left: self.field.modulus(), right: other.field.modulus() });
        }
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::ShapeError(format!("ambient dimensions {} and {}", self.ambient_dim, other.ambient_dim)));
        }
        Ok(())
    }

    fn check_vector(&self, v: &[FieldElement]) -> Result<()> {
        if v.len() != self.ambient_dim {
            return Err(Error::ShapeError(format!("vector of length {} in F_q^{}", v.len(), self.ambient_dim)));
        }
        v.iter().try_for_each(|&e| self.field.check(e).map(|_| ()))
    }

    /// `v` minus its projection along the basis; zero iff `v` is in the subspace.
    pub fn reduce(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.check_vector(v)?;
        let mut out = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = out[p];
            if !c.is_zero() {
                for (x, &y) in out.iter_mut().zip(row) {
                    *x -= c * y;
                }
            }
        }
        Ok(out)
    }

    pub fn contains(&self, v: &[FieldElement]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(|e| e.is_zero()))
    }

    /// Coordinates of a member with respect to the echelon basis.
    pub fn coordinates(&self, v: &[FieldElement]) -> Result<Option<Vec<FieldElement>>> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&p| v[p]).collect()))
    }

    /// `Σ_j coeffs[j] · basis[j]`.
    pub fn combination(&self, coeffs: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(coeffs.len(), self.dim(), "one coefficient per basis vector");
        let mut out = vec![self.field.zero(); self.ambient_dim];
        for (row, &c) in self.basis.iter().zip(coeffs) {
            if !c.is_zero() {
                for (x, &y) in out.iter_mut().zip(row) {
                    *x += c * y;
                }
            }
        }
        out
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Self::span(self.field, self.ambient_dim, &all)
    }

    /// `U ∩ V` by the Zassenhaus construction.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let dim = self.ambient_dim;
        let q = self.field.modulus();
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(self.dim() + other.dim());
        for u in &self.basis {
            rows.push(u.iter().chain(u).map(|e| e.value()).collect());
        }
        for v in &other.basis {
            rows.push(v.iter().map(|e| e.value()).chain(std::iter::repeat_n(0, dim)).collect());
        }
        let pivots = rref_raw(q, &mut rows, 2 * dim);
        let inter = rows
            .into_iter()
            .zip(pivots)
            .filter(|&(_, p)| p >= dim)
            .map(|(row, _)| row[dim..].to_vec())
            .collect();
        Self::span_raw(self.field, dim, inter)
    }

    /// Members of the subspace that vanish on every block in `blocks`.
    pub fn restriction_kernel(&self, blocks: &[usize], m: usize) -> Result<Self> {
        let n = self.ambient_dim.checked_div(m).unwrap_or(0);
        let d = self.dim();
        let mut constraints: Vec<Vec<FieldElement>> = Vec::with_capacity(blocks.len() * m);
        for &i in blocks {
            if i >= n {
                return Err(Error::IndexError { index: i, len: n });
            }
            for r in 0..m {
                constraints.push(self.basis.iter().map(|b| b[i * m + r]).collect());
            }
        }
        if d == 0 || constraints.is_empty() {
            return Ok(self.clone());
        }
        let lambdas = null_space(self.field, &constraints, d)?;
        let images: Vec<Vec<FieldElement>> = lambdas.basis.iter().map(|l| self.combination(l)).collect();
        Self::span(self.field, self.ambient_dim, &images)
    }

    /// `{a ∈ A : a_i = 0}` for block `i` (0-based).
    pub fn coordinate_kernel(&self, i: usize, m: usize) -> Result<Self> {
        self.restriction_kernel(&[i], m)
    }

    /// All `q^dim` members, capped.
    pub fn elements(&self, cap: u128) -> Result<Vec<Vec<FieldElement>>> {
        let size = (self.field.modulus() as u128).checked_pow(self.dim() as u32).unwrap_or(u128::MAX);
        if size > cap {
            return Err(Error::EnumerationTooLarge { size, cap });
        }
        let q = self.field.modulus();
        let mut out = Vec::with_capacity(size as usize);
        let mut digits = vec![0u64; self.dim()];
        loop {
            let coeffs: Vec<_> = digits.iter().map(|&v| self.field.elem(v)).collect();
            out.push(self.combination(&coeffs));
            let mut pos = digits.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < q {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<FieldElement> {
        let coeffs: Vec<_> = (0..self.dim()).map(|_| self.field.random(rng)).collect();
        self.combination(&coeffs)
    }
}

/// `anchor + directions`, with the anchor reduced to the lexicographically
/// least member (zero on every pivot column of the directions).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineSubspace {
    anchor: Vec<FieldElement>,
    directions: LinearSubspace,
}

impl AffineSubspace {
    pub fn new(anchor: Vec<FieldElement>, directions: LinearSubspace) -> Result<Self> {
        let anchor = directions.reduce(&anchor)?;
        Ok(Self { anchor, directions })
    }

    pub fn point(anchor: Vec<FieldElement>, field: PrimeField) -> Self {
        let dim = anchor.len();
        Self { anchor, directions: LinearSubspace::zero(field, dim) }
    }

    /// Smallest affine subspace containing every point.
    pub fn affine_span(field: PrimeField, points: &[Vec<FieldElement>]) -> Result<Self> {
        let first = points.first().ok_or_else(|| Error::ShapeError("affine span of no points".into()))?;
        let dim = first.len();
        let diffs: Vec<Vec<FieldElement>> = points[1..]
            .iter()
            .map(|p| {
                if p.len() != dim {
                    return Err(Error::ShapeError(format!("point of length {} in F_q^{dim}", p.len())));
                }
                Ok(p.iter().zip(first).map(|(&a, &b)| a - b).collect())
            })
            .collect::<Result<_>>()?;
        let directions = LinearSubspace::span(field, dim, &diffs)?;
        Self::new(first.clone(), directions)
    }

    pub fn anchor(&self) -> &[FieldElement] {
        &self.anchor
    }

    pub fn directions(&self) -> &LinearSubspace {
        &self.directions
    }

    pub fn dim(&self) -> usize {
        self.directions.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn field(&self) -> PrimeField {
        self.directions.field()
    }

    pub fn contains(&self, v: &[FieldElement]) -> Result<bool> {
        if v.len() != self.anchor.len() {
            return Err(Error::ShapeError(format!("vector of length {} in F_q^{}", v.len(), self.anchor.len())));
        }
        let diff: Vec<_> = v.iter().zip(&self.anchor).map(|(&a, &b)| a - b).collect();
        self.directions.contains(&diff)
    }

    /// `anchor + Σ_j coeffs[j] · direction[j]`.
    pub fn at(&self, coeffs: &[FieldElement]) -> Vec<FieldElement> {
        let shift = self.directions.combination(coeffs);
        shift.iter().zip(&self.anchor).map(|(&a, &b)| a + b).collect()
    }

    pub fn elements(&self, cap: u128) -> Result<Vec<Vec<FieldElement>>> {
        Ok(self
            .directions
            .elements(cap)?
            .into_iter()
            .map(|d| d.iter().zip(&self.anchor).map(|(&a, &b)| a + b).collect())
            .collect())
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<FieldElement> {
        let d = self.directions.random_element(rng);
        d.iter().zip(&self.anchor).map(|(&a, &b)| a + b).collect()
    }
}
