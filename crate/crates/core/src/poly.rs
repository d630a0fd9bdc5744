//! Dense univariate polynomials over F_q, lowest degree first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

/// A polynomial with no trailing zero coefficients; the zero polynomial is
/// the empty coefficient list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: PrimeField,
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn zero(field: PrimeField) -> Self {
        Self { field, coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_coeffs(c.field(), vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x(field: PrimeField) -> Self {
        Self::from_coeffs(field, vec![field.zero(), field.one()])
    }

    pub fn monomial(c: FieldElement, degree: usize) -> Self {
        let field = c.field();
        let mut coeffs = vec![field.zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(field, coeffs)
    }

    /// `x - root`.
    pub fn linear(root: FieldElement) -> Self {
        Self::from_coeffs(root.field(), vec![-root, root.field().one()])
    }

    pub fn from_coeffs(field: PrimeField, mut coeffs: Vec<FieldElement>) -> Self {
        for c in &coeffs {
            assert_eq!(c.field(), field, "mixed field contexts");
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { field, coeffs }
    }

    pub fn from_values(field: PrimeField, values: &[u64]) -> Self {
        Self::from_coeffs(field, values.iter().map(|&v| field.elem(v)).collect())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or_else(|| self.field.zero())
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: FieldElement) -> FieldElement {
        self.coeffs.iter().rev().fold(self.field.zero(), |acc, &c| acc * x + c)
    }

    pub fn scale(&self, c: FieldElement) -> Self {
        Self::from_coeffs(self.field, self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// `f(c·X)`.
    pub fn dilate(&self, c: FieldElement) -> Self {
        let mut power = self.field.one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| {
                let v = a * power;
                power *= c;
                v
            })
            .collect();
        Self::from_coeffs(self.field, coeffs)
    }

    /// Coefficient vector of length exactly `k`.
    pub fn to_vector(&self, k: usize) -> Result<Vec<FieldElement>> {
        if self.coeffs.len() > k {
            return Err(Error::DegreeOverflow { degree: self.coeffs.len() - 1, bound: k });
        }
        let mut v = self.coeffs.clone();
        v.resize(k, self.field.zero());
        Ok(v)
    }

    /// Lagrange interpolation through pairwise-distinct nodes.
    pub fn interpolate(field: PrimeField, points: &[(FieldElement, FieldElement)]) -> Result<Self> {
        for (i, (xi, yi)) in points.iter().enumerate() {
            field.check(*xi)?;
            field.check(*yi)?;
            if points[..i].iter().any(|(xj, _)| xj == xi) {
                return Err(Error::DuplicateNode(xi.value()));
            }
        }
        // master = prod (X - x_j); each basis numerator is master / (X - x_i)
        let mut master = Poly::constant(field.one());
        for (xj, _) in points {
            master = &master * &Poly::linear(*xj);
        }
        let mut acc = vec![field.zero(); points.len()];
        for (i, &(xi, yi)) in points.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            let numer = master.div_linear(xi);
            let denom = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(field.one(), |d, (_, &(xj, _))| d * (xi - xj));
            let w = yi * denom.inv()?;
            for (a, &c) in acc.iter_mut().zip(numer.coeffs.iter()) {
                *a += c * w;
            }
        }
        Ok(Self::from_coeffs(field, acc))
    }

    // Synthetic division by (X - root), discarding the remainder.
    fn div_linear(&self, root: FieldElement) -> Self {
        if self.coeffs.len() < 2 {
            return Self::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() - 1];
        let mut carry = self.field.zero();
        for i in (1..self.coeffs.len()).rev() {
            carry = self.coeffs[i] + carry * root;
            out[i - 1] = carry;
        }
        Self::from_coeffs(self.field, out)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}x")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|c| c.value()))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs(self.field, (0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs(self.field, (0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.field, self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(self.field, out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Determinant of a square matrix of polynomials by cofactor expansion along
/// the first row. Intended for the small (d <= 6) matrices of the folded
/// Wronskian.
pub fn poly_matrix_det(field: PrimeField, matrix: &[Vec<Poly>]) -> Result<Poly> {
    let d = matrix.len();
    if let Some(row) = matrix.iter().find(|row| row.len() != d) {
        return Err(Error::ShapeError(format!("{}x{} matrix row has length {}", d, d, row.len())));
    }
    let cols: Vec<usize> = (0..d).collect();
    Ok(cofactor(field, matrix, 0, &cols))
}

fn cofactor(field: PrimeField, m: &[Vec<Poly>], row: usize, cols: &[usize]) -> Poly {
    if cols.is_empty() {
        return Poly::constant(field.one());
    }
    let mut acc = Poly::zero(field);
    for (pos, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = &m[row][c] * &cofactor(field, m, row + 1, &rest);
        acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f17() -> PrimeField {
        PrimeField::new(17).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = f17();
        assert_eq!(Poly::from_values(f, &[5]).evaluate(f.elem(11)).value(), 5);
        assert_eq!(Poly::x(f).evaluate(f.elem(13)).value(), 13);
        assert_eq!(Poly::from_values(f, &[1, 0, 1]).evaluate(f.elem(4)).value(), 0);
        assert_eq!(Poly::zero(f).evaluate(f.elem(4)), f.zero());
    }

    #[test]
    fn normalization_and_degree() {
        let f = f17();
        let p = Poly::from_values(f, &[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Poly::from_values(f, &[0, 0]).degree(), None);
        assert_eq!(Poly::from_values(f, &[17]), Poly::zero(f));
        assert_eq!(p.to_vector(4).unwrap().len(), 4);
        assert!(p.to_vector(1).is_err());
    }

    #[test]
    fn interpolate_examples() {
        let f = f17();
        let pts = |v: &[(u64, u64)]| v.iter().map(|&(x, y)| (f.elem(x), f.elem(y))).collect::<Vec<_>>();
        assert_eq!(Poly::interpolate(f, &pts(&[(0, 7)])).unwrap(), Poly::from_values(f, &[7]));
        assert_eq!(Poly::interpolate(f, &pts(&[(1, 1), (2, 2)])).unwrap(), Poly::x(f));
        let p = Poly::interpolate(f, &pts(&[(1, 2), (2, 5), (3, 10)])).unwrap();
        assert_eq!(p, Poly::from_values(f, &[1, 0, 1]));
        for (x, y) in [(1, 2), (2, 5), (3, 10)] {
            assert_eq!(p.evaluate(f.elem(x)).value(), y);
        }
        assert_eq!(Poly::interpolate(f, &pts(&[(1, 1), (1, 2)])), Err(Error::DuplicateNode(1)));
        assert_eq!(Poly::interpolate(f, &[]).unwrap(), Poly::zero(f));
    }

    #[test]
    fn dilation_matches_evaluation() {
        let f = f17();
        let p = Poly::from_values(f, &[3, 1, 4, 1, 5]);
        let g = p.dilate(f.elem(3));
        for x in f.elements() {
            assert_eq!(g.evaluate(x), p.evaluate(f.elem(3) * x));
        }
    }

    #[test]
    fn determinant_examples() {
        let f = f17();
        let x = Poly::x(f);
        let zero = Poly::zero(f);
        let one = Poly::constant(f.one());
        assert_eq!(poly_matrix_det(f, &[vec![x.clone()]]).unwrap(), x);
        let diag = vec![vec![x.clone(), zero.clone()], vec![zero, x.clone()]];
        assert_eq!(poly_matrix_det(f, &diag).unwrap(), &x * &x);
        let m = vec![vec![x.clone(), one.clone()], vec![one, x.clone()]];
        let det = poly_matrix_det(f, &m).unwrap();
        assert_eq!(det, Poly::from_values(f, &[16, 0, 1]));
        for a in [0, 5, 9] {
            let a = f.elem(a);
            assert_eq!(det.evaluate(a), a * a - f.one());
        }
        assert!(matches!(poly_matrix_det(f, &[vec![x.clone(), x]]), Err(Error::ShapeError(_))));
    }

    #[test]
    fn display_is_readable() {
        let f = f17();
        assert_eq!(Poly::from_values(f, &[1, 0, 3]).to_string(), "3x^2 + 1");
        assert_eq!(Poly::zero(f).to_string(), "0");
    }
}
