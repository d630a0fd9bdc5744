//! Prime fields F_q with a runtime modulus.
//!
//! A [`FieldElement`] carries its modulus so that elements of different fields
//! cannot be combined silently. The std operator impls panic on a modulus
//! mismatch; the `try_*` methods report [`Error::ContextMismatch`] instead.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::Rng;

use crate::arith::{distinct_prime_factors, is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};

/// Largest supported modulus; keeps `a + b` inside a `u64`.
pub const MAX_MODULUS: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_MODULUS || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Self { q })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Reduces `value` into `[0, q)`.
    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement { value: value % self.q, modulus: self.q }
    }

    pub fn from_i64(&self, value: i64) -> FieldElement {
        // q <= 2^62 fits in i64
        self.elem(value.rem_euclid(self.q as i64) as u64)
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        let f = *self;
        (0..self.q).map(move |v| f.elem(v))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        let f = *self;
        (1..self.q).map(move |v| f.elem(v))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.elem(rng.random_range(0..self.q))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.elem(rng.random_range(1..self.q))
    }

    /// Smallest generator of the multiplicative group.
    pub fn primitive_root(&self) -> FieldElement {
        if self.q == 2 {
            return self.one();
        }
        let order = self.q - 1;
        let factors = distinct_prime_factors(order);
        (2..self.q)
            .find(|&g| factors.iter().all(|p| pow_mod(g, order / p, self.q) != 1))
            .map(|g| self.elem(g))
            .expect("F_q^x is cyclic")
    }

    /// Checks that `a` belongs to this field.
    pub fn check(&self, a: FieldElement) -> Result<FieldElement> {
        if a.modulus != self.q {
            return Err(Error::ContextMismatch { left: self.q, right: a.modulus });
        }
        Ok(a)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn field(self) -> PrimeField {
        PrimeField { q: self.modulus }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, exp: u64) -> Self {
        Self { value: pow_mod(self.value, exp, self.modulus), modulus: self.modulus }
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.modulus - 2))
    }

    /// Smallest `t >= 1` with `self^t = 1`.
    pub fn order(self) -> Result<u64> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        let q = self.modulus;
        let mut t = q - 1;
        for p in distinct_prime_factors(q - 1) {
            while t.is_multiple_of(p) && pow_mod(self.value, t / p, q) == 1 {
                t /= p;
            }
        }
        Ok(t)
    }

    fn same_field(self, rhs: Self) -> Result<()> {
        if self.modulus != rhs.modulus {
            return Err(Error::ContextMismatch { left: self.modulus, right: rhs.modulus });
        }
        Ok(())
    }

    pub fn try_add(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self + rhs)
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self - rhs)
    }

    pub fn try_mul(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self * rhs)
    }

    pub fn try_div(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self * rhs.inv()?)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl serde::Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.value)
    }
}

#[inline]
fn assert_same(a: &FieldElement, b: &FieldElement) {
    assert_eq!(a.modulus, b.modulus, "mixed field contexts");
}

impl Add for FieldElement {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        assert_same(&self, &rhs);
        let s = self.value + rhs.value;
        let value = if s >= self.modulus { s - self.modulus } else { s };
        Self { value, modulus: self.modulus }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        assert_same(&self, &rhs);
        let value = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.modulus - rhs.value + self.value
        };
        Self { value, modulus: self.modulus }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        assert_same(&self, &rhs);
        Self { value: mul_mod(self.value, rhs.value, self.modulus), modulus: self.modulus }
    }
}

impl Neg for FieldElement {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        let value = if self.value == 0 { 0 } else { self.modulus - self.value };
        Self { value, modulus: self.modulus }
    }
}

impl AddAssign for FieldElement {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for FieldElement {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for FieldElement {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

/// The base field together with the folding generator γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldContext {
    field: PrimeField,
    gamma: FieldElement,
    gamma_order: u64,
}

impl FieldContext {
    pub fn new(q: u64, gamma: u64) -> Result<Self> {
        let field = PrimeField::new(q)?;
        let gamma = field.elem(gamma);
        if gamma.is_zero() {
            return Err(Error::ZeroGenerator);
        }
        let gamma_order = gamma.order()?;
        Ok(Self { field, gamma, gamma_order })
    }

    /// Uses the smallest primitive root of F_q as γ.
    pub fn with_primitive_root(q: u64) -> Result<Self> {
        let field = PrimeField::new(q)?;
        Self::new(q, field.primitive_root().value())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q
    }

    pub fn gamma(&self) -> FieldElement {
        self.gamma
    }

    pub fn gamma_order(&self) -> u64 {
        self.gamma_order
    }
}
