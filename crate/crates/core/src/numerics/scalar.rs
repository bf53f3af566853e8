//! The arithmetic interface shared by the exact and approximate backends.

use std::fmt;

use num_rational::BigRational;

use super::approx::{to_approx, ApproxScalar};
use super::exact::{rat, ExactScalar};
use super::{Number, NumericsError};

pub trait Scalar: Clone + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Complex conjugation. The identity on the exact backend, whose values are real.
    fn conj(&self) -> Self;
    fn inv(&self) -> Result<Self, NumericsError>;
    /// Certainly zero.
    fn is_zero(&self) -> bool;
    /// Equal (exact backend) or indistinguishable within error (approximate backend).
    fn same(&self, o: &Self) -> bool;
    fn to_approx(&self, prec: u32) -> ApproxScalar;

    fn div(&self, o: &Self) -> Result<Self, NumericsError> {
        Ok(self.mul(&o.inv()?))
    }
}

/// Constants of a backend: residue size and how rationals embed.
pub trait Ctx: Clone + fmt::Debug + Send + Sync + 'static {
    type S: Scalar;

    fn q(&self) -> u64;
    fn rat(&self, r: &BigRational) -> Self::S;
    fn sqrt_q(&self) -> Self::S;
    fn prec(&self) -> u32;

    fn int(&self, n: i64) -> Self::S {
        self.rat(&rat(n))
    }

    fn zero(&self) -> Self::S {
        self.int(0)
    }

    fn one(&self) -> Self::S {
        self.int(1)
    }

    fn exact(&self, x: &ExactScalar) -> Self::S;

    /// Embeds an approximate value; `None` on the exact backend.
    fn from_approx(&self, x: &ApproxScalar) -> Option<Self::S>;

    fn number(&self, x: &Self::S) -> Number;

    fn pow(&self, x: &Self::S, n: u32) -> Self::S {
        (0..n).fold(self.one(), |acc, _| acc.mul(x))
    }

    /// Sum in index order.
    fn sum(&self, terms: &[Self::S]) -> Self::S {
        terms.iter().fold(self.zero(), |acc, t| acc.add(t))
    }

    /// `q^(k/2)`.
    fn q_half_power(&self, k: i64) -> Self::S {
        self.exact(&ExactScalar::q_half_power(self.q(), k))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCtx {
    pub q: u64,
}

impl ExactCtx {
    pub fn new(q: u64) -> Self {
        ExactCtx { q }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxCtx {
    pub q: u64,
    pub prec: u32,
}

impl ApproxCtx {
    pub fn new(q: u64, prec: u32) -> Self {
        assert!(prec >= 53, "precision must be at least 53 bits");
        ApproxCtx { q, prec }
    }
}

impl Scalar for ExactScalar {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn inv(&self) -> Result<Self, NumericsError> {
        ExactScalar::inv(self)
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
    fn same(&self, o: &Self) -> bool {
        self == o
    }
    fn to_approx(&self, prec: u32) -> ApproxScalar {
        to_approx(self, prec)
    }
}

impl Scalar for ApproxScalar {
    fn add(&self, o: &Self) -> Self {
        ApproxScalar::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        ApproxScalar::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        ApproxScalar::mul(self, o)
    }
    fn neg(&self) -> Self {
        ApproxScalar::neg(self)
    }
    fn conj(&self) -> Self {
        ApproxScalar::conj(self)
    }
    fn inv(&self) -> Result<Self, NumericsError> {
        ApproxScalar::inv(self)
    }
    fn is_zero(&self) -> bool {
        self.is_exact_zero()
    }
    fn same(&self, o: &Self) -> bool {
        self.overlaps(o)
    }
    fn to_approx(&self, prec: u32) -> ApproxScalar {
        if prec >= self.prec() {
            self.clone()
        } else {
            ApproxScalar::from_parts(self.re(), self.im(), self.err(), prec)
        }
    }
}

impl Ctx for ExactCtx {
    type S = ExactScalar;

    fn q(&self) -> u64 {
        self.q
    }
    fn rat(&self, r: &BigRational) -> ExactScalar {
        ExactScalar::from_rational(r.clone(), self.q)
    }
    fn sqrt_q(&self) -> ExactScalar {
        ExactScalar::sqrt_q(self.q)
    }
    fn prec(&self) -> u32 {
        super::approx::DEFAULT_PRECISION
    }
    fn exact(&self, x: &ExactScalar) -> ExactScalar {
        assert_eq!(x.q(), self.q, "value from a different field");
        x.clone()
    }
    fn from_approx(&self, _: &ApproxScalar) -> Option<ExactScalar> {
        None
    }
    fn number(&self, x: &ExactScalar) -> Number {
        Number::Exact(x.clone())
    }
}

impl Ctx for ApproxCtx {
    type S = ApproxScalar;

    fn q(&self) -> u64 {
        self.q
    }
    fn rat(&self, r: &BigRational) -> ApproxScalar {
        ApproxScalar::from_rational(r, self.prec)
    }
    fn sqrt_q(&self) -> ApproxScalar {
        to_approx(&ExactScalar::sqrt_q(self.q), self.prec)
    }
    fn prec(&self) -> u32 {
        self.prec
    }
    fn exact(&self, x: &ExactScalar) -> ApproxScalar {
        to_approx(x, self.prec)
    }
    fn from_approx(&self, x: &ApproxScalar) -> Option<ApproxScalar> {
        Some(Scalar::to_approx(x, self.prec))
    }
    fn number(&self, x: &ApproxScalar) -> Number {
        Number::Approx(x.clone())
    }
    fn sum(&self, terms: &[ApproxScalar]) -> ApproxScalar {
        super::approx::sum_with_error(terms)
    }
}
