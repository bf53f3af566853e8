//! Exact arithmetic in the quadratic ring `Q[sqrt(q)]`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::NumericsError;

/// An element `a + b*sqrt(q)` with rational `a`, `b`.
///
/// When `q` is a perfect square the `b` part is folded into `a`, so `b` is
/// always zero for such fields and every element has a unique representation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    a: BigRational,
    b: BigRational,
    q: u64,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn perfect_sqrt(q: u64) -> Option<u64> {
    let s = q.sqrt();
    (s * s == q).then_some(s)
}

impl ExactScalar {
    pub fn new(a: BigRational, b: BigRational, q: u64) -> Self {
        assert!(q > 0, "residue field size must be positive");
        match perfect_sqrt(q) {
            Some(s) => ExactScalar {
                a: a + b * rat(s as i64),
                b: BigRational::zero(),
                q,
            },
            None => ExactScalar { a, b, q },
        }
    }

    pub fn from_rational(a: BigRational, q: u64) -> Self {
        ExactScalar::new(a, BigRational::zero(), q)
    }

    pub fn from_int(n: i64, q: u64) -> Self {
        ExactScalar::from_rational(rat(n), q)
    }

    pub fn zero(q: u64) -> Self {
        ExactScalar::from_int(0, q)
    }

    pub fn one(q: u64) -> Self {
        ExactScalar::from_int(1, q)
    }

    pub fn sqrt_q(q: u64) -> Self {
        ExactScalar::new(BigRational::zero(), BigRational::one(), q)
    }

    /// `q^(k/2)` for any integer `k`.
    pub fn q_half_power(q: u64, k: i64) -> Self {
        let whole = k.div_euclid(2);
        let half = k.rem_euclid(2);
        let base = rat(q as i64);
        let p = if whole >= 0 {
            num_traits::pow(base, whole as usize)
        } else {
            num_traits::pow(base, (-whole) as usize).recip()
        };
        if half == 0 {
            ExactScalar::from_rational(p, q)
        } else {
            ExactScalar::new(BigRational::zero(), p, q)
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn check(&self, other: &Self) -> Result<(), NumericsError> {
        if self.q == other.q {
            Ok(())
        } else {
            Err(NumericsError::FieldMismatch {
                left: self.q,
                right: other.q,
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check(other)?;
        Ok(ExactScalar {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            q: self.q,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check(other)?;
        Ok(ExactScalar {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            q: self.q,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check(other)?;
        let qr = rat(self.q as i64);
        Ok(ExactScalar {
            a: &self.a * &other.a + &self.b * &other.b * qr,
            b: &self.a * &other.b + &self.b * &other.a,
            q: self.q,
        })
    }

    /// Field norm `a^2 - q b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * rat(self.q as i64)
    }

    pub fn inv(&self) -> Result<Self, NumericsError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(NumericsError::DivisionByZero);
        }
        Ok(ExactScalar {
            a: &self.a / &n,
            b: -&self.b / &n,
            q: self.q,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check(other)?;
        self.checked_mul(&other.inv()?)
    }

    /// Exact sign of the real number `a + b sqrt(q)`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with q b^2
        let a2 = &self.a * &self.a;
        let qb2 = &self.b * &self.b * rat(self.q as i64);
        match a2.cmp(&qb2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = ExactScalar::one(self.q);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.q as f64).sqrt()
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.q != other.q {
            return None;
        }
        Some((self - other).signum())
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, self.q)
        } else if self.b.is_negative() {
            write!(f, "{} - {}*sqrt({})", self.a, -&self.b, self.q)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.q)
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                self.$checked(rhs).expect("ExactScalar operands from different fields")
            }
        }
        impl $trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            a: -self.a,
            b: -self.b,
            q: self.q,
        }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -self.clone()
    }
}
