//! Complex values at a fixed binary precision with a tracked absolute error.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::exact::ExactScalar;
use super::NumericsError;

pub const DEFAULT_PRECISION: u32 = 128;

/// `re + i*im`, both dyadic rationals with at most `prec` significant bits,
/// within `err` of the true value.
#[derive(Clone, PartialEq)]
pub struct ApproxScalar {
    re: BigRational,
    im: BigRational,
    err: f64,
    prec: u32,
}

fn up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (1.0 + 4.0 * f64::EPSILON) + f64::MIN_POSITIVE
    }
}

fn down(x: f64) -> f64 {
    (x * (1.0 - 4.0 * f64::EPSILON) - f64::MIN_POSITIVE).max(0.0)
}

fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Upper bound on `|x|` as an `f64`.
pub(crate) fn rat_abs_up(x: &BigRational) -> f64 {
    up(rat_to_f64(x).abs())
}

/// Rounds `x` to `prec` significant bits (round half up). Returns the rounded
/// value and an upper bound for `|x - rounded|`.
fn round_rat(x: &BigRational, prec: u32) -> (BigRational, f64) {
    if x.is_zero() || x.denom().is_one() && x.numer().bits() <= prec as u64 {
        return (x.clone(), 0.0);
    }
    let n = x.numer();
    let d = x.denom();
    let shift = prec as i64 - n.bits() as i64 + d.bits() as i64;
    let (num, den) = if shift >= 0 {
        (n << shift as usize, d.clone())
    } else {
        (n.clone(), d << (-shift) as usize)
    };
    let two = BigInt::from(2);
    let m = (&num * &two + &den).div_floor(&(&den * &two));
    let scale = BigInt::one() << shift.unsigned_abs() as usize;
    let r = if shift >= 0 {
        BigRational::new(m, scale)
    } else {
        BigRational::from_integer(m * scale)
    };
    let e = rat_abs_up(&(x - &r));
    (r, e)
}

impl ApproxScalar {
    pub fn zero(prec: u32) -> Self {
        ApproxScalar {
            re: BigRational::zero(),
            im: BigRational::zero(),
            err: 0.0,
            prec,
        }
    }

    /// Builds a value from exact parts, rounding each to `prec` bits.
    pub fn from_parts(re: &BigRational, im: &BigRational, err: f64, prec: u32) -> Self {
        assert!(err.is_finite() && err >= 0.0, "error bound must be finite and non-negative");
        let (re, e1) = round_rat(re, prec);
        let (im, e2) = round_rat(im, prec);
        ApproxScalar {
            re,
            im,
            err: up(err + e1 + e2),
            prec,
        }
    }

    pub fn from_rational(x: &BigRational, prec: u32) -> Self {
        ApproxScalar::from_parts(x, &BigRational::zero(), 0.0, prec)
    }

    pub fn from_f64(re: f64, im: f64, err: f64, prec: u32) -> Self {
        let r = BigRational::from_float(re).expect("finite real part");
        let i = BigRational::from_float(im).expect("finite imaginary part");
        ApproxScalar::from_parts(&r, &i, err, prec)
    }

    /// Returns the same value with its error bound enlarged by `extra`.
    pub fn with_extra_error(mut self, extra: f64) -> Self {
        assert!(extra.is_finite() && extra >= 0.0);
        self.err = up(self.err + extra);
        self
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn re_f64(&self) -> f64 {
        rat_to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        rat_to_f64(&self.im)
    }

    /// Upper bound on the modulus of the stored center.
    pub fn abs_up(&self) -> f64 {
        up(self.re_f64().hypot(self.im_f64()))
    }

    /// Lower bound on the modulus of the stored center.
    pub fn abs_down(&self) -> f64 {
        down(self.re_f64().hypot(self.im_f64()))
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero() && self.err == 0.0
    }

    fn finish(re: BigRational, im: BigRational, err: f64, prec: u32) -> Self {
        ApproxScalar::from_parts(&re, &im, err, prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        Self::finish(&self.re + &o.re, &self.im + &o.im, self.err + o.err, prec)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        Self::finish(&self.re - &o.re, &self.im - &o.im, self.err + o.err, prec)
    }

    pub fn neg(&self) -> Self {
        ApproxScalar {
            re: -&self.re,
            im: -&self.im,
            err: self.err,
            prec: self.prec,
        }
    }

    pub fn conj(&self) -> Self {
        ApproxScalar {
            re: self.re.clone(),
            im: -&self.im,
            err: self.err,
            prec: self.prec,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        let prop = self.abs_up() * o.err + o.abs_up() * self.err + self.err * o.err;
        Self::finish(re, im, up(prop), prec)
    }

    pub fn inv(&self) -> Result<Self, NumericsError> {
        let lo = self.abs_down();
        if lo <= self.err || (self.re.is_zero() && self.im.is_zero()) {
            return Err(NumericsError::DivisionByZero);
        }
        let n2 = &self.re * &self.re + &self.im * &self.im;
        let re = &self.re / &n2;
        let im = -&self.im / &n2;
        let prop = if self.err == 0.0 {
            0.0
        } else {
            up(self.err / down(lo * down(lo - self.err)))
        };
        Ok(Self::finish(re, im, prop, self.prec))
    }

    pub fn div(&self, o: &Self) -> Result<Self, NumericsError> {
        Ok(self.mul(&o.inv()?))
    }

    /// True when the two values may coincide given their error bounds.
    pub fn overlaps(&self, o: &Self) -> bool {
        let d = self.sub(o);
        let slack = 2f64.powi(-(self.prec.min(o.prec) as i32) + 4) * (self.abs_up() + o.abs_up());
        d.abs_up() <= up(self.err + o.err + d.err + slack)
    }
}

/// Embeds `x` at precision `prec` with `err <= 2^(2-prec) |x|`.
pub fn to_approx(x: &ExactScalar, prec: u32) -> ApproxScalar {
    assert!(prec >= 53, "precision must be at least 53 bits");
    let a = x.rational_part();
    let b = x.surd_part();
    if b.is_zero() {
        return ApproxScalar::from_rational(a, prec);
    }
    let q = BigInt::from(x.q());
    let mut k = prec as usize + 16;
    loop {
        // floor(sqrt(q) 2^k) / 2^k <= sqrt(q) < that + 2^-k
        let s = (&q << (2 * k)).sqrt();
        let scale = BigInt::one() << k;
        let lower = BigRational::new(s, scale.clone());
        let v = a + b * &lower;
        let sqrt_err = b.abs() / BigRational::from_integer(scale);
        // |x| >= |v| - sqrt_err
        let margin = v.abs() - &sqrt_err;
        let budget = BigRational::new(BigInt::one(), BigInt::one() << prec as usize);
        if margin.is_positive() && sqrt_err <= &margin * &budget {
            return ApproxScalar::from_parts(&v, &BigRational::zero(), rat_abs_up(&sqrt_err), prec);
        }
        k *= 2;
    }
}

/// Adds `terms` left to right. The order is part of the contract: repeated
/// calls on the same sequence give bitwise-identical results.
pub fn sum_with_error(terms: &[ApproxScalar]) -> ApproxScalar {
    let prec = terms.iter().map(|t| t.prec).max().unwrap_or(DEFAULT_PRECISION);
    terms
        .iter()
        .fold(ApproxScalar::zero(prec), |acc, t| acc.add(t))
}

impl fmt::Debug for ApproxScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ApproxScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = self.re_f64();
        let im = self.im_f64();
        if im == 0.0 {
            write!(f, "{:.17e} ± {:.3e}", re, self.err)
        } else {
            write!(f, "({:.17e} {:+.17e}i) ± {:.3e}", re, im, self.err)
        }
    }
}

/// `sqrt(x)` for rational `x >= 0`, within `2^-prec`.
pub fn sqrt_rational(x: &BigRational, prec: u32) -> ApproxScalar {
    assert!(!x.is_negative(), "square root of a negative number");
    let bits = prec as usize + 8;
    let scaled = (x * BigRational::from_integer(BigInt::one() << (2 * bits))).to_integer();
    // floor(sqrt(floor(x 4^b))) / 2^b lies within 2^-b below sqrt(x)
    let r = BigRational::new(scaled.sqrt(), BigInt::one() << bits);
    ApproxScalar::from_parts(&r, &BigRational::zero(), 2f64.powi(-(bits as i32)), prec)
}

/// `exp(i theta)` by its Taylor series, within about `2^-prec`.
pub fn unit_from_angle(theta: &BigRational, prec: u32) -> ApproxScalar {
    let bits = prec as usize + 16;
    let unit = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let trunc = |x: BigRational| BigRational::from_integer((x / &unit).to_integer()) * &unit;
    let (mut re, mut im) = (BigRational::zero(), BigRational::zero());
    let mut term = BigRational::one();
    let mut k = 0u32;
    let mut rounding = 0.0;
    loop {
        match k % 4 {
            0 => re += &term,
            1 => im += &term,
            2 => re -= &term,
            _ => im -= &term,
        }
        k += 1;
        term = trunc(term * theta / BigRational::from_integer(k.into()));
        rounding += 2f64.powi(-(bits as i32)) * 2.0;
        // the remaining terms shrink by at least half once k > 2 |theta|
        if term.abs() < unit && BigRational::from_integer(k.into()) > theta.abs() * BigRational::from_integer(2.into()) {
            break;
        }
    }
    let err = rounding + 4.0 * 2f64.powi(-(bits as i32));
    ApproxScalar::from_parts(&re, &im, err, prec)
}

/// The root `alpha` of `alpha^2 - lambda alpha + 1`: on the unit circle with
/// non-negative imaginary part when `|lambda| <= 2`, the larger real root
/// otherwise.
pub fn root_from_lambda(lambda: &BigRational, prec: u32) -> ApproxScalar {
    let four = BigRational::from_integer(4.into());
    let disc = lambda * lambda - &four;
    let half = ApproxScalar::from_rational(&(lambda / BigRational::from_integer(2.into())), prec);
    let s = sqrt_rational(&disc.abs(), prec);
    let s2 = ApproxScalar {
        re: &s.re / BigRational::from_integer(2.into()),
        im: BigRational::zero(),
        err: up(s.err / 2.0),
        prec,
    };
    if disc.is_negative() {
        half.add(&ApproxScalar {
            re: BigRational::zero(),
            im: s2.re.clone(),
            err: s2.err,
            prec,
        })
    } else if lambda.is_negative() {
        half.sub(&s2)
    } else {
        half.add(&s2)
    }
}

/// Decimal rendering of a rational to `digits` places after the point,
/// truncated toward zero.
pub fn decimal_string(x: &BigRational, digits: usize) -> String {
    let neg = x.is_negative();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (x.abs() * BigRational::from_integer(scale.clone())).to_integer();
    let (int, frac) = scaled.div_rem(&scale);
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if digits > 0 {
        let f = frac.to_string();
        s.push('.');
        s.push_str(&"0".repeat(digits - f.len()));
        s.push_str(&f);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::exact::ratio;

    #[test]
    fn square_roots_match_the_surd() {
        for q in [2u64, 3, 5, 7] {
            let s = sqrt_rational(&ratio(q as i64, 1), 128);
            assert!(s.overlaps(&to_approx(&ExactScalar::sqrt_q(q), 128)));
            assert!(s.err() < 1e-38);
        }
    }

    #[test]
    fn angles_give_unit_values() {
        for (n, d) in [(0, 1), (3, 10), (11, 10), (2, 1), (-7, 2), (31, 5)] {
            let t = ratio(n, d);
            let u = unit_from_angle(&t, 128);
            let f = n as f64 / d as f64;
            assert!((u.re_f64() - f.cos()).abs() < 1e-15 && (u.im_f64() - f.sin()).abs() < 1e-15);
            let m = u.mul(&u.conj()).sub(&ApproxScalar::from_rational(&ratio(1, 1), 128));
            assert!(m.abs_up() < 1e-35, "{m}");
        }
    }

    #[test]
    fn roots_recover_lambda() {
        for (n, d) in [(0, 1), (1, 2), (-3, 2), (2, 1), (5, 2), (-9, 4)] {
            let l = ratio(n, d);
            let a = root_from_lambda(&l, 128);
            let back = a.add(&a.inv().unwrap());
            assert!(back.overlaps(&ApproxScalar::from_rational(&l, 128)), "{back}");
            assert!(back.err() < 1e-30);
        }
    }

    #[test]
    fn rounding_is_relative() {
        let x = ratio(1, 3);
        let (r, e) = round_rat(&x, 64);
        assert!(e <= 2f64.powi(-64) / 3.0 * 1.01);
        assert!(r.denom().bits() <= 70);
    }

    #[test]
    fn zero_embeds_exactly() {
        let z = to_approx(&ExactScalar::zero(2), 128);
        assert!(z.is_exact_zero());
    }

    #[test]
    fn integers_embed_exactly() {
        let z = to_approx(&ExactScalar::one(2), 128);
        assert_eq!(z.err(), 0.0);
        assert_eq!(z.re(), &ratio(1, 1));
    }

    #[test]
    fn inverse_error_bound() {
        let x = ApproxScalar::from_parts(&ratio(3, 1), &ratio(4, 1), 1e-10, 128);
        let y = x.inv().unwrap();
        // 1/(3+4i) = (3-4i)/25
        assert!((y.re_f64() - 0.12).abs() < 1e-15);
        assert!(y.err() >= 1e-10 / 25.0);
        assert!(y.err() < 1e-10);
    }

    #[test]
    fn inverse_of_uncertain_zero_fails() {
        let x = ApproxScalar::from_parts(&ratio(1, 1000), &ratio(0, 1), 1e-2, 128);
        assert!(x.inv().is_err());
    }

    #[test]
    fn decimal_strings() {
        assert_eq!(decimal_string(&ratio(-1, 3), 4), "-0.3333");
        assert_eq!(decimal_string(&ratio(5, 2), 2), "2.50");
        assert_eq!(decimal_string(&ratio(1, 100), 1), "0.0");
    }
}
