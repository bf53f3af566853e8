//! `GL2(Q_p)` with exact rational entries: valuations, the Iwasawa
//! decomposition, coset enumerations and Iwahori double cosets.

mod cells;
mod chambers;
mod cosets;
mod iwasawa;
mod matrix;

pub use cells::{cartan_type, iwahori_cells_of_shell, CellIndex, IwahoriCell};
pub use chambers::{chamber_key, k_orbit_reps, ChamberKey};
pub use cosets::{cartan_volume, coset_reps, hecke_cosets, same_right_coset, CosetKind, P1Point, ProjectiveLine};
pub use iwasawa::{iwasawa, Iwasawa};
pub use matrix::GL2Elem;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matrix is singular")]
    Singular,
}

/// `Q_p` with uniformizer `p` and residue field of size `q = p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalField {
    p: u64,
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl LocalField {
    pub fn new(p: u64) -> Result<Self, PadicError> {
        if is_prime(p) {
            Ok(LocalField { p })
        } else {
            Err(PadicError::NotPrime(p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.p
    }

    pub fn uniformizer(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.p))
    }

    /// `p^k` for any integer `k`.
    pub fn power(&self, k: i64) -> BigRational {
        let base = self.uniformizer();
        if k >= 0 {
            num_traits::pow(base, k as usize)
        } else {
            num_traits::pow(base, (-k) as usize).recip()
        }
    }

    pub fn valuation(&self, x: &BigRational) -> Option<i64> {
        valuation(x, self.p)
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (quo, rem) = n.div_rem(p);
        if !rem.is_zero() {
            return v;
        }
        n = quo;
        v += 1;
    }
}

/// `v_p(x)`, with `None` standing for `+infinity` at `x = 0`.
pub fn valuation(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    Some(int_valuation(x.numer(), &p) - int_valuation(x.denom(), &p))
}

/// Minimum of valuations where `None` is `+infinity`.
pub(crate) fn min_val(vals: impl IntoIterator<Item = Option<i64>>) -> Option<i64> {
    vals.into_iter().flatten().min()
}

/// Reduces a `p`-integral rational modulo `p^m` to a representative in `[0, p^m)`.
pub fn reduce_mod(x: &BigRational, p: u64, m: u32) -> BigInt {
    let modulus = num_traits::pow(BigInt::from(p), m as usize);
    if modulus.is_one() {
        return BigInt::zero();
    }
    let d = x.denom().mod_floor(&modulus);
    let inv = mod_inverse(&d, &modulus).expect("denominator prime to p");
    (x.numer() * inv).mod_floor(&modulus)
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::exact::ratio;

    #[test]
    fn valuations() {
        assert_eq!(valuation(&ratio(0, 1), 2), None);
        assert_eq!(valuation(&ratio(1, 2), 2), Some(-1));
        assert_eq!(valuation(&ratio(12, 5), 2), Some(2));
        assert_eq!(valuation(&ratio(-81, 4), 3), Some(4));
    }

    #[test]
    fn primes_only() {
        assert!(LocalField::new(5).is_ok());
        assert_eq!(LocalField::new(4), Err(PadicError::NotPrime(4)));
    }

    #[test]
    fn reduction() {
        assert_eq!(reduce_mod(&ratio(1, 3), 2, 3), BigInt::from(3));
        assert_eq!(reduce_mod(&ratio(-1, 1), 5, 2), BigInt::from(24));
    }
}
