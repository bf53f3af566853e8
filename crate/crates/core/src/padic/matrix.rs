use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{min_val, valuation, LocalField, PadicError};
use crate::numerics::exact::rat;

/// An invertible 2x2 matrix `[[a, b], [c, d]]` with rational entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GL2Elem {
    a: BigRational,
    b: BigRational,
    c: BigRational,
    d: BigRational,
}

impl GL2Elem {
    pub fn new(
        a: BigRational,
        b: BigRational,
        c: BigRational,
        d: BigRational,
    ) -> Result<Self, PadicError> {
        let g = GL2Elem { a, b, c, d };
        if g.det().is_zero() {
            Err(PadicError::Singular)
        } else {
            Ok(g)
        }
    }

    /// Integer entries; panics on a singular matrix.
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        GL2Elem::new(rat(a), rat(b), rat(c), rat(d)).expect("nonsingular matrix")
    }

    pub fn identity() -> Self {
        GL2Elem::from_ints(1, 0, 0, 1)
    }

    /// `n(x) = [[1, x], [0, 1]]`.
    pub fn n(x: BigRational) -> Self {
        GL2Elem {
            a: BigRational::one(),
            b: x,
            c: BigRational::zero(),
            d: BigRational::one(),
        }
    }

    /// `a(y) = [[y, 0], [0, 1]]`.
    pub fn a(y: BigRational) -> Self {
        GL2Elem::diag(y, BigRational::one())
    }

    /// `w = [[0, -1], [1, 0]]`.
    pub fn w() -> Self {
        GL2Elem::from_ints(0, -1, 1, 0)
    }

    /// The scalar matrix `z(c)`.
    pub fn z(c: BigRational) -> Self {
        GL2Elem::diag(c.clone(), c)
    }

    pub fn diag(a: BigRational, d: BigRational) -> Self {
        assert!(!a.is_zero() && !d.is_zero(), "singular diagonal");
        GL2Elem {
            a,
            b: BigRational::zero(),
            c: BigRational::zero(),
            d,
        }
    }

    /// `a(p^r)`.
    pub fn torus(field: &LocalField, r: i64) -> Self {
        GL2Elem::a(field.power(r))
    }

    /// `diag(1, p)`.
    pub fn level_shift(field: &LocalField) -> Self {
        GL2Elem::diag(BigRational::one(), field.uniformizer())
    }

    /// `[[0, -1], [p, 0]]`.
    pub fn atkin_lehner(field: &LocalField) -> Self {
        GL2Elem {
            a: BigRational::zero(),
            b: -BigRational::one(),
            c: field.uniformizer(),
            d: BigRational::zero(),
        }
    }

    pub fn entries(&self) -> [&BigRational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> BigRational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        GL2Elem {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inv(&self) -> Self {
        let det = self.det();
        GL2Elem {
            a: &self.d / &det,
            b: -&self.b / &det,
            c: -&self.c / &det,
            d: &self.a / &det,
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        assert!(!s.is_zero());
        GL2Elem {
            a: &self.a * s,
            b: &self.b * s,
            c: &self.c * s,
            d: &self.d * s,
        }
    }

    /// Smallest entry valuation (`None` never occurs for an invertible matrix).
    pub fn min_valuation(&self, p: u64) -> i64 {
        min_val(self.entries().iter().map(|x| valuation(x, p))).expect("nonzero matrix")
    }

    /// Member of `GL2(Z_p)`.
    pub fn in_k(&self, p: u64) -> bool {
        self.min_valuation(p) >= 0 && valuation(&self.det(), p) == Some(0)
    }

    /// Member of the Iwahori subgroup: in `GL2(Z_p)` with `p | c`.
    pub fn in_iwahori(&self, p: u64) -> bool {
        self.in_k(p) && valuation(&self.c, p).is_none_or(|v| v >= 1)
    }

    /// Equal up to the center.
    pub fn projectively_eq(&self, o: &Self) -> bool {
        let e1 = self.entries();
        let e2 = o.entries();
        let i = (0..4).find(|&i| !e1[i].is_zero()).expect("nonzero matrix");
        if e2[i].is_zero() {
            return false;
        }
        let s = e2[i] / e1[i];
        (0..4).all(|j| &(e1[j] * &s) == e2[j])
    }
}

impl fmt::Debug for GL2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for GL2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::exact::ratio;

    #[test]
    fn inverse_and_det() {
        let g = GL2Elem::new(ratio(1, 2), ratio(3, 1), ratio(-1, 1), ratio(5, 7)).unwrap();
        assert_eq!(g.mul(&g.inv()), GL2Elem::identity());
        assert!(GL2Elem::new(ratio(1, 1), ratio(2, 1), ratio(2, 1), ratio(4, 1)).is_err());
    }

    #[test]
    fn atkin_lehner_square_is_central() {
        let f = LocalField::new(3).unwrap();
        let al = GL2Elem::atkin_lehner(&f);
        assert!(al.mul(&al).projectively_eq(&GL2Elem::identity()));
        assert!(!al.in_k(3));
    }

    #[test]
    fn iwahori_membership() {
        assert!(GL2Elem::from_ints(1, 5, 2, 3).in_iwahori(2));
        assert!(!GL2Elem::from_ints(1, 5, 2, 1).in_k(3));
        let g = GL2Elem::from_ints(1, 5, 1, 3);
        assert!(g.in_k(3) && !g.in_iwahori(3));
        assert!(GL2Elem::from_ints(1, 1, 3, 2).in_iwahori(3));
    }
}
