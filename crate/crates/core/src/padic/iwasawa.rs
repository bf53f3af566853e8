use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{valuation, GL2Elem, LocalField};

/// `g = z(z) n(x) a(y) k` with `k` in `GL2(Z_p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iwasawa {
    pub z: BigRational,
    pub x: BigRational,
    pub y: BigRational,
    pub k: GL2Elem,
}

impl Iwasawa {
    pub fn compose(&self) -> GL2Elem {
        GL2Elem::z(self.z.clone())
            .mul(&GL2Elem::n(self.x.clone()))
            .mul(&GL2Elem::a(self.y.clone()))
            .mul(&self.k)
    }

    /// Diagonal entries `(A, D) = (z y, z)` of the upper triangular part.
    pub fn diagonal(&self) -> (BigRational, BigRational) {
        (&self.z * &self.y, self.z.clone())
    }
}

/// Iwasawa decomposition by the bottom row `(c, d)` of `g`: when `v(d) <= v(c)`
/// the compact part is lower unipotent, otherwise it carries a `w`.
pub fn iwasawa(g: &GL2Elem, field: &LocalField) -> Iwasawa {
    let [a, b, c, d] = g.entries();
    let p = field.p();
    let vc = valuation(c, p);
    let vd = valuation(d, p);
    let no_flip = match (vc, vd) {
        (_, None) => false,
        (None, Some(_)) => true,
        (Some(vc), Some(vd)) => vd <= vc,
    };
    if no_flip {
        let t = c / d;
        let k = GL2Elem::new(BigRational::one(), BigRational::zero(), t.clone(), BigRational::one())
            .expect("unipotent");
        Iwasawa {
            z: d.clone(),
            x: b / d,
            y: (a - b * &t) / d,
            k,
        }
    } else {
        let t = d / c;
        let k = GL2Elem::new(BigRational::zero(), -BigRational::one(), BigRational::one(), t)
            .expect("determinant one");
        Iwasawa {
            z: c.clone(),
            x: a / c,
            y: g.det() / (c * c),
            k,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::exact::{rat, ratio};

    #[test]
    fn identity_and_torus() {
        let f = LocalField::new(2).unwrap();
        let i = iwasawa(&GL2Elem::identity(), &f);
        assert_eq!((i.z.clone(), i.x.clone(), i.y.clone()), (rat(1), rat(0), rat(1)));
        assert_eq!(i.k, GL2Elem::identity());
        let t = iwasawa(&GL2Elem::a(rat(2)), &f);
        assert_eq!((t.z, t.x, t.y, t.k), (rat(1), rat(0), rat(2), GL2Elem::identity()));
    }

    #[test]
    fn lower_triangular_needs_flip() {
        let f = LocalField::new(2).unwrap();
        let g = GL2Elem::new(rat(1), rat(0), ratio(1, 2), rat(1)).unwrap();
        let i = iwasawa(&g, &f);
        assert_eq!(i.compose(), g);
        assert!(i.k.in_k(2));
        let [a, _, c, _] = i.k.entries();
        assert!(valuation(a, 2).is_none_or(|v| v >= 0));
        assert_eq!(valuation(c, 2), Some(0));
    }
}
