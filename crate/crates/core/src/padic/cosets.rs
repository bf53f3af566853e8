use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{reduce_mod, valuation, GL2Elem, LocalField};
use crate::numerics::exact::rat;

/// A point of `P^1(Z/p^m)`: either `[c : 1]` or `[1 : d]` with `p | d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum P1Point {
    Affine(u64),
    Infinite(u64),
}

/// `P^1(Z/p^m)`, which indexes `(B ∩ K) \ K / K(p^m)` through the bottom row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProjectiveLine {
    pub p: u64,
    pub m: u32,
}

impl ProjectiveLine {
    pub fn new(p: u64, m: u32) -> Self {
        ProjectiveLine { p, m }
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.m)
    }

    pub fn len(&self) -> usize {
        if self.m == 0 {
            1
        } else {
            (self.modulus() + self.modulus() / self.p) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<P1Point> {
        if self.m == 0 {
            return vec![P1Point::Affine(0)];
        }
        let n = self.modulus();
        (0..n)
            .map(P1Point::Affine)
            .chain((0..n / self.p).map(|j| P1Point::Infinite(j * self.p)))
            .collect()
    }

    pub fn index(&self, pt: P1Point) -> usize {
        match pt {
            P1Point::Affine(c) => c as usize,
            P1Point::Infinite(d) => (self.modulus() + d / self.p) as usize,
        }
    }

    /// The point of a bottom row `(c, d)` of an element of `GL2(Z_p)`.
    pub fn point_of_row(&self, c: &BigRational, d: &BigRational) -> P1Point {
        if self.m == 0 {
            return P1Point::Affine(0);
        }
        let to_u64 = |x: BigInt| x.to_u64().expect("small residue");
        if valuation(d, self.p) == Some(0) {
            P1Point::Affine(to_u64(reduce_mod(&(c / d), self.p, self.m)))
        } else {
            assert_eq!(valuation(c, self.p), Some(0), "row is not primitive");
            P1Point::Infinite(to_u64(reduce_mod(&(d / c), self.p, self.m)))
        }
    }

    pub fn point_of(&self, k: &GL2Elem) -> P1Point {
        let [_, _, c, d] = k.entries();
        self.point_of_row(c, d)
    }

    /// An element of `GL2(Z_p)` with the given bottom row.
    pub fn lift(&self, pt: P1Point) -> GL2Elem {
        match pt {
            P1Point::Affine(c) => GL2Elem::from_ints(1, 0, c as i64, 1),
            P1Point::Infinite(d) => GL2Elem::from_ints(0, -1, 1, d as i64),
        }
    }

    /// Image in `P^1(Z/p^(m-1))`.
    pub fn parent(&self, pt: P1Point) -> P1Point {
        assert!(self.m >= 1);
        let coarse = ProjectiveLine::new(self.p, self.m - 1);
        let k = self.lift(pt);
        coarse.point_of(&k)
    }

    /// Whether the point lies over `[0 : 1]` modulo `p`, i.e. in the Iwahori cell.
    pub fn in_iwahori_cell(&self, pt: P1Point) -> bool {
        match pt {
            P1Point::Affine(c) => self.m == 0 || c % self.p == 0,
            P1Point::Infinite(_) => false,
        }
    }
}

/// Representatives `h_i` with `K a(p) K = ⊔ h_i K`.
pub fn hecke_cosets(field: &LocalField) -> Vec<GL2Elem> {
    let p = field.p() as i64;
    (0..p)
        .map(|b| GL2Elem::from_ints(p, b, 0, 1))
        .chain(std::iter::once(GL2Elem::from_ints(1, 0, 0, p)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetKind {
    /// `K(p^m) \ K`.
    Full,
    /// `K_0(p^m) \ K`.
    Iwahori,
}

/// Right coset representatives of a congruence subgroup of level `m` in `K`.
pub fn coset_reps(m: u32, kind: CosetKind, field: &LocalField) -> Vec<GL2Elem> {
    if m == 0 {
        return vec![GL2Elem::identity()];
    }
    let p = field.p();
    match kind {
        CosetKind::Iwahori => {
            let line = ProjectiveLine::new(p, m);
            line.points().into_iter().map(|pt| line.lift(pt)).collect()
        }
        CosetKind::Full => {
            let n = p.pow(m) as i64;
            let mut out = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            if (a * d - b * c).rem_euclid(p as i64) != 0 {
                                out.push(GL2Elem::from_ints(a, b, c, d));
                            }
                        }
                    }
                }
            }
            out
        }
    }
}

/// Volume of `K a(p^r) K` when `vol(K) = 1`.
pub fn cartan_volume(r: u32, field: &LocalField) -> BigRational {
    if r == 0 {
        rat(1)
    } else {
        let q = field.q() as i64;
        rat(q).pow(r as i32 - 1) * rat(q + 1)
    }
}

pub fn same_right_coset(g: &GL2Elem, h: &GL2Elem, p: u64) -> bool {
    g.inv().mul(h).in_k(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64) -> LocalField {
        LocalField::new(p).unwrap()
    }

    #[test]
    fn hecke_coset_count_and_distinctness() {
        for p in [2, 3, 5] {
            let f = field(p);
            let hs = hecke_cosets(&f);
            assert_eq!(hs.len() as u64, p + 1);
            for (i, g) in hs.iter().enumerate() {
                assert_eq!(super::super::cartan_type(g, p), 1);
                for h in &hs[i + 1..] {
                    assert!(!same_right_coset(g, h, p));
                }
            }
            assert_eq!(rat(hs.len() as i64), cartan_volume(1, &f));
        }
    }

    #[test]
    fn iwahori_index() {
        let f = field(2);
        let reps = coset_reps(1, CosetKind::Iwahori, &f);
        assert_eq!(reps.len(), 3);
        for (i, g) in reps.iter().enumerate() {
            for h in &reps[i + 1..] {
                assert!(!g.mul(&h.inv()).in_iwahori(2));
            }
        }
    }

    #[test]
    fn full_level_counts() {
        assert_eq!(coset_reps(0, CosetKind::Full, &field(2)), vec![GL2Elem::identity()]);
        assert_eq!(coset_reps(1, CosetKind::Full, &field(2)).len(), 6);
        assert_eq!(coset_reps(1, CosetKind::Full, &field(3)).len(), 48);
    }

    #[test]
    fn cartan_volumes() {
        assert_eq!(cartan_volume(0, &field(5)), rat(1));
        assert_eq!(cartan_volume(1, &field(2)), rat(3));
        assert_eq!(cartan_volume(2, &field(3)), rat(12));
    }

    #[test]
    fn projective_line_round_trip() {
        let line = ProjectiveLine::new(3, 2);
        let pts = line.points();
        assert_eq!(pts.len(), 12);
        for (i, pt) in pts.iter().enumerate() {
            assert_eq!(line.index(*pt), i);
            assert_eq!(line.point_of(&line.lift(*pt)), *pt);
        }
    }
}
