//! Chambers `g I` of `PGL2(Q_p)`, identified with homothety classes of the
//! lattice pairs `g Z_p^2 ⊃ g (Z_p ⊕ p Z_p)`.

use std::collections::{HashSet, VecDeque};

use num_rational::BigRational;
use num_traits::Zero;

use super::{reduce_mod, valuation, GL2Elem, LocalField};

/// Hermite form `[[p^x, y], [0, p^z]]` of the lattice spanned by the columns,
/// with `y` reduced modulo `p^x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct LatticeKey {
    x: i64,
    z: i64,
    y: BigRational,
}

fn lattice_key(m: &GL2Elem, field: &LocalField) -> LatticeKey {
    let p = field.p();
    let [a, b, c, d] = m.entries();
    let vc = valuation(c, p);
    let vd = valuation(d, p);
    let (top, bottom) = match (vc, vd) {
        (Some(x), Some(y)) if x <= y => (a, c),
        (Some(_), None) => (a, c),
        _ => (b, d),
    };
    let z = valuation(bottom, p).expect("nonzero bottom row");
    let x = valuation(&m.det(), p).expect("invertible") - z;
    let y = top * field.power(z) / bottom;
    LatticeKey {
        x,
        z,
        y: reduce_rational(&y, x, field),
    }
}

/// Canonical representative of `y + p^x Z_p` in `p^-k [0, p^(x+k))`.
fn reduce_rational(y: &BigRational, x: i64, field: &LocalField) -> BigRational {
    let p = field.p();
    match valuation(y, p) {
        None => BigRational::zero(),
        Some(v) if v >= x => BigRational::zero(),
        Some(v) => {
            let k = (-v).max(0);
            let scaled = y * field.power(k);
            let r = reduce_mod(&scaled, p, (x + k) as u32);
            BigRational::from_integer(r) / field.power(k)
        }
    }
}

/// Identifies the chamber `g I` up to the center.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChamberKey(LatticeKey, LatticeKey);

pub fn chamber_key(g: &GL2Elem, field: &LocalField) -> ChamberKey {
    let g = g.scale(&field.power(-g.min_valuation(field.p())));
    let h = g.mul(&GL2Elem::level_shift(field));
    ChamberKey(lattice_key(&g, field), lattice_key(&h, field))
}

/// Generators of `GL2(Z_p)` up to closure.
fn k_generators(field: &LocalField) -> Vec<GL2Elem> {
    let p = field.p() as i64;
    let mut gens = vec![
        GL2Elem::from_ints(1, 1, 0, 1),
        GL2Elem::from_ints(1, 0, 1, 1),
        GL2Elem::w(),
    ];
    if p == 2 {
        gens.push(GL2Elem::from_ints(-1, 0, 0, 1));
        gens.push(GL2Elem::from_ints(5, 0, 0, 1));
    } else {
        // a primitive root modulo p^2 generates Z_p^x topologically
        let m = p * p;
        let order = p * (p - 1);
        let root = (2..m)
            .find(|&u| {
                u % p != 0
                    && (1..order).all(|k| order % k != 0 || pow_mod(u, k, m) != 1)
            })
            .expect("primitive root exists");
        gens.push(GL2Elem::from_ints(root, 0, 0, 1));
    }
    gens
}

fn pow_mod(b: i64, e: i64, m: i64) -> i64 {
    (0..e).fold(1, |acc, _| acc * b % m)
}

fn reduce_entries(k: &GL2Elem, p: u64, m: u32) -> GL2Elem {
    let [a, b, c, d] = k.entries().map(|x| BigRational::from_integer(reduce_mod(x, p, m)));
    GL2Elem::new(a, b, c, d).expect("unit determinant")
}

/// Representatives `k` of `K / (K ∩ g I g^-1)`, i.e. of the `K`-orbit of the
/// chamber `g I`, with the identity first.
pub fn k_orbit_reps(g: &GL2Elem, field: &LocalField) -> Vec<GL2Elem> {
    let p = field.p();
    let e = -g.min_valuation(p) - g.inv().min_valuation(p);
    // K(p^m) fixes the chamber once m >= e + 1
    let m = (e + 1).max(1) as u32;
    let gens = k_generators(field);
    let mut seen: HashSet<ChamberKey> = HashSet::new();
    let mut reps = Vec::new();
    let mut queue = VecDeque::new();
    let start = GL2Elem::identity();
    seen.insert(chamber_key(g, field));
    reps.push(start.clone());
    queue.push_back(start);
    while let Some(k) = queue.pop_front() {
        for s in &gens {
            let next = reduce_entries(&s.mul(&k), p, m);
            if seen.insert(chamber_key(&next.mul(g), field)) {
                reps.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    reps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::exact::ratio;

    fn f(p: u64) -> LocalField {
        LocalField::new(p).unwrap()
    }

    #[test]
    fn key_is_right_iwahori_invariant() {
        let field = f(3);
        let g = GL2Elem::new(ratio(1, 3), ratio(2, 1), ratio(5, 1), ratio(1, 9)).unwrap();
        let iw = [
            GL2Elem::from_ints(1, 4, 3, 2),
            GL2Elem::from_ints(2, 1, 9, 5),
            GL2Elem::from_ints(7, 0, 6, 1),
        ];
        for i in iw {
            assert!(i.in_iwahori(3));
            assert_eq!(chamber_key(&g, &field), chamber_key(&g.mul(&i), &field));
            assert_eq!(chamber_key(&g, &field), chamber_key(&g.scale(&ratio(9, 1)), &field));
        }
        assert_ne!(chamber_key(&g, &field), chamber_key(&g.mul(&GL2Elem::w()), &field));
    }

    #[test]
    fn orbit_of_the_base_chamber_is_k_mod_i() {
        for p in [2, 3, 5] {
            assert_eq!(k_orbit_reps(&GL2Elem::identity(), &f(p)).len() as u64, p + 1);
        }
    }

    #[test]
    fn orbit_sizes_match_the_index() {
        // K ∩ a I a^-1 is K_0(p^(r+1)) for a = a(p^-r) and K^0(p^r) for a = a(p^r)
        for p in [2, 3] {
            let field = f(p);
            for r in 0..3i64 {
                let n = k_orbit_reps(&GL2Elem::torus(&field, -r), &field).len() as u64;
                assert_eq!(n, (p + 1) * p.pow(r as u32), "p = {p}, r = -{r}");
            }
            for r in 1..3i64 {
                let n = k_orbit_reps(&GL2Elem::torus(&field, r), &field).len() as u64;
                assert_eq!(n, (p + 1) * p.pow(r as u32 - 1), "p = {p}, r = {r}");
            }
        }
    }
}
