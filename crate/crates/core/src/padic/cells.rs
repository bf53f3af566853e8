use std::collections::HashMap;

use num_rational::BigRational;

use super::{valuation, GL2Elem, LocalField};
use crate::numerics::exact::rat;

/// `v(det g) - 2 min v(g_ij)`: the `r` with `g ∈ Z K a(p^r) K`.
pub fn cartan_type(g: &GL2Elem, p: u64) -> i64 {
    valuation(&g.det(), p).expect("invertible") - 2 * g.min_valuation(p)
}

/// A double coset `I g I` of the Iwahori subgroup in `PGL2(Q_p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IwahoriCell {
    /// `I a(p^r) I`.
    Torus(i64),
    /// `I a(p^r) w I`.
    Flip(i64),
}

impl IwahoriCell {
    pub fn representative(&self, field: &LocalField) -> GL2Elem {
        match *self {
            IwahoriCell::Torus(r) => GL2Elem::torus(field, r),
            IwahoriCell::Flip(r) => GL2Elem::torus(field, r).mul(&GL2Elem::w()),
        }
    }

    /// Volume when `vol(K) = 1`: `q^len / (q + 1)`.
    pub fn volume(&self, q: u64) -> BigRational {
        let len = match *self {
            IwahoriCell::Torus(r) => r.abs(),
            IwahoriCell::Flip(r) => (r + 1).abs(),
        };
        rat(q as i64).pow(len as i32) / rat(q as i64 + 1)
    }

    /// The Cartan shell containing the cell.
    pub fn shell(&self) -> u32 {
        match *self {
            IwahoriCell::Torus(r) | IwahoriCell::Flip(r) => r.unsigned_abs() as u32,
        }
    }

    /// Classifies `g` by the Cartan types of `g`, `E^-1 g`, `g E`, `E^-1 g E`
    /// with `E = diag(1, p)`. These are invariant under `I x I` and separate
    /// the cells.
    pub fn classify(g: &GL2Elem, field: &LocalField) -> IwahoriCell {
        let sig = signature(g, field);
        let n = sig[0];
        let mut found = None;
        for r in -n - 1..=n + 1 {
            for cell in [IwahoriCell::Torus(r), IwahoriCell::Flip(r)] {
                if cell.shell() as i64 == n && signature(&cell.representative(field), field) == sig {
                    assert!(found.is_none(), "cell signature is ambiguous");
                    found = Some(cell);
                }
            }
        }
        found.expect("every element lies in some cell")
    }
}

/// Cell lookup by signature with the representatives of all shells up to a
/// bound precomputed.
#[derive(Clone, Debug)]
pub struct CellIndex {
    field: LocalField,
    max_shell: u32,
    map: HashMap<[i64; 4], IwahoriCell>,
}

impl CellIndex {
    pub fn new(field: &LocalField, max_shell: u32) -> Self {
        let mut map = HashMap::new();
        for n in 0..=max_shell {
            for cell in iwahori_cells_of_shell(n) {
                let prev = map.insert(signature(&cell.representative(field), field), cell);
                assert!(prev.is_none(), "cell signature is ambiguous");
            }
        }
        CellIndex {
            field: *field,
            max_shell,
            map,
        }
    }

    pub fn max_shell(&self) -> u32 {
        self.max_shell
    }

    pub fn classify(&self, g: &GL2Elem) -> IwahoriCell {
        let sig = signature(g, &self.field);
        match self.map.get(&sig) {
            Some(c) => *c,
            None => IwahoriCell::classify(g, &self.field),
        }
    }
}

fn signature(g: &GL2Elem, field: &LocalField) -> [i64; 4] {
    let p = field.p();
    let e = GL2Elem::level_shift(field);
    let ei = e.inv();
    [
        cartan_type(g, p),
        cartan_type(&ei.mul(g), p),
        cartan_type(&g.mul(&e), p),
        cartan_type(&ei.mul(g).mul(&e), p),
    ]
}

/// The Iwahori cells making up the Cartan shell `K a(p^n) K`.
pub fn iwahori_cells_of_shell(n: u32) -> Vec<IwahoriCell> {
    let n = n as i64;
    if n == 0 {
        vec![IwahoriCell::Torus(0), IwahoriCell::Flip(0)]
    } else {
        vec![
            IwahoriCell::Torus(n),
            IwahoriCell::Torus(-n),
            IwahoriCell::Flip(n),
            IwahoriCell::Flip(-n),
        ]
    }
}
