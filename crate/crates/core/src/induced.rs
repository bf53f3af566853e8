//! The induced model: sections `f(bk) = chi1(A) chi2(D) |A/D|^(1/2) f(k)`
//! stored by their restriction to `K`, on `P^1(Z/p^m)`.
//!
//! Values are kept in the formal ring `S[alpha]` (see [`QuadRing`]). For the
//! Steinberg representation the formal parameter is later specialized to
//! `alpha = eps q^(-1/2)`, where the new vector spans the kernel of the
//! `K`-average.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::numerics::{Ctx, NumericsError, Quad, QuadRing, Scalar};
use crate::padic::{
    hecke_cosets, iwasawa, valuation, GL2Elem, LocalField, PadicError, ProjectiveLine,
};
use crate::repn::{ReprDescriptor, ReprError, ReprKind, Satake};
use crate::whittaker::WhittakerNorm;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InducedError {
    #[error("operation needs an unramified representation")]
    NotUnramified,
    #[error("vector is not invariant under the Iwahori subgroup")]
    NotIwahoriInvariant,
    #[error("basis is degenerate: kappa^2 = 1")]
    DegenerateBasis,
    #[error("value depends on the choice of Satake root")]
    NotProjectable,
    #[error("vectors belong to different models")]
    ModelMismatch,
    #[error("Atkin-Lehner image is not a multiple of the vector")]
    NotAnEigenvector,
    #[error(transparent)]
    Repr(#[from] ReprError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A representation realized in its induced model over the backend `C`.
#[derive(Clone, Debug)]
pub struct Model<C: Ctx> {
    repr: ReprDescriptor,
    ring: QuadRing<C>,
    field: LocalField,
    root: Option<C::S>,
    norm: WhittakerNorm<C::S>,
}

/// A section of level `m`, with `values[i]` its value at the `i`-th point of
/// `P^1(Z/p^m)`. `sq`, when present, is the square of a positive factor the
/// vector is implicitly multiplied by.
#[derive(Clone, Debug)]
pub struct InducedVector<S: Scalar> {
    level: u32,
    values: Vec<Quad<S>>,
    sq: Option<S>,
}

impl<S: Scalar> InducedVector<S> {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[Quad<S>] {
        &self.values
    }

    pub fn scale_sq(&self) -> Option<&S> {
        self.sq.as_ref()
    }

    /// The vector without its implicit factor, and the square of that factor.
    pub fn split_scale(&self) -> (InducedVector<S>, Option<S>) {
        let raw = InducedVector {
            level: self.level,
            values: self.values.clone(),
            sq: None,
        };
        (raw, self.sq.clone())
    }
}

/// `coeff * sqrt(radicand)` with a positive radicand.
#[derive(Clone, Debug)]
pub struct Surd<S: Scalar> {
    pub coeff: S,
    pub radicand: S,
}

impl<S: Scalar> Surd<S> {
    /// The value when the radicand is a known square.
    pub fn value(&self, one: &S) -> Option<S> {
        (self.radicand.same(one) || self.coeff.is_zero()).then(|| self.coeff.clone())
    }

    pub fn abs_sq(&self) -> S {
        self.coeff.mul(&self.coeff.conj()).mul(&self.radicand)
    }
}

/// `e` with `g^-1 K(p^m) g ⊇ K(p^(m+e))`.
fn level_growth(g: &GL2Elem, p: u64) -> u32 {
    let e = -g.min_valuation(p) - g.inv().min_valuation(p);
    e.max(0) as u32
}

impl<C: Ctx> Model<C> {
    pub fn new(repr: &ReprDescriptor, ctx: C) -> Result<Self, InducedError> {
        let field = repr.field()?;
        let mut lambda = repr.lambda_in(&ctx)?;
        let root = match repr.kind() {
            ReprKind::Steinberg { twist } => {
                Some(ctx.int(*twist).mul(&ctx.q_half_power(-1)))
            }
            ReprKind::Unramified(Satake::Approx(a)) => {
                // conj is taken as alpha^-1 on the unit circle and as the
                // identity otherwise; widen the root by the distance to that locus
                let off = if repr.unit_circle() {
                    let n2 = a.re() * a.re() + a.im() * a.im() - BigRational::one();
                    n2.abs().to_f64().expect("finite") + a.err()
                } else {
                    a.im_f64().abs()
                };
                let a = ctx
                    .from_approx(&a.clone().with_extra_error(2.0 * off))
                    .ok_or(ReprError::MixedBackends)?;
                lambda = a.add(&a.inv()?);
                Some(a)
            }
            ReprKind::Unramified(_) => None,
        };
        let ring = QuadRing::new(ctx, lambda, repr.unit_circle());
        let mut model = Model {
            repr: repr.clone(),
            ring,
            field,
            root,
            norm: WhittakerNorm::placeholder(),
        };
        model.norm = WhittakerNorm::compute(&model)?;
        Ok(model)
    }

    pub fn repr(&self) -> &ReprDescriptor {
        &self.repr
    }

    pub fn ctx(&self) -> &C {
        &self.ring.ctx
    }

    pub fn ring(&self) -> &QuadRing<C> {
        &self.ring
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub(crate) fn norm(&self) -> &WhittakerNorm<C::S> {
        &self.norm
    }

    /// The value of a formal expression: specialized at the root when one is
    /// fixed, otherwise required to be independent of the root.
    pub fn realize(&self, x: &Quad<C::S>) -> Result<C::S, InducedError> {
        match &self.root {
            Some(a) => Ok(self.ring.specialize(x, a)),
            None => self.ring.project(x).ok_or(InducedError::NotProjectable),
        }
    }

    /// Specializes at the root when one is fixed, so that equalities
    /// holding only at the root are seen by comparisons.
    fn settle(&self, x: Quad<C::S>) -> Quad<C::S> {
        match &self.root {
            Some(a) => self.ring.scalar(self.ring.specialize(&x, a)),
            None => x,
        }
    }

    fn line(&self, m: u32) -> ProjectiveLine {
        ProjectiveLine::new(self.p(), m)
    }

    fn from_fn(&self, m: u32, f: impl Fn(&crate::padic::P1Point) -> Quad<C::S>) -> InducedVector<C::S> {
        InducedVector {
            level: m,
            values: self.line(m).points().iter().map(|pt| self.settle(f(pt))).collect(),
            sq: None,
        }
    }

    /// The constant section `1`.
    pub fn spherical_vector(&self) -> Result<InducedVector<C::S>, InducedError> {
        if self.repr.is_steinberg() {
            return Err(InducedError::NotUnramified);
        }
        Ok(self.from_fn(0, |_| self.ring.one()))
    }

    /// `1` on the Iwahori cell and `-1/q` on the `q` other points of `P^1(F_p)`.
    pub fn steinberg_new_vector(&self) -> Result<InducedVector<C::S>, InducedError> {
        if !self.repr.is_steinberg() {
            return Err(ReprError::Unsupported("new vector of level one needs Steinberg".into()).into());
        }
        let line = self.line(1);
        let minus = self.ctx().q_half_power(-2).neg();
        Ok(self.from_fn(1, |pt| {
            if line.in_iwahori_cell(*pt) {
                self.ring.one()
            } else {
                self.ring.scalar(minus.clone())
            }
        }))
    }

    /// The normalized new vector of the representation.
    pub fn new_vector(&self) -> Result<InducedVector<C::S>, InducedError> {
        if self.repr.is_steinberg() {
            self.steinberg_new_vector()
        } else {
            self.spherical_vector()
        }
    }

    /// Value of the section at an arbitrary `g`.
    pub fn value_at(&self, v: &InducedVector<C::S>, g: &GL2Elem) -> Quad<C::S> {
        let iw = iwasawa(g, &self.field);
        let (a, d) = iw.diagonal();
        let p = self.p();
        let shift = valuation(&a, p).expect("unit") - valuation(&d, p).expect("unit");
        let chi = self
            .ring
            .scale(&self.ring.alpha_pow(shift), &self.ctx().q_half_power(-shift));
        let line = self.line(v.level);
        let idx = line.index(line.point_of(&iw.k));
        self.settle(self.ring.mul(&chi, &v.values[idx]))
    }

    /// Lowers the level while the values are constant on the fibers.
    fn reduce(&self, mut v: InducedVector<C::S>) -> InducedVector<C::S> {
        while v.level > 0 {
            let fine = self.line(v.level);
            let coarse = self.line(v.level - 1);
            let mut slots: Vec<Option<Quad<C::S>>> = vec![None; coarse.len()];
            let mut ok = true;
            for (pt, val) in fine.points().iter().zip(&v.values) {
                let j = coarse.index(fine.parent(*pt));
                match &slots[j] {
                    None => slots[j] = Some(val.clone()),
                    Some(prev) if self.ring.same(prev, val) => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            v = InducedVector {
                level: v.level - 1,
                values: slots.into_iter().map(|s| s.expect("surjective")).collect(),
                sq: v.sq,
            };
        }
        v
    }

    fn raise(&self, v: &InducedVector<C::S>, m: u32) -> InducedVector<C::S> {
        if m <= v.level {
            return v.clone();
        }
        let fine = self.line(m);
        let coarse = self.line(v.level);
        let values = fine
            .points()
            .iter()
            .map(|pt| v.values[coarse.index(coarse.point_of(&fine.lift(*pt)))].clone())
            .collect();
        InducedVector {
            level: m,
            values,
            sq: v.sq.clone(),
        }
    }

    /// `x -> v(x g)`.
    pub fn translate(&self, v: &InducedVector<C::S>, g: &GL2Elem) -> InducedVector<C::S> {
        let m = v.level + level_growth(g, self.p());
        let line = self.line(m);
        let values = line
            .points()
            .iter()
            .map(|pt| self.value_at(v, &line.lift(*pt).mul(g)))
            .collect();
        self.reduce(InducedVector {
            level: m,
            values,
            sq: v.sq.clone(),
        })
    }

    fn check_sq(&self, v: &InducedVector<C::S>, w: &InducedVector<C::S>) -> Result<(), InducedError> {
        match (&v.sq, &w.sq) {
            (None, None) => Ok(()),
            (Some(a), Some(b)) if a.same(b) => Ok(()),
            _ => Err(InducedError::ModelMismatch),
        }
    }

    /// `a v + b w` for scalars in the formal ring.
    pub fn combine(
        &self,
        a: &Quad<C::S>,
        v: &InducedVector<C::S>,
        b: &Quad<C::S>,
        w: &InducedVector<C::S>,
    ) -> Result<InducedVector<C::S>, InducedError> {
        self.check_sq(v, w)?;
        let m = v.level.max(w.level);
        let (v2, w2) = (self.raise(v, m), self.raise(w, m));
        let values = v2
            .values
            .iter()
            .zip(&w2.values)
            .map(|(x, y)| self.settle(self.ring.add(&self.ring.mul(a, x), &self.ring.mul(b, y))))
            .collect();
        Ok(self.reduce(InducedVector {
            level: m,
            values,
            sq: v.sq.clone(),
        }))
    }

    pub fn add(
        &self,
        v: &InducedVector<C::S>,
        w: &InducedVector<C::S>,
    ) -> Result<InducedVector<C::S>, InducedError> {
        self.combine(&self.ring.one(), v, &self.ring.one(), w)
    }

    pub fn scale(&self, v: &InducedVector<C::S>, s: &C::S) -> InducedVector<C::S> {
        self.reduce(InducedVector {
            level: v.level,
            values: v.values.iter().map(|x| self.settle(self.ring.scale(x, s))).collect(),
            sq: v.sq.clone(),
        })
    }

    /// Records an implicit factor `sqrt(sq)`.
    pub fn with_scale_sq(&self, v: &InducedVector<C::S>, sq: C::S) -> InducedVector<C::S> {
        InducedVector {
            sq: Some(sq),
            ..v.clone()
        }
    }

    pub fn same(&self, v: &InducedVector<C::S>, w: &InducedVector<C::S>) -> bool {
        let m = v.level.max(w.level);
        let (v2, w2) = (self.raise(v, m), self.raise(w, m));
        self.check_sq(v, w).is_ok()
            && v2.values.iter().zip(&w2.values).all(|(x, y)| self.ring.same(x, y))
    }

    /// `w = c v` for a scalar `c`, if one exists.
    pub fn proportion(
        &self,
        w: &InducedVector<C::S>,
        v: &InducedVector<C::S>,
    ) -> Result<Option<C::S>, InducedError> {
        let m = v.level.max(w.level);
        let (v2, w2) = (self.raise(v, m), self.raise(w, m));
        let Some(i) = v2.values.iter().position(|x| !self.ring.is_zero(x)) else {
            return Ok(None);
        };
        let ratio = self.ring.mul(&w2.values[i], &self.ring.inv(&v2.values[i])?);
        let c = self.realize(&ratio)?;
        let cv = self.scale(&v2, &c);
        Ok(self.same(&cv, w).then_some(c))
    }

    /// `q^(-1/2) sum_h v(x h)` over the `p + 1` cosets of `K a(p) K`.
    pub fn hecke_apply(&self, v: &InducedVector<C::S>) -> Result<InducedVector<C::S>, InducedError> {
        let mut acc: Option<InducedVector<C::S>> = None;
        for h in hecke_cosets(&self.field) {
            let t = self.translate(v, &h);
            acc = Some(match acc {
                None => t,
                Some(a) => self.add(&a, &t)?,
            });
        }
        Ok(self.scale(&acc.expect("p + 1 cosets"), &self.ctx().q_half_power(-1)))
    }

    pub fn is_iwahori_invariant(&self, v: &InducedVector<C::S>) -> bool {
        let v = self.reduce(v.clone());
        match v.level {
            0 => true,
            1 => {
                let line = self.line(1);
                let mut off = line
                    .points()
                    .into_iter()
                    .zip(&v.values)
                    .filter(|(pt, _)| !line.in_iwahori_cell(*pt))
                    .map(|(_, x)| x);
                let first = off.next().expect("q >= 1 points off the cell");
                off.all(|x| self.ring.same(x, first))
            }
            _ => false,
        }
    }

    /// Values `(f0, f1)` on the Iwahori cell and off it.
    pub fn iwahori_values(
        &self,
        v: &InducedVector<C::S>,
    ) -> Result<(Quad<C::S>, Quad<C::S>), InducedError> {
        if !self.is_iwahori_invariant(v) {
            return Err(InducedError::NotIwahoriInvariant);
        }
        let v = self.raise(&self.reduce(v.clone()), 1);
        let line = self.line(1);
        let pts = line.points();
        let on = pts.iter().position(|pt| line.in_iwahori_cell(*pt)).expect("cell point");
        let off = pts.iter().position(|pt| !line.in_iwahori_cell(*pt)).expect("off point");
        Ok((v.values[on].clone(), v.values[off].clone()))
    }

    /// Translation by `[[0, -1], [p, 0]]`, for Iwahori-invariant vectors.
    pub fn atkin_lehner_apply(
        &self,
        v: &InducedVector<C::S>,
    ) -> Result<InducedVector<C::S>, InducedError> {
        if !self.is_iwahori_invariant(v) {
            return Err(InducedError::NotIwahoriInvariant);
        }
        Ok(self.translate(v, &GL2Elem::atkin_lehner(&self.field)))
    }

    /// `v` translated by `diag(1, p)`.
    pub fn level_raise(&self, v: &InducedVector<C::S>) -> InducedVector<C::S> {
        self.translate(v, &GL2Elem::level_shift(&self.field))
    }

    /// `int_K v conj(w) dk` with `vol(K) = 1`. An invariant product only for
    /// unitarily induced data, i.e. tempered unramified representations.
    pub fn k_integral_inner(
        &self,
        v: &InducedVector<C::S>,
        w: &InducedVector<C::S>,
    ) -> Result<C::S, InducedError> {
        let m = v.level.max(w.level);
        let (v2, w2) = (self.raise(v, m), self.raise(w, m));
        let mut acc = self.ring.zero();
        for (x, y) in v2.values.iter().zip(&w2.values) {
            acc = self.ring.add(&acc, &self.ring.mul(x, &self.ring.conj(y)));
        }
        let n = self.ctx().int(v2.values.len() as i64);
        let total = self.realize(&acc)?.div(&n)?;
        Ok(total.mul(&self.sq_factor(v, w)?.unwrap_or_else(|| self.ctx().one())))
    }

    /// `sqrt(sq_v sq_w)` when it is known exactly.
    fn sq_factor(
        &self,
        v: &InducedVector<C::S>,
        w: &InducedVector<C::S>,
    ) -> Result<Option<C::S>, InducedError> {
        match (&v.sq, &w.sq) {
            (None, None) => Ok(None),
            (Some(a), Some(b)) if a.same(b) => Ok(Some(a.clone())),
            _ => Err(InducedError::ModelMismatch),
        }
    }

    /// The invariant product transported from the Whittaker model.
    pub fn inner_product(
        &self,
        v: &InducedVector<C::S>,
        w: &InducedVector<C::S>,
    ) -> Result<Surd<C::S>, InducedError> {
        let raw = self.theta_inner(v, w)?;
        let one = self.ctx().one();
        let sv = v.sq.clone().unwrap_or_else(|| one.clone());
        let sw = w.sq.clone().unwrap_or_else(|| one.clone());
        if sv.same(&sw) {
            Ok(Surd {
                coeff: raw.mul(&sv),
                radicand: one,
            })
        } else {
            Ok(Surd {
                coeff: raw,
                radicand: sv.mul(&sw),
            })
        }
    }

    /// An orthonormal basis of the `K_0(p)`-fixed vectors.
    pub fn k0_basis(&self) -> Result<Vec<InducedVector<C::S>>, InducedError> {
        if self.repr.is_steinberg() {
            return Ok(vec![self.steinberg_new_vector()?]);
        }
        let phi = self.spherical_vector()?;
        let phim = self.level_raise(&phi);
        let kappa = crate::periods::kappa_pi_in(self.ctx(), &self.repr.lambda_in(self.ctx())?);
        let vs = self.ctx().one().sub(&kappa.mul(&kappa));
        if vs.is_zero() {
            return Err(InducedError::DegenerateBasis);
        }
        let second = self.combine(
            &self.ring.one(),
            &phim,
            &self.ring.scalar(kappa.neg()),
            &phi,
        )?;
        let second = self.with_scale_sq(&second, vs.inv()?);
        Ok(vec![phi, second])
    }
}

/// The Atkin-Lehner eigenvalue of the Steinberg new vector, read off from the
/// model.
pub fn steinberg_atkin_lehner_sign(r: &ReprDescriptor) -> Result<i64, InducedError> {
    if !r.is_steinberg() {
        return Err(ReprError::Unsupported("Atkin-Lehner sign of an unramified vector".into()).into());
    }
    let ctx = crate::numerics::ExactCtx::new(r.q());
    let model = Model::new(r, ctx)?;
    let v = model.steinberg_new_vector()?;
    let t = model.atkin_lehner_apply(&v)?;
    let c = model.proportion(&t, &v)?.ok_or(InducedError::NotAnEigenvector)?;
    let one = crate::numerics::ExactScalar::one(r.q());
    if c == one {
        Ok(1)
    } else if c == -one {
        Ok(-1)
    } else {
        Err(InducedError::NotAnEigenvector)
    }
}
