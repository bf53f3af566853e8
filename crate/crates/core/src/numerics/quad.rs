//! Values polynomial in a Satake parameter `alpha` that is known only through
//! `lambda = alpha + 1/alpha`: the ring `S[alpha] / (alpha^2 - lambda alpha + 1)`.

use super::scalar::{Ctx, Scalar};
use super::NumericsError;

/// `u + v*alpha`.
#[derive(Clone, Debug)]
pub struct Quad<S: Scalar> {
    pub u: S,
    pub v: S,
}

/// The ring determined by `lambda`, together with how complex conjugation acts
/// on `alpha`: on the unit circle `conj(alpha) = 1/alpha`, on the real line it
/// is fixed.
#[derive(Clone, Debug)]
pub struct QuadRing<C: Ctx> {
    pub ctx: C,
    pub lambda: C::S,
    pub unit_circle: bool,
}

impl<C: Ctx> QuadRing<C> {
    pub fn new(ctx: C, lambda: C::S, unit_circle: bool) -> Self {
        QuadRing {
            ctx,
            lambda,
            unit_circle,
        }
    }

    pub fn scalar(&self, s: C::S) -> Quad<C::S> {
        Quad {
            u: s,
            v: self.ctx.zero(),
        }
    }

    pub fn zero(&self) -> Quad<C::S> {
        self.scalar(self.ctx.zero())
    }

    pub fn one(&self) -> Quad<C::S> {
        self.scalar(self.ctx.one())
    }

    pub fn alpha(&self) -> Quad<C::S> {
        Quad {
            u: self.ctx.zero(),
            v: self.ctx.one(),
        }
    }

    /// `1/alpha = lambda - alpha`.
    pub fn alpha_inv(&self) -> Quad<C::S> {
        Quad {
            u: self.lambda.clone(),
            v: self.ctx.one().neg(),
        }
    }

    pub fn add(&self, a: &Quad<C::S>, b: &Quad<C::S>) -> Quad<C::S> {
        Quad {
            u: a.u.add(&b.u),
            v: a.v.add(&b.v),
        }
    }

    pub fn sub(&self, a: &Quad<C::S>, b: &Quad<C::S>) -> Quad<C::S> {
        Quad {
            u: a.u.sub(&b.u),
            v: a.v.sub(&b.v),
        }
    }

    pub fn neg(&self, a: &Quad<C::S>) -> Quad<C::S> {
        Quad {
            u: a.u.neg(),
            v: a.v.neg(),
        }
    }

    pub fn scale(&self, a: &Quad<C::S>, s: &C::S) -> Quad<C::S> {
        Quad {
            u: a.u.mul(s),
            v: a.v.mul(s),
        }
    }

    pub fn mul(&self, a: &Quad<C::S>, b: &Quad<C::S>) -> Quad<C::S> {
        // alpha^2 = lambda alpha - 1
        let vv = a.v.mul(&b.v);
        Quad {
            u: a.u.mul(&b.u).sub(&vv),
            v: a.u.mul(&b.v).add(&a.v.mul(&b.u)).add(&vv.mul(&self.lambda)),
        }
    }

    /// The other root: `alpha -> 1/alpha`.
    pub fn galois(&self, a: &Quad<C::S>) -> Quad<C::S> {
        Quad {
            u: a.u.add(&a.v.mul(&self.lambda)),
            v: a.v.neg(),
        }
    }

    pub fn norm(&self, a: &Quad<C::S>) -> C::S {
        a.u.mul(&a.u)
            .add(&self.lambda.mul(&a.u).mul(&a.v))
            .add(&a.v.mul(&a.v))
    }

    pub fn inv(&self, a: &Quad<C::S>) -> Result<Quad<C::S>, NumericsError> {
        let n = self.norm(a).inv()?;
        Ok(self.scale(&self.galois(a), &n))
    }

    pub fn conj(&self, a: &Quad<C::S>) -> Quad<C::S> {
        let c = Quad {
            u: a.u.conj(),
            v: a.v.conj(),
        };
        if self.unit_circle {
            self.galois(&c)
        } else {
            c
        }
    }

    /// `alpha^k` for any integer `k`.
    pub fn alpha_pow(&self, k: i64) -> Quad<C::S> {
        let base = if k >= 0 { self.alpha() } else { self.alpha_inv() };
        (0..k.unsigned_abs()).fold(self.one(), |acc, _| self.mul(&acc, &base))
    }

    pub fn same(&self, a: &Quad<C::S>, b: &Quad<C::S>) -> bool {
        a.u.same(&b.u) && a.v.same(&b.v)
    }

    pub fn is_zero(&self, a: &Quad<C::S>) -> bool {
        a.u.is_zero() && a.v.is_zero()
    }

    /// The value if it does not depend on the choice of root.
    pub fn project(&self, a: &Quad<C::S>) -> Option<C::S> {
        a.v.same(&self.ctx.zero()).then(|| a.u.clone())
    }

    /// Image under `alpha -> root`, for a root of `x^2 - lambda x + 1`.
    pub fn specialize(&self, a: &Quad<C::S>, root: &C::S) -> C::S {
        a.u.add(&a.v.mul(root))
    }
}
