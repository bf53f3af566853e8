//! Whittaker functions through the Jacquet integral
//! `W(g) = C int f(w n(x) g) psi(-x) dx`, with `psi` of conductor zero.
//!
//! Values at `a(p^r)` are elements of `Q(zeta_(p^N))` over the scalar field.
//! They are carried as group-ring elements `sum_j c_j [j]`, where `[j]` stands
//! for `exp(2 pi i j / p^N)`. The unit integral `int W1(a(u y)) conj W2(a(u y)) du`
//! acts on such elements through Ramanujan sums, so inner products never
//! leave the scalar field.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::induced::{InducedError, InducedVector, Model};
use crate::numerics::series::product_recurrence;
use crate::numerics::{ApproxScalar, Ctx, EventualSeq, Quad, Scalar};
use crate::padic::{iwasawa, reduce_mod, valuation, GL2Elem};
use crate::repn::{adjoint_l_at_1_in, local_zeta, ReprKind};

/// Constants turning Jacquet integrals into normalized Whittaker functions.
#[derive(Clone, Debug)]
pub(crate) enum WhittakerNorm<S: Scalar> {
    Pending,
    Ready {
        /// Multiplier of the raw integral, formal in `alpha` when unramified.
        c: Quad<S>,
        /// `zeta(2) / (zeta(1) L(Ad, 1))` times the square of the extra scale.
        theta: S,
        /// Square of the scale making the new vector a unit vector while
        /// `W(1) = 1` before scaling.
        scale_sq: S,
    },
}

/// A value `sum_j coeffs[j] exp(2 pi i j / p^n)` in the power basis of the
/// cyclotomic field, `j < phi(p^n)`.
#[derive(Clone, Debug)]
pub struct CycloValue<S: Scalar> {
    pub p: u64,
    pub n: u32,
    pub coeffs: Vec<S>,
}

impl<S: Scalar> CycloValue<S> {
    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    /// The value when it lies in the scalar field.
    pub fn scalar(&self) -> Option<S> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    pub fn to_approx(&self, prec: u32) -> ApproxScalar {
        let modulus = self.p.pow(self.n) as f64;
        let mut acc = ApproxScalar::zero(prec);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = 2.0 * std::f64::consts::PI * j as f64 / modulus;
            let z = ApproxScalar::from_f64(t.cos(), t.sin(), 4.0 * f64::EPSILON, prec);
            acc = acc.add(&c.to_approx(prec).mul(&z));
        }
        acc
    }
}

/// Data for an Iwahori-invariant vector: `A_r = W(a(p^r))` and
/// `B_r = W(a(p^r) w)`, both supported on `r >= -1`.
#[derive(Clone, Debug)]
pub struct IwahoriWhittaker<S: Scalar> {
    pub a: EventualSeq<S>,
    pub b: EventualSeq<S>,
}

fn pow_u64(p: u64, n: u32) -> u64 {
    p.checked_pow(n).expect("modulus fits in u64")
}

impl<S: Scalar> WhittakerNorm<S> {
    pub(crate) fn placeholder() -> Self {
        WhittakerNorm::Pending
    }

    fn ready(&self) -> (&Quad<S>, &S, &S) {
        match self {
            WhittakerNorm::Ready { c, theta, scale_sq } => (c, theta, scale_sq),
            WhittakerNorm::Pending => panic!("Whittaker normalization not yet computed"),
        }
    }

    pub(crate) fn compute<C: Ctx<S = S>>(model: &Model<C>) -> Result<Self, InducedError> {
        let ring = model.ring();
        let ctx = model.ctx();
        let v = model.new_vector()?;
        let raw = collapse(ctx, model.p(), &raw_torus(model, &v, 0, 1), ring);
        let repr = model.repr();
        let c0 = local_zeta(ctx, 2).div(&local_zeta(ctx, 1).mul(&adjoint_l_at_1_in(repr, ctx)?))?;
        Ok(match repr.kind() {
            ReprKind::Steinberg { .. } => {
                let w1 = model.realize(&raw)?;
                let scale_sq = local_zeta(ctx, 1).div(&local_zeta(ctx, 2))?;
                WhittakerNorm::Ready {
                    c: ring.scalar(w1.inv()?),
                    theta: c0.mul(&scale_sq),
                    scale_sq,
                }
            }
            ReprKind::Unramified(_) => WhittakerNorm::Ready {
                c: ring.inv(&raw)?,
                theta: c0,
                scale_sq: ctx.one(),
            },
        })
    }
}

/// `avg_u sigma_u(x)` for the Galois action `[j] -> [u j]`, through
/// `avg_u exp(2 pi i u d / p^n)` = 1, `-1/(p-1)` or 0 according to `v_p(d)`.
fn collapse<C: Ctx>(ctx: &C, p: u64, x: &[Quad<C::S>], ring: &crate::numerics::QuadRing<C>) -> Quad<C::S> {
    let len = x.len() as u64;
    if len == 1 {
        return x[0].clone();
    }
    let sub = len / p;
    let minus = ctx.int(-1).div(&ctx.int(p as i64 - 1)).expect("p > 1");
    let mut acc = x[0].clone();
    for t in 1..p {
        let j = (t * sub) as usize;
        acc = ring.add(&acc, &ring.scale(&x[j], &minus));
    }
    acc
}

/// `int_(Z_p^x) X(a(u y)) conj Y(a(u y)) d^x u` for group-ring values
/// of the same modulus.
fn contract<C: Ctx>(
    ctx: &C,
    p: u64,
    x: &[Quad<C::S>],
    y: &[Quad<C::S>],
    ring: &crate::numerics::QuadRing<C>,
) -> Quad<C::S> {
    let len = x.len();
    if len == 1 {
        return ring.mul(&x[0], &ring.conj(&y[0]));
    }
    let sub = len / p as usize;
    let pm1 = ctx.int(p as i64 - 1);
    let diag_w = ctx.int(p as i64).div(&pm1).expect("p > 1");
    let cross_w = ctx.one().div(&pm1).expect("p > 1");
    let mut acc = ring.zero();
    for c in 0..sub {
        let mut diag = ring.zero();
        let mut sx = ring.zero();
        let mut sy = ring.zero();
        for t in 0..p as usize {
            let j = c + t * sub;
            let yc = ring.conj(&y[j]);
            diag = ring.add(&diag, &ring.mul(&x[j], &yc));
            sx = ring.add(&sx, &x[j]);
            sy = ring.add(&sy, &yc);
        }
        acc = ring.add(&acc, &ring.scale(&diag, &diag_w));
        acc = ring.sub(&acc, &ring.scale(&ring.mul(&sx, &sy), &cross_w));
    }
    acc
}

/// The raw Jacquet integral at `a(p^r)` as a group-ring element modulo `p^n`.
///
/// On the shell `v(x) = s` the integrand depends on `x / p^s` modulo
/// `p^k` with `k = max(0, m - |r - s|)`. For `s <= -2` with `s + k < 0` the
/// additive character sums to zero over each fiber, so only `s >= -m` (and
/// `s >= -1` at level `m <= 1`) contribute. For `v(x) >= max(r + m, 0)` the
/// integrand is constant.
pub(crate) fn raw_torus<C: Ctx>(
    model: &Model<C>,
    v: &InducedVector<C::S>,
    r: i64,
    n: u32,
) -> Vec<Quad<C::S>> {
    let ring = model.ring();
    let ctx = model.ctx();
    let p = model.p();
    let m = v.level() as i64;
    assert!(n as i64 >= m.max(1), "modulus below the level");
    let modulus = pow_u64(p, n);
    let mut acc = vec![ring.zero(); modulus as usize];
    let field = model.field();
    let y = field.power(r);
    let s_lo = (-m).min(-1);
    let s_hi = (r + m).max(0);
    let point = |x: BigRational| {
        let g = GL2Elem::new(
            BigRational::from_integer(0.into()),
            BigRational::from_integer((-1).into()),
            y.clone(),
            x,
        )
        .expect("invertible");
        model.value_at(v, &g)
    };
    for s in s_lo..s_hi {
        let k = (m - (r - s).abs()).max(0);
        if s <= -2 && s + k < 0 {
            continue;
        }
        let ns = k.max(-s).max(0) as u32;
        if ns == 0 {
            let w = ctx.q_half_power(-2 * s).mul(&ctx.one().sub(&ctx.q_half_power(-2)));
            let val = point(field.power(s));
            acc[0] = ring.add(&acc[0], &ring.scale(&val, &w));
            continue;
        }
        let w = ctx.q_half_power(-2 * (s + ns as i64));
        let span = pow_u64(p, ns);
        for x0 in (1..span).filter(|x0| x0 % p != 0) {
            let x = field.power(s) * BigRational::from_integer(BigInt::from(x0));
            // psi(-x) = [j] with j = -x p^n mod p^n
            let j = reduce_mod(&(-&x * field.power(n as i64)), p, n)
                .to_u64()
                .expect("small index");
            let val = point(x);
            acc[j as usize] = ring.add(&acc[j as usize], &ring.scale(&val, &w));
        }
    }
    let tail = point(BigRational::from_integer(0.into()));
    acc[0] = ring.add(&acc[0], &ring.scale(&tail, &ctx.q_half_power(-2 * s_hi)));
    acc
}

/// Reduction of a group-ring element modulo `p^n` to the power basis of
/// `Q(zeta_(p^n))`, using `sum_t [j + t p^(n-1)] = 0`.
fn canonical<C: Ctx>(
    p: u64,
    n: u32,
    mut x: Vec<Quad<C::S>>,
    ring: &crate::numerics::QuadRing<C>,
) -> (u32, Vec<Quad<C::S>>) {
    if n == 0 {
        return (0, x);
    }
    let sub = pow_u64(p, n - 1) as usize;
    let phi = sub * (p as usize - 1);
    for j in phi..x.len() {
        let base = j - phi;
        let c = x[j].clone();
        for t in 0..p as usize - 1 {
            let i = base + t * sub;
            x[i] = ring.sub(&x[i], &c);
        }
    }
    x.truncate(phi);
    // drop to a smaller modulus while the support is on multiples of p
    let mut n = n;
    while n > 0 && x.iter().enumerate().all(|(j, c)| (j as u64).is_multiple_of(p) || ring.is_zero(c)) {
        if n == 1 {
            return (0, vec![x[0].clone()]);
        }
        x = x.iter().step_by(p as usize).cloned().collect();
        n -= 1;
    }
    (n, x)
}

impl<C: Ctx> Model<C> {
    fn theta_factor(&self) -> &C::S {
        self.norm().ready().1
    }

    /// Square of the scalar by which the normalized new vector's Whittaker
    /// function exceeds the one with `W(1) = 1`.
    pub fn whittaker_scale_sq(&self) -> &C::S {
        self.norm().ready().2
    }

    /// `W(a(p^s) w) = q^(-1/2)... ` recurrence of torus values of every vector
    /// past its level: `x^2 - (lambda / sqrt q) x + 1/q`, or `x - eps/q` on
    /// the Steinberg subrepresentation.
    pub fn torus_recurrence(&self) -> Vec<C::S> {
        let ctx = self.ctx();
        match self.repr().twist() {
            Some(eps) => vec![ctx.int(eps).mul(&ctx.q_half_power(-2))],
            None => vec![
                self.ring().lambda.mul(&ctx.q_half_power(-1)),
                ctx.q_half_power(-2).neg(),
            ],
        }
    }

    /// Normalized group-ring value of `W_v(a(p^r))` modulo `p^n`, before
    /// the Steinberg scale.
    pub fn torus_group_value(&self, v: &InducedVector<C::S>, r: i64, n: u32) -> Vec<Quad<C::S>> {
        let m = v.level() as i64;
        let len = pow_u64(self.p(), n) as usize;
        if r < -m {
            return vec![self.ring().zero(); len];
        }
        let c = self.norm().ready().0;
        raw_torus(self, v, r, n)
            .iter()
            .map(|x| self.ring().mul(c, x))
            .collect()
    }

    /// `W_v(g)` in the power basis of the smallest cyclotomic field holding
    /// it. For Steinberg the normalized function is `sqrt(whittaker_scale_sq)`
    /// times this value.
    pub fn evaluate(
        &self,
        v: &InducedVector<C::S>,
        g: &GL2Elem,
    ) -> Result<CycloValue<C::S>, InducedError> {
        let field = self.field();
        let p = self.p();
        let iw = iwasawa(g, field);
        let vk = self.translate(v, &iw.k);
        let vy = valuation(&iw.y, p).expect("invertible");
        let vx = valuation(&iw.x, p).unwrap_or(0);
        let n = (vk.level().max(1) as i64).max(-vx) as u32;
        let modulus = pow_u64(p, n);
        let base = self.torus_group_value(&vk, vy, n);
        let u = &iw.y / field.power(vy);
        let u = reduce_mod(&u, p, n).to_u64().expect("small unit");
        let shift = reduce_mod(&(&iw.x * field.power(n as i64)), p, n)
            .to_u64()
            .expect("small index");
        let mut out = vec![self.ring().zero(); modulus as usize];
        for (j, c) in base.iter().enumerate() {
            let t = ((j as u128 * u as u128 + shift as u128) % modulus as u128) as usize;
            out[t] = self.ring().add(&out[t], c);
        }
        let (n, coeffs) = canonical(p, n, out, self.ring());
        let coeffs = coeffs
            .iter()
            .map(|c| self.realize(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CycloValue { p, n, coeffs })
    }

    /// `W_v(a(p^r))` for a vector whose torus values do not depend on the
    /// unit part, such as Iwahori-invariant vectors.
    pub fn torus_value_at(&self, v: &InducedVector<C::S>, r: i64) -> Result<C::S, InducedError> {
        let n = v.level().max(1);
        let x = self.torus_group_value(v, r, n);
        self.realize(&collapse(self.ctx(), self.p(), &x, self.ring()))
    }

    /// `zeta(2) / (zeta(1) L(Ad, 1)) sum_r int W_v(a(u p^r)) conj W_w(a(u p^r)) d^x u`,
    /// without the implicit scales of the arguments.
    pub fn theta_inner(
        &self,
        v: &InducedVector<C::S>,
        w: &InducedVector<C::S>,
    ) -> Result<C::S, InducedError> {
        let ctx = self.ctx();
        let m = v.level().max(w.level()) as i64;
        let n = m.max(1) as u32;
        let rec = self.torus_recurrence();
        let conj_rec: Vec<C::S> = rec.iter().map(|c| c.conj()).collect();
        let prod = product_recurrence(ctx, &rec, &conj_rec);
        let mut head = Vec::new();
        for r in -m..m + prod.len() as i64 {
            let x = self.torus_group_value(v, r, n);
            let y = self.torus_group_value(w, r, n);
            head.push(self.realize(&contract(ctx, self.p(), &x, &y, self.ring()))?);
        }
        let total = EventualSeq::new(-m, head, prod).sum_all(ctx)?;
        Ok(total.mul(self.theta_factor()))
    }

    /// `A_r` and `B_r` of an Iwahori-invariant vector, as eventually
    /// recurrent sequences.
    pub fn iwahori_whittaker(
        &self,
        v: &InducedVector<C::S>,
    ) -> Result<IwahoriWhittaker<C::S>, InducedError> {
        if !self.is_iwahori_invariant(v) {
            return Err(InducedError::NotIwahoriInvariant);
        }
        let flipped = self.translate(v, &GL2Elem::w());
        let rec = self.torus_recurrence();
        let seq = |u: &InducedVector<C::S>| -> Result<EventualSeq<C::S>, InducedError> {
            let head = (-1..1 + rec.len() as i64)
                .map(|r| self.torus_value_at(u, r))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(EventualSeq::new(-1, head, rec.clone()))
        };
        Ok(IwahoriWhittaker {
            a: seq(v)?,
            b: seq(&flipped)?,
        })
    }

    /// `zeta(2) / (zeta(1) L(Ad, 1))`, times the Steinberg scale.
    pub fn theta_constant(&self) -> C::S {
        self.theta_factor().clone()
    }
}

/// Closed-form torus values of the normalized new vector, as
/// `coeff * sqrt(radicand)`:
/// `q^(-r/2) sum_(i+j=r) alpha^i alpha^-j` when unramified, and
/// `sqrt(zeta(1)/zeta(2)) (eps/q)^r` for Steinberg, both zero for `r < 0`.
pub fn torus_value<C: Ctx>(model: &Model<C>, r: i64) -> crate::induced::Surd<C::S> {
    let ctx = model.ctx();
    let one = ctx.one();
    if r < 0 {
        return crate::induced::Surd {
            coeff: ctx.zero(),
            radicand: one,
        };
    }
    match model.repr().twist() {
        Some(eps) => {
            let base = ctx.int(eps).mul(&ctx.q_half_power(-2));
            crate::induced::Surd {
                coeff: ctx.pow(&base, r as u32),
                radicand: model.whittaker_scale_sq().clone(),
            }
        }
        None => {
            let lambda = &model.ring().lambda;
            // h_r = lambda h_(r-1) - h_(r-2), h_0 = 1, h_(-1) = 0
            let (mut prev, mut cur) = (ctx.zero(), one.clone());
            for _ in 0..r {
                let next = lambda.mul(&cur).sub(&prev);
                prev = cur;
                cur = next;
            }
            crate::induced::Surd {
                coeff: cur.mul(&ctx.q_half_power(-r)),
                radicand: one,
            }
        }
    }
}
