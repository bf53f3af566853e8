//! Local representations with trivial central character: unramified principal
//! series and the two unramified twists of the Steinberg representation.

use num_rational::BigRational;
use num_traits::Zero;

use crate::numerics::exact::rat;
use crate::numerics::series::{charpoly, companion, kronecker};
use crate::numerics::{
    ApproxCtx, ApproxScalar, Ctx, ExactCtx, ExactScalar, Number, NumericsError, Scalar,
    DEFAULT_PRECISION,
};
use crate::padic::{LocalField, PadicError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReprError {
    #[error("the Steinberg representation has no spherical vector")]
    SteinbergHasNoSphericalEigenvalue,
    #[error("local factor has a pole at the evaluation point")]
    PoleAtEvaluationPoint,
    #[error("Satake parameter {0} fails the unitarity test")]
    NonUnitary(String),
    #[error("Steinberg twist must be +1 or -1, got {0}")]
    InvalidTwist(i64),
    #[error("exact and approximate Satake parameters in one computation")]
    MixedBackends,
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// The Satake parameter `alpha` of an unramified representation. The second
/// parameter is `1/alpha` and is never stored.
#[derive(Clone, Debug, PartialEq)]
pub enum Satake {
    /// A rational `alpha`.
    Rational(BigRational),
    /// Given through `lambda = alpha + 1/alpha` in `Q(sqrt q)`.
    Lambda(ExactScalar),
    /// A complex `alpha` known to finite precision.
    Approx(ApproxScalar),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReprKind {
    Unramified(Satake),
    /// Twist by the unramified character with `chi(p) = twist`.
    Steinberg { twist: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Approx,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReprDescriptor {
    kind: ReprKind,
    q: u64,
    non_unitary_override: bool,
    /// `alpha` on the unit circle (tempered) rather than on the real line.
    unit_circle: bool,
}

/// `n / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn whole(n: i64) -> Self {
        HalfInt(2 * n)
    }

    pub fn half() -> Self {
        HalfInt(1)
    }
}

fn bound_sq(q: u64) -> ExactScalar {
    // (q + 1)^2 / q
    ExactScalar::from_rational(rat((q as i64 + 1).pow(2)) / rat(q as i64), q)
}

/// Classifies a real `lambda`: `Some(true)` tempered, `Some(false)`
/// complementary series, `None` not unitary.
fn unitary_class(lambda: &ExactScalar) -> Option<bool> {
    let q = lambda.q();
    let two = ExactScalar::from_int(2, q);
    if lambda.abs() <= two {
        Some(true)
    } else if lambda * lambda < bound_sq(q) {
        Some(false)
    } else {
        None
    }
}

impl ReprDescriptor {
    fn checked(kind: ReprKind, q: u64, non_unitary_override: bool) -> Result<Self, ReprError> {
        if q < 2 {
            return Err(ReprError::Unsupported(format!("residue field size {}", q)));
        }
        let unit_circle = match &kind {
            ReprKind::Steinberg { twist } => {
                if *twist != 1 && *twist != -1 {
                    return Err(ReprError::InvalidTwist(*twist));
                }
                false
            }
            ReprKind::Unramified(Satake::Rational(a)) => {
                if a.is_zero() {
                    return Err(ReprError::NonUnitary("0".into()));
                }
                let lambda = ExactScalar::from_rational(a + a.recip(), q);
                Self::gate(&lambda, non_unitary_override, || a.to_string())?
            }
            ReprKind::Unramified(Satake::Lambda(l)) => {
                if l.q() != q {
                    return Err(NumericsError::FieldMismatch { left: l.q(), right: q }.into());
                }
                Self::gate(l, non_unitary_override, || format!("lambda = {}", l))?
            }
            ReprKind::Unramified(Satake::Approx(a)) => {
                let modulus = a.re_f64().hypot(a.im_f64());
                let tol = a.err() + 1e-12;
                if (modulus - 1.0).abs() <= tol {
                    true
                } else {
                    let real = a.im_f64().abs() <= tol;
                    let s = (q as f64).sqrt();
                    let ok = real && modulus > 1.0 / s + tol && modulus < s - tol;
                    if !ok && !non_unitary_override {
                        return Err(ReprError::NonUnitary(a.to_string()));
                    }
                    !real
                }
            }
        };
        Ok(ReprDescriptor {
            kind,
            q,
            non_unitary_override,
            unit_circle,
        })
    }

    fn gate(
        lambda: &ExactScalar,
        non_unitary_override: bool,
        show: impl Fn() -> String,
    ) -> Result<bool, ReprError> {
        match unitary_class(lambda) {
            Some(t) => Ok(t),
            None if non_unitary_override => {
                Ok(lambda.abs() <= ExactScalar::from_int(2, lambda.q()))
            }
            None => Err(ReprError::NonUnitary(show())),
        }
    }

    pub fn unramified(q: u64, alpha: BigRational) -> Result<Self, ReprError> {
        Self::checked(ReprKind::Unramified(Satake::Rational(alpha)), q, false)
    }

    /// Accepts parameters outside the unitary range. The flag travels with the
    /// descriptor into every report.
    pub fn unramified_override(q: u64, alpha: BigRational) -> Result<Self, ReprError> {
        Self::checked(ReprKind::Unramified(Satake::Rational(alpha)), q, true)
    }

    pub fn unramified_lambda(q: u64, lambda: ExactScalar) -> Result<Self, ReprError> {
        Self::checked(ReprKind::Unramified(Satake::Lambda(lambda)), q, false)
    }

    pub fn unramified_lambda_override(q: u64, lambda: ExactScalar) -> Result<Self, ReprError> {
        Self::checked(ReprKind::Unramified(Satake::Lambda(lambda)), q, true)
    }

    pub fn unramified_approx(q: u64, alpha: ApproxScalar) -> Result<Self, ReprError> {
        Self::checked(ReprKind::Unramified(Satake::Approx(alpha)), q, false)
    }

    pub fn unramified_approx_override(q: u64, alpha: ApproxScalar) -> Result<Self, ReprError> {
        Self::checked(ReprKind::Unramified(Satake::Approx(alpha)), q, true)
    }

    pub fn steinberg(q: u64, twist: i64) -> Result<Self, ReprError> {
        Self::checked(ReprKind::Steinberg { twist }, q, false)
    }

    pub fn kind(&self) -> &ReprKind {
        &self.kind
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn field(&self) -> Result<LocalField, ReprError> {
        Ok(LocalField::new(self.q)?)
    }

    pub fn non_unitary_override(&self) -> bool {
        self.non_unitary_override
    }

    pub fn unit_circle(&self) -> bool {
        self.unit_circle
    }

    pub fn is_steinberg(&self) -> bool {
        matches!(self.kind, ReprKind::Steinberg { .. })
    }

    pub fn twist(&self) -> Option<i64> {
        match self.kind {
            ReprKind::Steinberg { twist } => Some(twist),
            _ => None,
        }
    }

    pub fn conductor_exponent(&self) -> u32 {
        if self.is_steinberg() {
            1
        } else {
            0
        }
    }

    pub fn backend(&self) -> Backend {
        match self.kind {
            ReprKind::Unramified(Satake::Approx(_)) => Backend::Approx,
            _ => Backend::Exact,
        }
    }

    /// Whether the unitary gate passed without the override.
    pub fn is_unitary(&self) -> bool {
        match &self.kind {
            ReprKind::Steinberg { .. } => true,
            ReprKind::Unramified(Satake::Approx(_)) => !self.non_unitary_override || self.unit_circle,
            ReprKind::Unramified(_) => unitary_class(&self.exact_lambda().expect("exact")).is_some(),
        }
    }

    fn exact_lambda(&self) -> Option<ExactScalar> {
        match &self.kind {
            ReprKind::Unramified(Satake::Rational(a)) => {
                Some(ExactScalar::from_rational(a + a.recip(), self.q))
            }
            ReprKind::Unramified(Satake::Lambda(l)) => Some(l.clone()),
            ReprKind::Steinberg { twist } => {
                // eps (sqrt q + 1/sqrt q): the parameters of the inducing data
                let s = ExactScalar::sqrt_q(self.q);
                let t = ExactScalar::from_int(*twist, self.q);
                Some(&t * &(&s + &s.inv().expect("nonzero")))
            }
            ReprKind::Unramified(Satake::Approx(_)) => None,
        }
    }

    /// `alpha + 1/alpha`, for the Steinberg case of its inducing data.
    pub fn lambda_in<C: Ctx>(&self, ctx: &C) -> Result<C::S, ReprError> {
        if let Some(l) = self.exact_lambda() {
            return Ok(ctx.exact(&l));
        }
        match &self.kind {
            ReprKind::Unramified(Satake::Approx(a)) => {
                let a = ctx.from_approx(a).ok_or(ReprError::MixedBackends)?;
                Ok(a.add(&a.inv()?))
            }
            _ => unreachable!("exact parameters handled above"),
        }
    }
}

/// Chooses the backend shared by `reps`.
pub fn common_backend(reps: &[&ReprDescriptor]) -> Result<Backend, ReprError> {
    let mut it = reps.iter().map(|r| r.backend());
    let first = it.next().unwrap_or(Backend::Exact);
    if it.all(|b| b == first) {
        Ok(first)
    } else {
        Err(ReprError::MixedBackends)
    }
}

/// Runs `f` on the backend of `reps`, returning a backend-tagged value.
pub fn dispatch<F, G>(reps: &[&ReprDescriptor], q: u64, exact: F, approx: G) -> Result<Number, ReprError>
where
    F: FnOnce(&ExactCtx) -> Result<ExactScalar, ReprError>,
    G: FnOnce(&ApproxCtx) -> Result<ApproxScalar, ReprError>,
{
    match common_backend(reps)? {
        Backend::Exact => exact(&ExactCtx::new(q)).map(Number::Exact),
        Backend::Approx => approx(&ApproxCtx::new(q, DEFAULT_PRECISION)).map(Number::Approx),
    }
}

/// `zeta(s) = (1 - q^-s)^-1`.
pub fn local_zeta<C: Ctx>(ctx: &C, s: i64) -> C::S {
    ctx.one()
        .sub(&ctx.q_half_power(-2 * s))
        .inv()
        .expect("zeta has no pole at s != 0")
}

pub fn hecke_eigenvalue_in<C: Ctx>(r: &ReprDescriptor, ctx: &C) -> Result<C::S, ReprError> {
    if r.is_steinberg() {
        return Err(ReprError::SteinbergHasNoSphericalEigenvalue);
    }
    r.lambda_in(ctx)
}

pub fn hecke_eigenvalue(r: &ReprDescriptor) -> Result<Number, ReprError> {
    dispatch(&[r], r.q, |c| hecke_eigenvalue_in(r, c), |c| hecke_eigenvalue_in(r, c))
}

fn invert_factor<S: Scalar>(x: S) -> Result<S, ReprError> {
    if x.is_zero() {
        return Err(ReprError::PoleAtEvaluationPoint);
    }
    x.inv().map_err(|_| ReprError::PoleAtEvaluationPoint)
}

pub fn standard_l_in<C: Ctx>(r: &ReprDescriptor, ctx: &C, s: HalfInt) -> Result<C::S, ReprError> {
    let qs = ctx.q_half_power(-s.0);
    match r.kind {
        ReprKind::Steinberg { twist } => {
            let t = ctx.int(twist).mul(&ctx.q_half_power(-s.0 - 1));
            invert_factor(ctx.one().sub(&t))
        }
        ReprKind::Unramified(_) => {
            let l = r.lambda_in(ctx)?;
            invert_factor(ctx.one().sub(&l.mul(&qs)).add(&qs.mul(&qs)))
        }
    }
}

/// `L(s, r)` at a half-integer `s`.
pub fn standard_l(r: &ReprDescriptor, s: HalfInt) -> Result<Number, ReprError> {
    dispatch(&[r], r.q, |c| standard_l_in(r, c, s), |c| standard_l_in(r, c, s))
}

pub fn adjoint_l_at_1_in<C: Ctx>(r: &ReprDescriptor, ctx: &C) -> Result<C::S, ReprError> {
    let iq = ctx.q_half_power(-2);
    match r.kind {
        ReprKind::Steinberg { .. } => Ok(local_zeta(ctx, 2)),
        ReprKind::Unramified(_) => {
            let l = r.lambda_in(ctx)?;
            let two = ctx.int(2);
            let middle = ctx
                .one()
                .sub(&l.mul(&l).sub(&two).mul(&iq))
                .add(&iq.mul(&iq));
            invert_factor(ctx.one().sub(&iq).mul(&middle))
        }
    }
}

/// `L(1, r, Ad)`.
pub fn adjoint_l_at_1(r: &ReprDescriptor) -> Result<Number, ReprError> {
    dispatch(&[r], r.q, |c| adjoint_l_at_1_in(r, c), |c| adjoint_l_at_1_in(r, c))
}

/// `det(I - t M)` from the characteristic polynomial of `M`.
fn det_one_minus<C: Ctx>(ctx: &C, m: &[Vec<C::S>], t: &C::S) -> C::S {
    let p = charpoly(ctx, m);
    let mut acc = ctx.zero();
    let mut tk = ctx.one();
    for c in &p {
        acc = acc.add(&c.mul(&tk));
        tk = tk.mul(t);
    }
    acc
}

pub fn triple_l_half_in<C: Ctx>(reps: [&ReprDescriptor; 3], ctx: &C) -> Result<C::S, ReprError> {
    let st: Vec<usize> = (0..3).filter(|&i| reps[i].is_steinberg()).collect();
    let satake = |r: &ReprDescriptor| -> Result<Vec<Vec<C::S>>, ReprError> {
        let l = r.lambda_in(ctx)?;
        // x^2 - lambda x + 1 has roots alpha, 1/alpha
        Ok(companion(ctx, &[l, ctx.int(-1)]))
    };
    match st.as_slice() {
        [] => {
            let m = kronecker(&kronecker(&satake(reps[0])?, &satake(reps[1])?), &satake(reps[2])?);
            invert_factor(det_one_minus(ctx, &m, &ctx.q_half_power(-1)))
        }
        [s] => {
            let others: Vec<&ReprDescriptor> = (0..3).filter(|i| i != s).map(|i| reps[i]).collect();
            let m = kronecker(&satake(others[0])?, &satake(others[1])?);
            let twist = reps[*s].twist().expect("Steinberg");
            let t = ctx.int(twist).mul(&ctx.q_half_power(-2));
            invert_factor(det_one_minus(ctx, &m, &t))
        }
        _ => Err(ReprError::Unsupported(
            "triple product with more than one Steinberg factor".into(),
        )),
    }
}

/// `L(1/2, r1 x r2 x r3)`.
pub fn triple_l_half(reps: [&ReprDescriptor; 3]) -> Result<Number, ReprError> {
    let q = reps[0].q;
    if reps.iter().any(|r| r.q != q) {
        return Err(NumericsError::FieldMismatch {
            left: q,
            right: reps.iter().find(|r| r.q != q).expect("exists").q,
        }
        .into());
    }
    dispatch(&reps, q, |c| triple_l_half_in(reps, c), |c| triple_l_half_in(reps, c))
}

/// The Atkin-Lehner eigenvalue of the Steinberg new vector, read off from
/// the action of `[[0, -1], [p, 0]]` in the induced model.
pub fn atkin_lehner_sign(r: &ReprDescriptor) -> Result<i64, ReprError> {
    crate::induced::steinberg_atkin_lehner_sign(r).map_err(|e| ReprError::Unsupported(e.to_string()))
}
