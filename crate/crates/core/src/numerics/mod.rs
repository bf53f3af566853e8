//! Exact quadratic-ring arithmetic, error-tracked complex arithmetic and
//! closed-form summation of eventually recurrent sequences.

pub mod approx;
pub mod exact;
pub mod quad;
pub mod scalar;
pub mod series;

pub use approx::{
    decimal_string, root_from_lambda, sqrt_rational, sum_with_error, to_approx, unit_from_angle,
    ApproxScalar, DEFAULT_PRECISION,
};
pub use exact::ExactScalar;
pub use quad::{Quad, QuadRing};
pub use scalar::{ApproxCtx, Ctx, ExactCtx, Scalar};
pub use series::EventualSeq;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericsError {
    #[error("operands live in Q(sqrt {left}) and Q(sqrt {right})")]
    FieldMismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("series has a pole at the summation point")]
    DivergentSeries,
}

/// A value from either backend.
#[derive(Clone, Debug)]
pub enum Number {
    Exact(ExactScalar),
    Approx(ApproxScalar),
}

impl Number {
    pub fn to_approx(&self, prec: u32) -> ApproxScalar {
        match self {
            Number::Exact(x) => to_approx(x, prec),
            Number::Approx(x) => Scalar::to_approx(x, prec),
        }
    }

    pub fn as_exact(&self) -> Option<&ExactScalar> {
        match self {
            Number::Exact(x) => Some(x),
            Number::Approx(_) => None,
        }
    }

    /// Real part as a float.
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(x) => x.to_f64(),
            Number::Approx(x) => x.re_f64(),
        }
    }

    /// Error bound: zero for exact values.
    pub fn err(&self) -> f64 {
        match self {
            Number::Exact(_) => 0.0,
            Number::Approx(x) => x.err(),
        }
    }
}

impl std::fmt::Display for Number {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Number::Exact(x) => write!(f, "{}", x),
            Number::Approx(x) => write!(f, "{}", x),
        }
    }
}
