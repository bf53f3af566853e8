//! Exact and error-bounded local period computations for GL(2) over p-adic fields.

pub mod numerics;
pub mod padic;
pub mod repn;
pub mod induced;
pub mod whittaker;
pub mod periods;
pub mod moment;
pub mod cli;
