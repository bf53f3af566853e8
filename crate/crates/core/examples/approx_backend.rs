//! Irrational Satake parameters `alpha = exp(i theta)` on the error-tracked
//! backend.

use locperiod::numerics::exact::ratio;
use locperiod::numerics::unit_from_angle;
use locperiod::periods::{normalized_iv, TruncationPlan, VectorChoice};
use locperiod::repn::ReprDescriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = 2;
    let plan = TruncationPlan::default().with_precision(192);
    let unit = |n, d| ReprDescriptor::unramified_approx(q, unit_from_angle(&ratio(n, d), plan.precision));
    let (a, b, c) = (unit(3, 10)?, unit(11, 10)?, unit(2, 1)?);
    let v = normalized_iv([&a, &b, &c], [VectorChoice::New; 3], &plan)?;
    println!("I = {} (error bound {:e})", v.value, v.err());
    Ok(())
}
