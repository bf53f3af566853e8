//! Normalized triple coefficient of three unramified new vectors.

use locperiod::numerics::exact::ratio;
use locperiod::numerics::ExactScalar;
use locperiod::periods::{normalized_iv, TruncationPlan, VectorChoice};
use locperiod::repn::ReprDescriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = 3;
    let lam = |n, d| ReprDescriptor::unramified_lambda(q, ExactScalar::from_rational(ratio(n, d), q));
    let (a, b, c) = (lam(1, 2)?, lam(-3, 4)?, lam(5, 4)?);
    let v = normalized_iv([&a, &b, &c], [VectorChoice::New; 3], &TruncationPlan::default())?;
    println!("I = {}", v.value);
    println!("exact: {:?}", v.exact.map(|x| x.to_string()));
    println!("a priori tail bound past R = {}: {:e}", v.radius, v.a_priori_bound);
    Ok(())
}
