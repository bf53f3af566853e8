//! Both sides of the basis-sum identity with the constant kappa.

use locperiod::numerics::exact::ratio;
use locperiod::numerics::ExactScalar;
use locperiod::periods::{verify_true_identity, TruncationPlan};
use locperiod::repn::ReprDescriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = 2;
    let lam = |n, d| ReprDescriptor::unramified_lambda(q, ExactScalar::from_rational(ratio(n, d), q));
    let (r, r1, r2) = (lam(1, 3)?, lam(1, 1)?, lam(-1, 2)?);
    let rep = verify_true_identity(&r, &r1, &r2, &TruncationPlan::default(), 1e-8)?;
    println!("{}", rep.instance);
    println!("lhs = {:?}", rep.lhs);
    println!("rhs = {:?}", rep.rhs);
    println!("pass = {}", rep.pass);
    Ok(())
}
