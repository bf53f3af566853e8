//! Truncation with the a priori tail bound against the closed-form tail.

use locperiod::numerics::exact::ratio;
use locperiod::numerics::ExactScalar;
use locperiod::periods::{triple_iprime, TailMode, TruncationPlan, VectorChoice};
use locperiod::repn::ReprDescriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = 5;
    let lam = |n, d| ReprDescriptor::unramified_lambda(q, ExactScalar::from_rational(ratio(n, d), q));
    let (a, b, c) = (lam(1, 4)?, lam(-1, 2)?, lam(1, 1)?);
    let reps = [&a, &b, &c];
    let exact = triple_iprime(reps, [VectorChoice::New; 3], &TruncationPlan::default())?;
    println!("closed form: {}", exact.value);
    for r in [10, 20, 40, 60] {
        let v = triple_iprime(reps, [VectorChoice::New; 3], &TruncationPlan::new(r, TailMode::Bound))?;
        let d = v.value.sub(&exact.value);
        println!("R = {r:>2}: {}  |gap| = {:.3e}  T(R) = {:.3e}", v.value, d.re_f64().abs(), v.tail_bound);
    }
    Ok(())
}
