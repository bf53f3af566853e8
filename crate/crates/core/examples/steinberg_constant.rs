//! The local factor at a Steinberg place against its closed form.

use locperiod::numerics::exact::ratio;
use locperiod::numerics::ExactScalar;
use locperiod::periods::{local_ell_v, LocalCase, TruncationPlan};
use locperiod::repn::ReprDescriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for q in [2, 3, 5] {
        let lam = |n, d| ReprDescriptor::unramified_lambda(q, ExactScalar::from_rational(ratio(n, d), q));
        let case = LocalCase::SteinbergAtQ {
            pi: ReprDescriptor::steinberg(q, -1)?,
            pi1: lam(1, 3)?,
            pi2: lam(-1, 1)?,
        };
        let r = local_ell_v(&case, &TruncationPlan::default(), 1e-8)?;
        println!("q = {q}: value {:?}, expected {:?}, pass {}", r.value, r.expected, r.pass);
    }
    Ok(())
}
