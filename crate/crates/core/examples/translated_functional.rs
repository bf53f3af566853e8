//! The anchored functional at simultaneous translates, truncated with the a
//! priori tail bound.

use locperiod::numerics::exact::ratio;
use locperiod::numerics::ExactScalar;
use locperiod::padic::GL2Elem;
use locperiod::periods::{ell_anchor, ell_anchor_translated, TailMode, TruncationPlan, VectorChoice};
use locperiod::repn::ReprDescriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = 5;
    let lam = |n, d| ReprDescriptor::unramified_lambda(q, ExactScalar::from_rational(ratio(n, d), q));
    let (a, b, c) = (lam(1, 2)?, lam(1, 3)?, lam(-1, 5)?);
    let reps = [&a, &b, &c];
    let vecs = [VectorChoice::New; 3];
    let anchors = [VectorChoice::Raised, VectorChoice::New, VectorChoice::Raised];
    let plan = TruncationPlan::new(30, TailMode::ClosedForm);
    println!("l = {}", ell_anchor(reps, vecs, anchors, &plan)?.value);
    let g = GL2Elem::new(ratio(1, 5), ratio(3, 1), ratio(5, 1), ratio(2, 1))?;
    let t = ell_anchor_translated(reps, vecs, anchors, &g, &plan)?;
    println!("l(g v) = {} with tail bound {:e}", t.value, t.tail_bound);
    Ok(())
}
