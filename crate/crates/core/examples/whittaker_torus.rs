//! Whittaker values on the torus: the Jacquet integral against the closed form.

use locperiod::induced::Model;
use locperiod::numerics::exact::ratio;
use locperiod::numerics::{Ctx, ExactCtx, ExactScalar};
use locperiod::repn::ReprDescriptor;
use locperiod::whittaker::torus_value;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = 5;
    let ctx = ExactCtx::new(q);
    let r = ReprDescriptor::unramified_lambda(q, ExactScalar::from_rational(ratio(1, 2), q))?;
    let m = Model::new(&r, ctx.clone())?;
    let v = m.new_vector()?;
    for k in -1..=5 {
        let jacquet = m.torus_value_at(&v, k)?;
        let closed = torus_value(&m, k).value(&ctx.one()).unwrap();
        println!("W(a(p^{k})) = {jacquet}  closed form {closed}");
    }
    let st = Model::new(&ReprDescriptor::steinberg(q, -1)?, ctx.clone())?;
    let w = st.new_vector()?;
    for k in 0..=3 {
        println!("Steinberg W(a(p^{k})) = {}", st.torus_value_at(&w, k)?);
    }
    Ok(())
}
