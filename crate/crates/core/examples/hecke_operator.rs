//! The Hecke operator on induced models and the Gram matrix of the
//! `K_0(p)`-fixed basis.

use locperiod::induced::Model;
use locperiod::numerics::exact::ratio;
use locperiod::numerics::{Ctx, ExactCtx, ExactScalar};
use locperiod::padic::{hecke_cosets, LocalField};
use locperiod::repn::ReprDescriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in [2, 3, 5] {
        println!("p = {p}: {} cosets in K a(p) K / K", hecke_cosets(&LocalField::new(p)?).len());
    }
    let q = 3;
    let lambda = ratio(2, 3);
    let r = ReprDescriptor::unramified_lambda(q, ExactScalar::from_rational(lambda.clone(), q))?;
    let m = Model::new(&r, ExactCtx::new(q))?;
    let phi = m.spherical_vector()?;
    let t = m.hecke_apply(&phi)?;
    println!("T phi = lambda phi: {}", m.same(&t, &m.scale(&phi, &m.ctx().rat(&lambda))));
    let b = m.k0_basis()?;
    let one = m.ctx().one();
    for x in &b {
        let row: Vec<String> = b
            .iter()
            .map(|y| m.inner_product(x, y).map(|s| format!("{}", s.value(&one).unwrap())))
            .collect::<Result<_, _>>()?;
        println!("[{}]", row.join(", "));
    }
    Ok(())
}
