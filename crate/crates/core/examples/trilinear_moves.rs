//! Hecke and Atkin-Lehner relations of the trilinear functional.

use locperiod::numerics::exact::ratio;
use locperiod::numerics::ExactScalar;
use locperiod::periods::{verify_prop_atkin, verify_prop_hecke, TruncationPlan};
use locperiod::repn::ReprDescriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plan = TruncationPlan::default();
    let lam = |q, n, d| ReprDescriptor::unramified_lambda(q, ExactScalar::from_rational(ratio(n, d), q));

    let h = verify_prop_hecke(&lam(3, 1, 1)?, &lam(3, 1, 2)?, &lam(3, -1, 4)?, &plan, 1e-8)?;
    println!("{}: pass = {}, residual {:e}", h.instance, h.pass, h.residual);

    for twist in [1, -1] {
        let st = ReprDescriptor::steinberg(2, twist)?;
        let a = verify_prop_atkin(&st, &lam(2, 1, 3)?, &lam(2, 1, 1)?, &plan, 1e-8, None)?;
        println!("twist {twist}: {}: pass = {}", a.instance, a.pass);
    }

    let (pi, pi1) = (lam(3, 1, 1)?, lam(3, 1, 2)?);
    for eta in [1, -1] {
        let a = verify_prop_atkin(&pi, &pi1, &pi1, &plan, 1e-8, Some(eta))?;
        println!("spherical, eta = {eta}: pass = {}, residual {:e}", a.pass, a.residual);
    }
    Ok(())
}
