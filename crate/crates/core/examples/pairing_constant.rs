//! `<phi, phi^m>` through the Whittaker model, including a parameter past the
//! tempered range.

use locperiod::induced::Model;
use locperiod::numerics::exact::ratio;
use locperiod::numerics::{ExactCtx, ExactScalar};
use locperiod::periods::kappa_pi;
use locperiod::repn::ReprDescriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = 2;
    for (n, d) in [(0, 1), (1, 1), (2, 1), (5, 2)] {
        let lambda = ExactScalar::from_rational(ratio(n, d), q);
        let r = ReprDescriptor::unramified_lambda_override(q, lambda.clone())?;
        let m = Model::new(&r, ExactCtx::new(q))?;
        let phi = m.spherical_vector()?;
        let got = m.theta_inner(&phi, &m.level_raise(&phi))?;
        println!("lambda = {n}/{d}: <phi, phi^m> = {got}, kappa = {}", kappa_pi(q, &lambda));
    }
    Ok(())
}
