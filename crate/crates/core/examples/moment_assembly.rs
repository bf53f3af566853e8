//! Assembles the moment from the shipped synthetic dataset.

use locperiod::moment::{assemble_moment, load_spectral_data, LevelData, Side};
use locperiod::numerics::exact::ratio;
use locperiod::periods::TruncationPlan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = load_spectral_data(include_str!("../tests/data/golden_dataset.json"))?;
    let level = LevelData {
        lambda1: ratio(1, 2),
        lambda2: ratio(-1, 1),
    };
    for side in [Side::LevelQ, Side::LevelP] {
        let r = assemble_moment(&ds, 3, 2, &ratio(1, 1), side, &level, &TruncationPlan::default())?;
        println!("{side:?}: level {} hecke {}", r.level_prime, r.hecke_prime);
        for t in &r.terms {
            println!("  {:<20} l = {:<28} term = {}", t.id, t.local_factor.exact, t.term.exact);
        }
        println!("  total = {} ~ {}", r.total.exact, r.total.decimal);
    }
    Ok(())
}
