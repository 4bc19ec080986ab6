//! Lower- and higher-SI cuts for every base index, with the weight condition
//! that the higher-SI needs.

use submod_cuts::lift_si::{
    assumption_sides, best_i0, check_assumption, higher_si_cut, lower_si_cut, SiParams, WeightClass,
};
use submod_cuts::{two_weight_profile, ConcaveFunction, Instance, Result};

fn main() -> Result<()> {
    let inst = Instance::new(vec![9.0, 9.0, 9.0, 9.0, 16.0, 16.0, 16.0, 16.0], 3, ConcaveFunction::sqrt())?;
    let prof = two_weight_profile(&inst)?;
    for i0 in 0..inst.k() {
        let lower = lower_si_cut(&inst, &SiParams::natural(&prof, WeightClass::Lower, i0))?;
        println!("i0 = {i0}  {lower}");
        let (lhs, rhs) = assumption_sides(&prof, inst.f(), inst.k(), i0);
        if check_assumption(&prof, inst.f(), inst.k(), i0) {
            let higher = higher_si_cut(&inst, &SiParams::natural(&prof, WeightClass::Higher, i0))?;
            println!("        {higher}");
        } else {
            println!("        no higher-SI: condition fails ({lhs:.4} > {rhs:.4})");
        }
    }
    let xbar = [0.9, 0.1, 0.4, 0.0, 0.7, 0.2, 0.5, 0.1];
    println!("best i0 at {xbar:?}: {}", best_i0(&inst, &xbar)?);
    Ok(())
}
