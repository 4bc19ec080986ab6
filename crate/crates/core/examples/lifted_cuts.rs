//! EPI, lifted-EPI and ALI for one order on a six-item two-weight instance,
//! and how far each one cuts into a fractional point.

use submod_cuts::lift_epi::{ali_cut, epi_cut, lifted_epi_cut};
use submod_cuts::{ConcaveFunction, Instance, Permutation, Result};

fn main() -> Result<()> {
    let inst = Instance::new(vec![4.0, 100.0, 100.0, 100.0, 4.0, 4.0], 2, ConcaveFunction::sqrt())?;
    let perm = Permutation::from_one_based("5,2,3,1,4,6")?;
    let xbar = [0.5, 0.5, 0.2, 0.0, 0.5, 0.3];
    let wbar = 6.0;
    println!("order {}  point w = {wbar}, x = {xbar:?}", perm.to_one_based());
    for cut in [epi_cut(&inst, &perm)?, lifted_epi_cut(&inst, &perm)?, ali_cut(&inst, &perm)?] {
        println!("{cut}\n    violation {:.4}", cut.violation(wbar, &xbar));
    }
    Ok(())
}
