//! Compares the explicit k = 2 inequality system with the separation LP on
//! random probe points.

use submod_cuts::hull22::{p22_system_cuts, verify_hull, P22System};
use submod_cuts::{ConcaveFunction, Instance, Result};

fn main() -> Result<()> {
    let inst = Instance::new(vec![9.0, 9.0, 9.0, 16.0, 16.0, 16.0, 16.0], 2, ConcaveFunction::sqrt())?;
    let system = p22_system_cuts(&inst, P22System::default())?;
    println!("{} explicit inequalities", system.len());
    let check = verify_hull(&inst, 500, 1)?;
    for (tag, count) in &check.per_category {
        println!("  {tag:?}: {count} probes");
    }
    println!("members {}, non-members {}, mismatches {}", check.members, check.non_members, check.mismatches.len());
    Ok(())
}
