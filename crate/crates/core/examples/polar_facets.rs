//! Enumerates hull facets of two small capped-quadratic instances through
//! the polar separation LP and reports which proposed family (if any)
//! reproduces each one.

use submod_cuts::hull22::{classify_facet, enumerate_polar_facets};
use submod_cuts::{ConcaveFunction, Instance, Result};

fn report(a: Vec<f64>, k: usize) -> Result<()> {
    let f = ConcaveFunction::capped_quadratic(8.0)?;
    let inst = Instance::new(a, k, f)?;
    println!("a = {:?}, k = {k}", inst.a());
    let facets = enumerate_polar_facets(&inst, k, 2000)?;
    for facet in &facets {
        let class = classify_facet(&inst, k, &facet.ray)?;
        println!("  {}  [{}; {} tight]", facet.ray.to_cut(), class.label(), facet.tight_count);
    }
    println!("  {} facets\n", facets.len());
    Ok(())
}

fn main() -> Result<()> {
    report(vec![2.0, 2.0, 5.0, 5.0, 5.0, 5.0, 5.0], 2)?;
    report(vec![6.0, 6.0, 6.0, 6.0, 8.0, 8.0, 8.0], 3)?;
    Ok(())
}
