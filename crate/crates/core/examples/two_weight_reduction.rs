//! Collapses a three-weight instance onto two weights and shows that a
//! lifted-EPI of the reduced instance is valid for the original one.

use submod_cuts::instance::{reduce_to_two_weights, Direction};
use submod_cuts::lift_epi::lifted_epi_cut;
use submod_cuts::{ConcaveFunction, Instance, Permutation, Result};

fn main() -> Result<()> {
    let inst = Instance::new(vec![2.0, 5.0, 5.0, 9.0, 9.0, 14.0], 3, ConcaveFunction::sqrt())?;
    let reduced = reduce_to_two_weights(&inst, 9.0, Direction::Increasing)?;
    println!("original {:?}\nreduced  {:?}", inst.a(), reduced.a());
    let cut = lifted_epi_cut(&reduced, &Permutation::identity(inst.n()))?;
    println!("{cut}");
    // Worst slack over every support of the original instance.
    let n = inst.n();
    let mut worst = f64::NEG_INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize > inst.k() {
            continue;
        }
        let s: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        worst = worst.max(cut.rhs_at_set(&s) - inst.eval_set(&s)?);
    }
    println!("largest pi0 + pi(S) - f(a(S)) on the original: {worst:.3e}");
    Ok(())
}
