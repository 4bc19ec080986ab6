//! Solving a small LP, reading duals and re-solving after adding a row.

use submod_cuts::lp::{self, LpProblem, Relation, Row, Sense};
use submod_cuts::Result;

fn main() -> Result<()> {
    let mut p = LpProblem::new(Sense::Maximize, vec![3.0, 5.0]);
    p.add_row(vec![1.0, 0.0], Relation::Le, 4.0);
    p.add_row(vec![0.0, 2.0], Relation::Le, 12.0);
    p.add_row(vec![3.0, 2.0], Relation::Le, 18.0);
    let first = lp::solve(&p, None)?;
    println!("{:?} objective {} at {:?}, duals {:?}", first.status, first.objective, first.x, first.duals);

    let cut = Row::new(vec![1.0, 1.0], Relation::Le, 7.0);
    let second = lp::resolve_with_added_rows(&mut p, &first, vec![cut])?;
    println!("after x + y <= 7: objective {} at {:?} ({} iterations)", second.objective, second.x, second.iterations);
    println!("{:?}", second.kkt(&p));
    print!("{}", lp::to_lp_text(&p));
    Ok(())
}
