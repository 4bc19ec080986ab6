//! Solves one generated mean-risk instance with each strategy and checks the
//! result against enumeration.

use submod_cuts::bench::{gen_instance, GenConfig};
use submod_cuts::bnc::{self, Limits, Strategy};
use submod_cuts::Result;

fn main() -> Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let (inst, obj) = gen_instance(&GenConfig::new(18, 8.0, 3, seed))?;
    let (support, best) = bnc::brute_force(&inst, &obj);
    println!("enumeration: {best:.6} with items {:?}", support.iter().map(|i| i + 1).collect::<Vec<_>>());
    for st in Strategy::ALL {
        let r = bnc::solve(&inst, &obj, st, &Limits::default())?;
        println!(
            "{:>9}: {} {:.6} nodes {:>4} user cuts {:>3} lazy {:>3}",
            st.to_string(),
            r.status,
            r.objective,
            r.nodes,
            r.cuts.user_total(),
            r.cuts.lazy
        );
    }
    Ok(())
}
