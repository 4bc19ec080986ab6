//! Desk-scale comparison of the cut strategies on generated instances.
//!
//! `cargo run --release --example benchmark [trials] [time_limit_s]`

use std::time::Duration;

use submod_cuts::bench::{format_table, run_benchmark, BenchGrid, BenchOptions};
use submod_cuts::bnc::{Limits, Strategy};

fn main() -> submod_cuts::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|v| v.parse().ok()).unwrap_or(2);
    let secs = args.next().and_then(|v| v.parse().ok()).unwrap_or(20);
    let grid = BenchGrid::parse(&["n=40", "k=3,5", "q=4,8"])?;
    let opts = BenchOptions {
        trials,
        limits: Limits { time_limit: Some(Duration::from_secs(secs)), ..Limits::default() },
        threads: 0,
    };
    let out = run_benchmark(
        &grid.configs(0.01, std::env::var("BASE").ok().and_then(|v| v.parse().ok()).unwrap_or(2024)),
        &Strategy::ALL,
        &opts,
    )?;
    print!("{}", format_table(&out.rows));
    Ok(())
}
