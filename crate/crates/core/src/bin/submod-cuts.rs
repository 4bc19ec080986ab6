use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use submod_cuts::bench::{self, BenchGrid, BenchOptions, GenConfig};
use submod_cuts::bnc::{self, Limits, MeanRiskObjective, Strategy};
use submod_cuts::format::{read_instance, write_instance};
use submod_cuts::hull22::{classify_facet, enumerate_polar_facets, verify_hull};
use submod_cuts::lift_epi::{ali_cut, epi_cut, lifted_epi_cut};
use submod_cuts::lift_si::{assumption_sides, check_assumption, higher_si_cut, lower_si_cut, SiParams, WeightClass};
use submod_cuts::{two_weight_profile, Error, Instance, LinearCut, Permutation, Result};

#[derive(Parser)]
#[command(
    name = "submod-cuts",
    version,
    about = "Lifted cuts, hull checks and branch-and-cut for concave cardinality-constrained minimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CutKind {
    Epi,
    LiftedEpi,
    Ali,
    LowerSi,
    HigherSi,
    CheckAssumption,
}

#[derive(Subcommand)]
enum Command {
    /// Build one cut, or check the higher-SI weight condition.
    Cuts {
        kind: CutKind,
        #[arg(long)]
        instance: PathBuf,
        /// 1-based permutation, e.g. "5,2,3,1,4,6". SI cuts read the base
        /// class and the lifted class in the order they appear.
        #[arg(long)]
        perm: Option<String>,
        #[arg(long, default_value_t = 0)]
        i0: usize,
    },
    /// Compare LP hull membership with the explicit k = 2 system.
    VerifyHull {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Enumerate hull facets through the polar and classify them.
    Polar {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        /// Random probe points on top of the support probes.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
    },
    /// Solve the mean-risk problem by branch-and-cut.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// JSON array file or inline comma-separated values; drawn from
        /// U[50, 100] with --seed when omitted.
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value = "lepi-lsi")]
        strategy: String,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        node_limit: Option<usize>,
        #[arg(long, default_value_t = 1e-4)]
        gap: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a random mean-risk instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Instance file; λ goes to `<out>.lambda.json`.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run strategies over a parameter grid.
    Bench {
        /// Items like `n=20,40 k=3,5 q=4,8`.
        #[arg(long, num_args = 1.., required = true)]
        grid: Vec<String>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value = "lepi-lsi,ali,nocuts")]
        strategies: String,
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long)]
        node_limit: Option<usize>,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Worker threads, 0 for one per core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn print_cut(cut: &LinearCut) {
    println!("{cut}");
    println!("{}", cut.to_json());
}

fn si_params(inst: &Instance, class: WeightClass, i0: usize, perm: Option<&str>) -> Result<SiParams> {
    let prof = two_weight_profile(inst)?;
    let mut params = SiParams::natural(&prof, class, i0);
    if let Some(text) = perm {
        let order = Permutation::from_one_based(text)?;
        if order.len() != inst.n() {
            return Err(Error::Input(format!("permutation has {} entries for n = {}", order.len(), inst.n())));
        }
        let base_high = class == WeightClass::Higher;
        params.perm_within_class = order.order().iter().copied().filter(|&i| prof.is_high[i] == base_high).collect();
        params.perm_other_class = order.order().iter().copied().filter(|&i| prof.is_high[i] != base_high).collect();
    }
    Ok(params)
}

fn cuts(kind: CutKind, path: &Path, perm: Option<&str>, i0: usize) -> Result<()> {
    let inst = read_instance(path)?;
    let full_perm = || -> Result<Permutation> {
        let p = match perm {
            Some(t) => Permutation::from_one_based(t)?,
            None => Permutation::identity(inst.n()),
        };
        if p.len() != inst.n() {
            return Err(Error::Input(format!("permutation has {} entries for n = {}", p.len(), inst.n())));
        }
        Ok(p)
    };
    match kind {
        CutKind::Epi => print_cut(&epi_cut(&inst, &full_perm()?)?),
        CutKind::LiftedEpi => print_cut(&lifted_epi_cut(&inst, &full_perm()?)?),
        CutKind::Ali => print_cut(&ali_cut(&inst, &full_perm()?)?),
        CutKind::LowerSi => print_cut(&lower_si_cut(&inst, &si_params(&inst, WeightClass::Lower, i0, perm)?)?),
        CutKind::HigherSi => print_cut(&higher_si_cut(&inst, &si_params(&inst, WeightClass::Higher, i0, perm)?)?),
        CutKind::CheckAssumption => {
            let prof = two_weight_profile(&inst)?;
            if i0 >= inst.k() {
                return Err(Error::Input(format!("i0 = {i0} must be below k = {}", inst.k())));
            }
            let (lhs, rhs) = assumption_sides(&prof, inst.f(), inst.k(), i0);
            println!("lhs = {lhs:.12}");
            println!("rhs = {rhs:.12}");
            println!("holds = {}", check_assumption(&prof, inst.f(), inst.k(), i0));
        }
    }
    Ok(())
}

fn hull(path: &Path, grid: usize, seed: u64) -> Result<bool> {
    let inst = read_instance(path)?.with_k(2)?;
    let prof = two_weight_profile(&inst)?;
    let holds = check_assumption(&prof, inst.f(), 2, 0);
    if !holds {
        println!("weight condition at i0 = 0 fails; the explicit system does not apply");
        return Ok(false);
    }
    let check = verify_hull(&inst, grid, seed)?;
    println!("{:<9} {:>7}", "category", "points");
    for (tag, c) in &check.per_category {
        println!("{:<9} {:>7}", format!("{tag:?}"), c);
    }
    println!("members = {}", check.members);
    println!("non_members = {}", check.non_members);
    println!("mismatches = {}", check.mismatches.len());
    for (w, x) in check.mismatches.iter().take(5) {
        println!("  w = {w:.9} x = {x:?}");
    }
    println!("equivalent = {}", check.equivalent());
    Ok(check.equivalent())
}

fn polar(path: &Path, k: Option<usize>, budget: usize) -> Result<()> {
    let inst = read_instance(path)?;
    let k = k.unwrap_or(inst.k());
    let inst = inst.with_k(k)?;
    let facets = enumerate_polar_facets(&inst, k, budget)?;
    println!("{} facets", facets.len());
    for f in &facets {
        let class = classify_facet(&inst, k, &f.ray)?;
        println!("{}  [{}; {} tight]", f.ray.to_cut(), class.label(), f.tight_count);
    }
    Ok(())
}

fn parse_lambda(arg: Option<&str>, n: usize, seed: u64) -> Result<Vec<f64>> {
    let Some(arg) = arg else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok((0..n).map(|_| rng.random_range(50.0..=100.0)).collect());
    };
    let path = Path::new(arg);
    let lambda: Vec<f64> = if path.is_file() {
        serde_json::from_str(&std::fs::read_to_string(path)?)?
    } else {
        arg.split(',')
            .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad lambda entry {t:?}"))))
            .collect::<Result<_>>()?
    };
    if lambda.len() != n {
        return Err(Error::Input(format!("lambda has {} entries for n = {n}", lambda.len())));
    }
    Ok(lambda)
}

fn parse_strategies(text: &str) -> Result<Vec<Strategy>> {
    text.split(',').map(str::parse).collect()
}

fn secs(v: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(v).map_err(|e| Error::Input(format!("time limit {v}: {e}")))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Cuts { kind, instance, perm, i0 } => cuts(kind, &instance, perm.as_deref(), i0)?,
        Command::VerifyHull { instance, grid, seed } => return hull(&instance, grid, seed),
        Command::Polar { instance, k, budget } => polar(&instance, k, budget)?,
        Command::Solve { instance, lambda, epsilon, strategy, time_limit, node_limit, gap, seed } => {
            let inst = read_instance(&instance)?;
            let lambda = parse_lambda(lambda.as_deref(), inst.n(), seed)?;
            let obj = MeanRiskObjective::from_epsilon(lambda, epsilon)?;
            let limits =
                Limits { time_limit: time_limit.map(secs).transpose()?, node_limit, rel_gap: gap, gap_limit: None };
            let report = bnc::solve(&inst, &obj, strategy.parse()?, &limits)?;
            println!("{:<10} {:>14} {:>14} {:>10} {:>8} {:>6}", "status", "objective", "bound", "gap", "nodes", "cuts");
            println!(
                "{:<10} {:>14.6} {:>14.6} {:>10.2e} {:>8} {:>6}",
                report.status.to_string(),
                report.objective,
                report.bound,
                report.gap,
                report.nodes,
                report.cuts.user_total()
            );
            println!();
            print!("{}", report.to_structured_text());
        }
        Command::Gen { n, q, k, seed, epsilon, out } => {
            let cfg = GenConfig { n, q, k, epsilon, seed };
            let (inst, obj) = bench::gen_instance(&cfg)?;
            write_instance(&out, &inst)?;
            let mut lambda_path = out.clone().into_os_string();
            lambda_path.push(".lambda.json");
            std::fs::write(&lambda_path, serde_json::to_string_pretty(&obj.lambda)? + "\n")?;
            println!("instance: {}", out.display());
            println!("lambda: {}", PathBuf::from(lambda_path).display());
            println!("omega = {:.12}", obj.omega);
        }
        Command::Bench { grid, trials, strategies, time_limit, node_limit, epsilon, seed, threads, out } => {
            let grid = BenchGrid::parse(&grid)?;
            let opts = BenchOptions {
                trials,
                limits: Limits { time_limit: Some(secs(time_limit)?), node_limit, ..Limits::default() },
                threads,
            };
            let result = bench::run_benchmark(&grid.configs(epsilon, seed), &parse_strategies(&strategies)?, &opts)?;
            print!("{}", bench::format_table(&result.rows));
            match out {
                Some(path) => {
                    let file =
                        std::fs::File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    bench::write_csv(file, &result.records)?;
                }
                None => bench::write_csv(std::io::stdout(), &result.records)?,
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
