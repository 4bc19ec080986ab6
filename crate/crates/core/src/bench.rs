//! Random mean-risk instances and a benchmark harness over cut strategies.

use std::io::Write;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bnc::{self, Limits, MeanRiskObjective, SolveReport, SolveStatus, Strategy};
use crate::error::{Error, Result};
use crate::function::ConcaveFunction;
use crate::instance::Instance;

const MAX_REJECTIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    /// Ratio controlling how far the lower weight sits below the higher one.
    pub q: f64,
    pub k: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(n: usize, q: f64, k: usize, seed: u64) -> Self {
        Self { n, q, k, epsilon: 0.01, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Input(format!("n = {} must be at least 2", self.n)));
        }
        if self.q.is_nan() || self.q < 2.0 {
            return Err(Error::Input(format!("q = {} must be at least 2", self.q)));
        }
        if self.k < 1 || self.k > self.n {
            return Err(Error::Input(format!("k = {} must lie in [1, n]", self.k)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::Input(format!("epsilon = {} must lie in (0, 0.5)", self.epsilon)));
        }
        Ok(())
    }
}

/// Order statistic at 0-based position `(n - 1) / 2` (the lower median for
/// even `n`).
pub fn lower_median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s[(s.len() - 1) / 2]
}

/// Draws `λ ~ U[50, 100]^n`, `sqrt(a_H) ~ U[min λ, median λ]` and
/// `sqrt(a_L) ~ N(sqrt(a_H) / q, 1)` redrawn until `0 <= sqrt(a_L) < sqrt(a_H)`.
/// Items with `λ_i <= median` get `a_L`. `f` is the square root.
pub fn gen_instance(cfg: &GenConfig) -> Result<(Instance, MeanRiskObjective)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lambda: Vec<f64> = (0..cfg.n).map(|_| rng.random_range(50.0..=100.0)).collect();
    let med = lower_median(&lambda);
    let min = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    let root_h: f64 = rng.random_range(min..=med);
    let normal = Normal::new(root_h / cfg.q, 1.0).map_err(|e| Error::Generation(e.to_string()))?;
    let mut root_l = None;
    for _ in 0..MAX_REJECTIONS {
        let s: f64 = normal.sample(&mut rng);
        if (0.0..root_h).contains(&s) {
            root_l = Some(s);
            break;
        }
    }
    let root_l = root_l.ok_or_else(|| Error::Generation(format!("no lower weight after {MAX_REJECTIONS} draws")))?;
    let (a_l, a_h) = (root_l * root_l, root_h * root_h);
    let a: Vec<f64> = lambda.iter().map(|&l| if l <= med { a_l } else { a_h }).collect();
    let inst = Instance::new(a, cfg.k, ConcaveFunction::sqrt())?;
    let obj = MeanRiskObjective::from_epsilon(lambda, cfg.epsilon)?;
    Ok((inst, obj))
}

/// Seed of trial `trial` in a grid cell; independent of the trial count.
pub fn trial_seed(base: u64, n: usize, q: f64, k: usize, trial: usize) -> u64 {
    let mut z = base;
    for v in [n as u64, q.to_bits(), k as u64, trial as u64] {
        z = splitmix64(z ^ v);
    }
    z
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Cartesian grid over `n`, `k`, `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchGrid {
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub q: Vec<f64>,
}

impl BenchGrid {
    /// Parses items like `n=20,40`, `k=3,5`, `q=4,8`.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let mut g = BenchGrid { n: vec![], k: vec![], q: vec![] };
        for item in items {
            let item = item.as_ref();
            let (key, vals) =
                item.split_once('=').ok_or_else(|| Error::Parse(format!("grid item {item:?} is not key=values")))?;
            let parts = vals.split(',').map(str::trim);
            let bad = |v: &str| Error::Parse(format!("bad value {v:?} for {key}"));
            match key.trim() {
                "n" => g.n = parts.map(|v| v.parse().map_err(|_| bad(v))).collect::<Result<_>>()?,
                "k" => g.k = parts.map(|v| v.parse().map_err(|_| bad(v))).collect::<Result<_>>()?,
                "q" => g.q = parts.map(|v| v.parse().map_err(|_| bad(v))).collect::<Result<_>>()?,
                other => return Err(Error::Parse(format!("unknown grid key {other:?}"))),
            }
        }
        if g.n.is_empty() || g.k.is_empty() || g.q.is_empty() {
            return Err(Error::Parse("grid needs n, k and q".into()));
        }
        Ok(g)
    }

    /// Configurations in `n`, `k`, `q` order; cells with `k > n` are skipped.
    pub fn configs(&self, epsilon: f64, base_seed: u64) -> Vec<GenConfig> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &k in &self.k {
                for &q in &self.q {
                    if k <= n {
                        out.push(GenConfig { n, q, k, epsilon, seed: base_seed });
                    }
                }
            }
        }
        out
    }
}

/// One solve, as written to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub q: f64,
    pub k: usize,
    pub strategy: Strategy,
    pub trial: usize,
    pub seed: u64,
    pub status: String,
    pub time_s: f64,
    pub gap: f64,
    pub nodes: usize,
    pub cuts_total: usize,
    /// `NA` outside the lifted-EPI/lower-SI strategy.
    pub cuts_lepi: String,
    pub cuts_lsi: String,
    pub objective: f64,
    pub bound: f64,
}

impl TrialRecord {
    fn from_report(cfg: &GenConfig, trial: usize, r: &SolveReport) -> Self {
        let split = |v: usize| if r.strategy == Strategy::LepiLsi { v.to_string() } else { "NA".into() };
        Self {
            n: cfg.n,
            q: cfg.q,
            k: cfg.k,
            strategy: r.strategy,
            trial,
            seed: cfg.seed,
            status: r.status.to_string(),
            time_s: r.time_s,
            gap: r.gap,
            nodes: r.nodes,
            cuts_total: r.cuts.user_total(),
            cuts_lepi: split(r.cuts.lifted_epi),
            cuts_lsi: split(r.cuts.lower_si),
            objective: r.objective,
            bound: r.bound,
        }
    }

    fn from_error(cfg: &GenConfig, strategy: Strategy, trial: usize, e: &Error) -> Self {
        Self {
            n: cfg.n,
            q: cfg.q,
            k: cfg.k,
            strategy,
            trial,
            seed: cfg.seed,
            status: format!("error: {e}"),
            time_s: 0.0,
            gap: f64::NAN,
            nodes: 0,
            cuts_total: 0,
            cuts_lepi: "NA".into(),
            cuts_lsi: "NA".into(),
            objective: f64::NAN,
            bound: f64::NAN,
        }
    }

    pub fn solved(&self) -> bool {
        self.status == SolveStatus::Optimal.to_string()
    }
}

/// Aggregate over the trials of one `(config, strategy)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub q: f64,
    pub k: usize,
    pub strategy: Strategy,
    pub trials: usize,
    pub solved: usize,
    /// Trials ending on a limit or an error.
    pub timeouts: usize,
    pub errors: usize,
    pub mean_time_s: f64,
    pub mean_gap: f64,
    pub mean_nodes: f64,
    pub median_nodes: f64,
    pub mean_cuts_total: f64,
    /// Split of `mean_cuts_total`, only for the lifted-EPI/lower-SI strategy.
    pub mean_cuts_lepi: Option<f64>,
    pub mean_cuts_lsi: Option<f64>,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn aggregate(records: &[TrialRecord]) -> BenchRow {
    let first = &records[0];
    let ok: Vec<&TrialRecord> = records.iter().filter(|r| !r.status.starts_with("error")).collect();
    let mean = |f: &dyn Fn(&TrialRecord) -> f64| {
        if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
        }
    };
    let split = first.strategy == Strategy::LepiLsi;
    let parse = |s: &str| s.parse::<f64>().unwrap_or(0.0);
    let solved = records.iter().filter(|r| r.solved()).count();
    BenchRow {
        n: first.n,
        q: first.q,
        k: first.k,
        strategy: first.strategy,
        trials: records.len(),
        solved,
        timeouts: records.len() - solved,
        errors: records.len() - ok.len(),
        mean_time_s: mean(&|r| r.time_s),
        mean_gap: mean(&|r| r.gap),
        mean_nodes: mean(&|r| r.nodes as f64),
        median_nodes: median(ok.iter().map(|r| r.nodes as f64).collect()),
        mean_cuts_total: mean(&|r| r.cuts_total as f64),
        mean_cuts_lepi: split.then(|| mean(&|r| parse(&r.cuts_lepi))),
        mean_cuts_lsi: split.then(|| mean(&|r| parse(&r.cuts_lsi))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOutput {
    pub rows: Vec<BenchRow>,
    pub records: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub trials: usize,
    pub limits: Limits,
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            trials: 5,
            limits: Limits { time_limit: Some(Duration::from_secs(60)), ..Limits::default() },
            threads: 0,
        }
    }
}

/// Runs every strategy on `trials` instances per configuration. A config's
/// `seed` is the base seed from which trial seeds are derived.
pub fn run_benchmark(configs: &[GenConfig], strategies: &[Strategy], opts: &BenchOptions) -> Result<BenchOutput> {
    if opts.trials == 0 {
        return Err(Error::Input("trials must be at least 1".into()));
    }
    for c in configs {
        c.validate()?;
    }
    let mut jobs = Vec::new();
    for base in configs {
        for trial in 0..opts.trials {
            let cfg = GenConfig { seed: trial_seed(base.seed, base.n, base.q, base.k, trial), ..*base };
            for &st in strategies {
                jobs.push((cfg, trial, st));
            }
        }
    }
    let run = |&(cfg, trial, st): &(GenConfig, usize, Strategy)| {
        let out = gen_instance(&cfg).and_then(|(inst, obj)| bnc::solve(&inst, &obj, st, &opts.limits));
        match out {
            Ok(r) => TrialRecord::from_report(&cfg, trial, &r),
            Err(e) => TrialRecord::from_error(&cfg, st, trial, &e),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    let records: Vec<TrialRecord> = pool.install(|| jobs.par_iter().map(run).collect());

    let mut rows = Vec::new();
    for base in configs {
        for &st in strategies {
            let cell: Vec<TrialRecord> = records
                .iter()
                .filter(|r| r.n == base.n && r.k == base.k && r.q == base.q && r.strategy == st)
                .cloned()
                .collect();
            rows.push(aggregate(&cell));
        }
    }
    Ok(BenchOutput { rows, records })
}

pub const CSV_HEADER: &str =
    "n,q,k,strategy,trial,seed,status,time_s,gap,nodes,cuts_total,cuts_lepi,cuts_lsi,objective,bound";

pub fn write_csv<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable summary table.
pub fn format_table(rows: &[BenchRow]) -> String {
    let mut s = format!(
        "{:>4} {:>4} {:>3} {:<9} {:>7} {:>9} {:>10} {:>9} {:>14} {:>7}\n",
        "n", "q", "k", "strategy", "time_s", "gap", "nodes", "med_nodes", "cuts(lepi/lsi)", "solved"
    );
    for r in rows {
        let cuts = match (r.mean_cuts_lepi, r.mean_cuts_lsi) {
            (Some(a), Some(b)) => format!("{:.1}({:.1}/{:.1})", r.mean_cuts_total, a, b),
            _ => format!("{:.1}", r.mean_cuts_total),
        };
        s.push_str(&format!(
            "{:>4} {:>4} {:>3} {:<9} {:>7.2} {:>9.2e} {:>10.1} {:>9.1} {:>14} {:>4}/{}\n",
            r.n,
            r.q,
            r.k,
            r.strategy.to_string(),
            r.mean_time_s,
            r.mean_gap,
            r.mean_nodes,
            r.median_nodes,
            cuts,
            r.solved,
            r.trials
        ));
    }
    s
}
