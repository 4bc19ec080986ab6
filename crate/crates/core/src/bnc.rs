//! Branch-and-cut for `min -λ·x + Ω·w` subject to `w >= f(a·x)`,
//! `sum(x) <= k`, `x` binary.
//!
//! The epigraph constraint is enforced by lazy cuts at integer LP points.
//! Strategies differ only in the user cut added at every tenth explored node
//! whose LP point is fractional. All cuts go into one global pool.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cut::{CutFamily, LinearCut, Permutation};
use crate::error::{Error, Result};
use crate::instance::{two_weight_profile, Instance, TwoWeightProfile};
use crate::lift_epi::{ali_cut, epi_cut, lifted_epi_cut};
use crate::lift_si::{best_i0, lower_si_cut, SiParams, WeightClass};
use crate::lp::{self, Basis, LpProblem, LpStatus, Relation, Row, Sense};

const INT_TOL: f64 = 1e-6;
const CUT_EVERY: usize = 10;
const MAX_ROUNDS_PER_NODE: usize = 200;

/// `-λ·x + Ω·f(a·x)`; `Ω = sqrt((1 - ε) / ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRiskObjective {
    pub lambda: Vec<f64>,
    pub omega: f64,
    pub epsilon: f64,
}

impl MeanRiskObjective {
    pub fn from_epsilon(lambda: Vec<f64>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::Input(format!("epsilon must lie in (0, 0.5), got {epsilon}")));
        }
        Self::check_lambda(&lambda)?;
        Ok(Self { lambda, omega: ((1.0 - epsilon) / epsilon).sqrt(), epsilon })
    }

    /// Direct `Ω`; the recorded ε is `1 / (1 + Ω²)`.
    pub fn with_omega(lambda: Vec<f64>, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::Input(format!("omega must be finite and >= 0, got {omega}")));
        }
        Self::check_lambda(&lambda)?;
        Ok(Self { lambda, omega, epsilon: 1.0 / (1.0 + omega * omega) })
    }

    fn check_lambda(lambda: &[f64]) -> Result<()> {
        if lambda.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("lambda entries must be finite".into()));
        }
        Ok(())
    }

    /// Objective at a 0/1 point.
    pub fn value(&self, inst: &Instance, x: &[f64]) -> f64 {
        let lin: f64 = self.lambda.iter().zip(x).map(|(l, v)| l * v).sum();
        -lin + self.omega * inst.eval_point(x)
    }

    /// Objective at the indicator vector of `s`.
    pub fn value_of_set(&self, inst: &Instance, s: &[usize]) -> f64 {
        let lin: f64 = s.iter().map(|&i| self.lambda[i]).sum();
        -lin + self.omega * inst.f().eval(inst.weight_of(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    LepiLsi,
    Ali,
    #[serde(rename = "nocuts")]
    NoCuts,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::LepiLsi, Strategy::Ali, Strategy::NoCuts];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::LepiLsi => "lepi-lsi",
            Self::Ali => "ali",
            Self::NoCuts => "nocuts",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "lepi-lsi" => Ok(Self::LepiLsi),
            "ali" => Ok(Self::Ali),
            "nocuts" | "no-cuts" => Ok(Self::NoCuts),
            other => Err(Error::Parse(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub time_limit: Option<Duration>,
    /// Nodes explored after the root; the root LP is always solved.
    pub node_limit: Option<usize>,
    /// Relative optimality tolerance used for pruning.
    pub rel_gap: f64,
    /// Stop early once the gap falls to this value.
    pub gap_limit: Option<f64>,
}

impl Default for Limits {
    fn default() -> Self {
        Self { time_limit: None, node_limit: None, rel_gap: 1e-4, gap_limit: None }
    }
}

impl Limits {
    /// No limits and a pruning tolerance tight enough for exact comparisons.
    pub fn exact() -> Self {
        Self { rel_gap: 1e-10, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    GapLimit,
    NodeLimit,
    TimeLimit,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Optimal => "optimal",
            Self::GapLimit => "gap-limit",
            Self::NodeLimit => "node-limit",
            Self::TimeLimit => "time-limit",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCounts {
    pub lifted_epi: usize,
    pub lower_si: usize,
    pub ali: usize,
    /// Epigraph cuts added at integer points.
    pub lazy: usize,
}

impl CutCounts {
    /// User cuts, excluding lazy ones.
    pub fn user_total(&self) -> usize {
        self.lifted_epi + self.lower_si + self.ali
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub strategy: Strategy,
    pub status: SolveStatus,
    /// Incumbent value (upper bound).
    pub objective: f64,
    pub bound: f64,
    pub gap: f64,
    /// Explored nodes, i.e. nodes whose LP was solved.
    pub nodes: usize,
    pub cuts: CutCounts,
    pub lp_iterations: usize,
    /// Support of the incumbent, 0-based.
    pub solution: Vec<usize>,
    pub time_s: f64,
}

impl SolveReport {
    /// Equality on everything except wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let mut a = self.clone();
        a.time_s = other.time_s;
        a == *other
    }

    /// `key = value` lines.
    pub fn to_structured_text(&self) -> String {
        let support: Vec<String> = self.solution.iter().map(|i| (i + 1).to_string()).collect();
        format!(
            "strategy = {}\nstatus = {}\nobjective = {:.9}\nbound = {:.9}\ngap = {:.3e}\nnodes = {}\ncuts_lepi = {}\ncuts_lsi = {}\ncuts_ali = {}\ncuts_lazy = {}\nlp_iterations = {}\nsolution = [{}]\ntime_s = {:.3}\n",
            self.strategy,
            self.status,
            self.objective,
            self.bound,
            self.gap,
            self.nodes,
            self.cuts.lifted_epi,
            self.cuts.lower_si,
            self.cuts.ali,
            self.cuts.lazy,
            self.lp_iterations,
            support.join(","),
            self.time_s
        )
    }
}

/// `(UB - LB) / max(|UB|, 1e-12)`.
pub fn relative_gap(ub: f64, lb: f64) -> f64 {
    if ub == f64::INFINITY || lb == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    ((ub - lb) / ub.abs().max(1e-12)).max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub fixed0: Vec<usize>,
    pub fixed1: Vec<usize>,
    /// Basis of the parent's final LP, for warm starting.
    pub basis: Option<Basis>,
    pub bound: f64,
    pub depth: usize,
}

impl NodeState {
    pub fn root() -> Self {
        Self { fixed0: vec![], fixed1: vec![], basis: None, bound: f64::NEG_INFINITY, depth: 0 }
    }
}

/// Most fractional coordinate, ties to the lowest index.
pub fn branching_variable(xbar: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in xbar.iter().enumerate() {
        let frac = v.min(1.0 - v);
        if frac <= INT_TOL {
            continue;
        }
        if best.is_none_or(|(_, b)| frac > b + 1e-12) {
            best = Some((i, frac));
        }
    }
    best.map(|(i, _)| i)
}

/// Splits `node` on the most fractional coordinate of `xbar`; the children
/// carry the node's basis and `bound`.
pub fn branch(node: &NodeState, xbar: &[f64]) -> Result<(NodeState, NodeState)> {
    let j = branching_variable(xbar).ok_or_else(|| Error::Logic("branching on an integral point".into()))?;
    let mut zero = node.clone();
    zero.fixed0.push(j);
    zero.depth += 1;
    let mut one = node.clone();
    one.fixed1.push(j);
    one.depth += 1;
    Ok((zero, one))
}

fn is_integral(x: &[f64]) -> bool {
    x.iter().all(|v| v.min(1.0 - v).abs() <= INT_TOL)
}

/// Order placing the support first, each part by descending weight then index.
fn support_first(inst: &Instance, support: &[bool]) -> Permutation {
    let a = inst.a();
    let mut order: Vec<usize> = (0..inst.n()).collect();
    order.sort_by(|&i, &j| support[j].cmp(&support[i]).then(a[j].total_cmp(&a[i])).then(i.cmp(&j)));
    Permutation::new(order).expect("sorted indices form a permutation")
}

/// Epigraph cut separating `(w*, x*)` at an integer point: the lifted-EPI
/// (plain EPI when the weights are not two-valued) with the support first.
pub fn lazy_integer_cut(inst: &Instance, x: &[f64], w: f64) -> Result<LinearCut> {
    if x.len() != inst.n() {
        return Err(Error::Input("point has the wrong dimension".into()));
    }
    if !is_integral(x) {
        return Err(Error::Input("lazy cuts need an integer point".into()));
    }
    let support: Vec<bool> = x.iter().map(|v| *v > 0.5).collect();
    if support.iter().filter(|&&s| s).count() > inst.k() {
        return Err(Error::Input("point violates the cardinality bound".into()));
    }
    let fx = inst.eval_point(x);
    if w >= fx - 1e-9 * (1.0 + fx.abs()) {
        return Err(Error::Logic(format!("w = {w} already satisfies f(a·x) = {fx}")));
    }
    let perm = support_first(inst, &support);
    if two_weight_profile(inst).is_ok() {
        lifted_epi_cut(inst, &perm)
    } else {
        epi_cut(inst, &perm)
    }
}

/// Valid lower bound on `w`: `min(0, f(t a_L + s a_H))` over feasible counts,
/// or `min(0, f(sum of the k largest weights))` for other weight vectors.
fn w_lower_bound(inst: &Instance, prof: Option<&TwoWeightProfile>) -> f64 {
    let f = inst.f();
    let k = inst.k();
    match prof {
        Some(p) => {
            let mut lb: f64 = 0.0;
            for t in 0..=k.min(p.il.len()) {
                for s in 0..=(k - t).min(p.ih.len()) {
                    lb = lb.min(f.eval(t as f64 * p.a_l + s as f64 * p.a_h));
                }
            }
            lb
        }
        None => {
            let mut a = inst.a().to_vec();
            a.sort_by(|x, y| y.total_cmp(x));
            0f64.min(f.eval(a.iter().take(k).sum()))
        }
    }
}

/// Greedy starting incumbent: add the item with the best objective change
/// while it improves.
fn greedy_incumbent(inst: &Instance, obj: &MeanRiskObjective) -> (Vec<usize>, f64) {
    let mut set: Vec<usize> = Vec::new();
    let mut val = obj.value_of_set(inst, &set);
    while set.len() < inst.k() {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..inst.n() {
            if set.contains(&i) {
                continue;
            }
            set.push(i);
            let v = obj.value_of_set(inst, &set);
            set.pop();
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        }
        match best {
            Some((i, v)) if v < val => {
                set.push(i);
                val = v;
            }
            _ => break,
        }
    }
    set.sort_unstable();
    (set, val)
}

struct Queued {
    bound: f64,
    seq: usize,
    node: NodeState,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    // Max-heap: smallest bound first, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(other.seq.cmp(&self.seq))
    }
}

struct CutPool {
    cuts: Vec<LinearCut>,
    keys: HashSet<Vec<i64>>,
}

impl CutPool {
    fn key(cut: &LinearCut) -> Vec<i64> {
        cut.normalized().iter().map(|v| (v * 1e9).round() as i64).collect()
    }

    /// `false` for duplicates.
    fn insert(&mut self, cut: LinearCut) -> bool {
        if self.keys.insert(Self::key(&cut)) {
            self.cuts.push(cut);
            true
        } else {
            false
        }
    }
}

fn cut_row(cut: &LinearCut) -> Row {
    let mut coeffs: Vec<f64> = cut.pi.iter().map(|c| -c).collect();
    coeffs.push(1.0);
    Row::new(coeffs, Relation::Ge, cut.pi0)
}

struct Solver<'a> {
    inst: &'a Instance,
    obj: &'a MeanRiskObjective,
    strategy: Strategy,
    prof: Option<TwoWeightProfile>,
    lp: LpProblem,
    pool: CutPool,
    counts: CutCounts,
    lp_iterations: usize,
    ub: f64,
    incumbent: Vec<usize>,
}

impl Solver<'_> {
    fn solve_lp(&mut self, warm: Option<&Basis>) -> Result<lp::LpSolution> {
        let sol = match warm {
            Some(b) => {
                let extra = self.lp.num_rows() - b.rows.len();
                lp::solve(&self.lp, Some(&b.with_added_rows(extra)))?
            }
            None => lp::solve(&self.lp, None)?,
        };
        self.lp_iterations += sol.iterations;
        if sol.status == LpStatus::IterLimit || sol.status == LpStatus::Unbounded {
            return Err(Error::Lp(format!("node relaxation ended with {:?}", sol.status)));
        }
        Ok(sol)
    }

    fn set_node_bounds(&mut self, node: &NodeState) {
        let n = self.inst.n();
        for j in 0..n {
            self.lp.lower[j] = 0.0;
            self.lp.upper[j] = 1.0;
        }
        for &j in &node.fixed0 {
            self.lp.upper[j] = 0.0;
        }
        for &j in &node.fixed1 {
            self.lp.lower[j] = 1.0;
        }
    }

    fn add_cut(&mut self, cut: LinearCut, lazy: bool) -> bool {
        let row = cut_row(&cut);
        let family = cut.family;
        if !self.pool.insert(cut) {
            return false;
        }
        self.lp.rows.push(row);
        if lazy {
            self.counts.lazy += 1;
            return true;
        }
        match family {
            CutFamily::LiftedEpi => self.counts.lifted_epi += 1,
            CutFamily::LowerSi => self.counts.lower_si += 1,
            CutFamily::Ali => self.counts.ali += 1,
            _ => {}
        }
        true
    }

    fn user_cut(&self, x: &[f64], w: f64) -> Result<Option<LinearCut>> {
        let perm = Permutation::descending_by(x);
        let cut = match self.strategy {
            Strategy::NoCuts => return Ok(None),
            Strategy::Ali => ali_cut(self.inst, &perm)?,
            Strategy::LepiLsi => {
                let lepi = lifted_epi_cut(self.inst, &perm)?;
                let prof = self.prof.as_ref().expect("cut strategies hold a profile");
                if prof.il.len() >= self.inst.k() {
                    let i0 = best_i0(self.inst, x)?;
                    let lsi = lower_si_cut(self.inst, &SiParams::descending(prof, WeightClass::Lower, i0, x))?;
                    if lsi.violation(w, x) > lepi.violation(w, x) {
                        lsi
                    } else {
                        lepi
                    }
                } else {
                    lepi
                }
            }
        };
        Ok((cut.violation(w, x) > 1e-6 * (1.0 + w.abs())).then_some(cut))
    }
}

/// Solves the mean-risk problem on `inst` with the given cut strategy.
pub fn solve(inst: &Instance, obj: &MeanRiskObjective, strategy: Strategy, limits: &Limits) -> Result<SolveReport> {
    solve_with_pool(inst, obj, strategy, limits).map(|(r, _)| r)
}

/// As [`solve`], also returning the final cut pool.
pub fn solve_with_pool(
    inst: &Instance,
    obj: &MeanRiskObjective,
    strategy: Strategy,
    limits: &Limits,
) -> Result<(SolveReport, Vec<LinearCut>)> {
    let start = Instant::now();
    let n = inst.n();
    if obj.lambda.len() != n {
        return Err(Error::Input(format!("lambda has {} entries for n = {n}", obj.lambda.len())));
    }
    let prof = match strategy {
        Strategy::NoCuts => two_weight_profile(inst).ok(),
        _ => Some(two_weight_profile(inst)?),
    };

    let mut objective: Vec<f64> = obj.lambda.iter().map(|l| -l).collect();
    objective.push(obj.omega);
    let mut lp = LpProblem::new(Sense::Minimize, objective);
    for j in 0..n {
        lp.set_bounds(j, 0.0, 1.0);
    }
    lp.set_bounds(n, w_lower_bound(inst, prof.as_ref()), f64::INFINITY);
    let mut card = vec![1.0; n];
    card.push(0.0);
    lp.add_row(card, Relation::Le, inst.k() as f64);

    let (incumbent, ub) = greedy_incumbent(inst, obj);
    let mut s = Solver {
        inst,
        obj,
        strategy,
        prof,
        lp,
        pool: CutPool { cuts: vec![], keys: HashSet::new() },
        counts: CutCounts::default(),
        lp_iterations: 0,
        ub,
        incumbent,
    };

    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Queued { bound: f64::NEG_INFINITY, seq, node: NodeState::root() });
    let mut explored = 0usize;
    // Smallest bound among nodes discarded within the pruning tolerance.
    let mut pruned_lb = f64::INFINITY;
    let mut stop: Option<SolveStatus> = None;
    let prune_tol = |ub: f64| limits.rel_gap * ub.abs().max(1e-12);

    while let Some(top) = heap.peek() {
        if top.bound >= s.ub - prune_tol(s.ub) {
            let q = heap.pop().expect("peeked");
            pruned_lb = pruned_lb.min(q.bound);
            continue;
        }
        if explored > 0 {
            if limits.time_limit.is_some_and(|t| start.elapsed() >= t) {
                stop = Some(SolveStatus::TimeLimit);
                break;
            }
            if limits.node_limit.is_some_and(|m| explored >= m.max(1)) {
                stop = Some(SolveStatus::NodeLimit);
                break;
            }
            if let Some(g) = limits.gap_limit {
                if relative_gap(s.ub, top.bound.min(pruned_lb)) <= g {
                    stop = Some(SolveStatus::GapLimit);
                    break;
                }
            }
        }
        let Queued { node, .. } = heap.pop().expect("peeked");
        explored += 1;
        s.set_node_bounds(&node);
        let mut sol = s.solve_lp(node.basis.as_ref())?;
        let mut user_cut_done = false;
        for round in 0.. {
            if round == MAX_ROUNDS_PER_NODE {
                return Err(Error::Logic("cut loop did not settle".into()));
            }
            if sol.status == LpStatus::Infeasible {
                break;
            }
            let bound = sol.objective;
            if bound >= s.ub - prune_tol(s.ub) {
                pruned_lb = pruned_lb.min(bound);
                break;
            }
            let x = &sol.x[..n];
            let w = sol.x[n];
            if is_integral(x) {
                let xr: Vec<f64> = x.iter().map(|v| v.round()).collect();
                let val = s.obj.value(inst, &xr);
                if val < s.ub {
                    s.ub = val;
                    s.incumbent = (0..n).filter(|&i| xr[i] > 0.5).collect();
                }
                let fx = inst.eval_point(&xr);
                if w < fx - 1e-9 * (1.0 + fx.abs()) {
                    let cut = lazy_integer_cut(inst, &xr, w)?;
                    if !s.add_cut(cut, true) {
                        return Err(Error::Logic("lazy cut already pooled but violated".into()));
                    }
                    sol = s.solve_lp(Some(&sol.basis))?;
                    continue;
                }
                // Integral and feasible: the LP value is the point's value.
                break;
            }
            if !user_cut_done && explored.is_multiple_of(CUT_EVERY) {
                user_cut_done = true;
                if let Some(cut) = s.user_cut(x, w)? {
                    if s.add_cut(cut, false) {
                        sol = s.solve_lp(Some(&sol.basis))?;
                        continue;
                    }
                }
            }
            let mut here = node.clone();
            here.basis = Some(sol.basis.clone());
            here.bound = bound;
            let (zero, one) = branch(&here, x)?;
            for child in [zero, one] {
                seq += 1;
                heap.push(Queued { bound, seq, node: child });
            }
            break;
        }
    }

    let open_lb = heap.peek().map_or(f64::INFINITY, |q| q.bound);
    let lb = s.ub.min(open_lb).min(pruned_lb);
    let report = SolveReport {
        strategy,
        status: stop.unwrap_or(SolveStatus::Optimal),
        objective: s.ub,
        bound: lb,
        gap: relative_gap(s.ub, lb),
        nodes: explored,
        cuts: s.counts,
        lp_iterations: s.lp_iterations,
        solution: s.incumbent,
        time_s: start.elapsed().as_secs_f64(),
    };
    Ok((report, s.pool.cuts))
}

/// Best objective over all supports of size at most `k`.
pub fn brute_force(inst: &Instance, obj: &MeanRiskObjective) -> (Vec<usize>, f64) {
    fn rec(inst: &Instance, obj: &MeanRiskObjective, start: usize, set: &mut Vec<usize>, best: &mut (Vec<usize>, f64)) {
        let v = obj.value_of_set(inst, set);
        if v < best.1 {
            *best = (set.clone(), v);
        }
        if set.len() == inst.k() {
            return;
        }
        for i in start..inst.n() {
            set.push(i);
            rec(inst, obj, i + 1, set, best);
            set.pop();
        }
    }
    let mut best = (vec![], f64::INFINITY);
    rec(inst, obj, 0, &mut vec![], &mut best);
    best
}
