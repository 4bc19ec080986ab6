//! The convex hull of the two-weight epigraph with `k = 2`, the polar
//! separation LP, and polar facet enumeration for small instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cut::{CutFamily, LinearCut, Permutation, Provenance};
use crate::error::{Error, Result};
use crate::instance::{two_weight_profile, Instance, TwoWeightProfile};
use crate::lift_epi::{epi_cut, lifted_epi_by_position};
use crate::lift_si::{assumption_sides, check_assumption, higher_si_unchecked, lower_si_cut, SiParams, WeightClass};
use crate::lp::{self, LpProblem, LpStatus, Relation, Sense};
use crate::TOL;

/// Membership tolerance on `w`.
pub const HULL_TOL: f64 = 1e-7;
/// Maximum number of rows (feasible supports) in a separation LP.
pub const SEPARATION_ROW_CAP: usize = 100_000;
/// Seed of the random probe sample in [`enumerate_polar_facets`].
pub const PROBE_SEED: u64 = 20240917;

fn require_k2(inst: &Instance) -> Result<TwoWeightProfile> {
    if inst.k() != 2 {
        return Err(Error::Scope(format!("defined for k = 2 only, got k = {}", inst.k())));
    }
    two_weight_profile(inst)
}

/// `w >= f(2a_L)/2 x(I_L) + f(2a_H)/2 x(I_H)`.
pub fn super_average_cut(inst: &Instance) -> Result<LinearCut> {
    let prof = require_k2(inst)?;
    let f = inst.f();
    let (cl, ch) = (f.eval(2.0 * prof.a_l) / 2.0, f.eval(2.0 * prof.a_h) / 2.0);
    let pi = prof.is_high.iter().map(|&h| if h { ch } else { cl }).collect();
    Ok(LinearCut::new(0.0, pi, CutFamily::SuperAverage, Provenance::default()))
}

/// The explicit `k = 2` families, each with its distinguished item (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum P22Family {
    /// Lifted-EPI whose permutation starts with lower item `l`.
    EpiL(usize),
    /// Lifted-EPI whose permutation starts with higher item `h`.
    EpiH(usize),
    /// Lower-SI with `i0 = 0` lifting higher item `h` first.
    LowerAvg(usize),
    /// Higher-SI with `i0 = 0` lifting lower item `l` first.
    HigherAvg(usize),
}

/// Explicit `k = 2` pattern. The patterns are the exact lifted cuts only when
/// the weight condition holds at `i0 = 0`; otherwise a scope error.
pub fn p22_cut(inst: &Instance, family: P22Family) -> Result<LinearCut> {
    let prof = require_k2(inst)?;
    let f = inst.f();
    if !check_assumption(&prof, f, 2, 0) {
        let (lhs, rhs) = assumption_sides(&prof, f, 2, 0);
        return Err(Error::Scope(format!(
            "explicit k = 2 families need the weight condition at i0 = 0 ({lhs} > {rhs})"
        )));
    }
    let (al, ah) = (prof.a_l, prof.a_h);
    let (fl, fh, flh, f2l, f2h) = (f.eval(al), f.eval(ah), f.eval(al + ah), f.eval(2.0 * al), f.eval(2.0 * ah));
    let need = |i: usize, high: bool, name: &str| -> Result<()> {
        if i >= inst.n() || prof.is_high[i] != high {
            let class = if high { "higher" } else { "lower" };
            return Err(Error::Scope(format!("{name} needs a {class}-weight item, got {}", i + 1)));
        }
        Ok(())
    };
    let (pi, fam, note): (Vec<f64>, CutFamily, String) = match family {
        P22Family::EpiL(l) => {
            need(l, false, "EPI_L")?;
            let pi = (0..inst.n())
                .map(|i| {
                    if i == l {
                        fl
                    } else if prof.is_high[i] {
                        flh - fl
                    } else {
                        f2l - fl
                    }
                })
                .collect();
            (pi, CutFamily::LiftedEpi, format!("EPI_L(l={})", l + 1))
        }
        P22Family::EpiH(h) => {
            need(h, true, "EPI_H")?;
            let pi = (0..inst.n())
                .map(|i| {
                    if i == h {
                        fh
                    } else if prof.is_high[i] {
                        f2h - fh
                    } else {
                        flh - fh
                    }
                })
                .collect();
            (pi, CutFamily::LiftedEpi, format!("EPI_H(h={})", h + 1))
        }
        P22Family::LowerAvg(h) => {
            need(h, true, "LowerAvg")?;
            if prof.il.len() < 2 {
                return Err(Error::Scope("LowerAvg needs |I_L| >= 2".into()));
            }
            let half = f2l / 2.0;
            let pi = (0..inst.n())
                .map(|i| {
                    if i == h {
                        flh - half
                    } else if prof.is_high[i] {
                        f2h - flh + half
                    } else {
                        half
                    }
                })
                .collect();
            (pi, CutFamily::LowerSi, format!("LowerAvg(h={})", h + 1))
        }
        P22Family::HigherAvg(l) => {
            need(l, false, "HigherAvg")?;
            if prof.ih.len() < 2 {
                return Err(Error::Scope("HigherAvg needs |I_H| >= 2".into()));
            }
            let half = f2h / 2.0;
            let pi = (0..inst.n())
                .map(|i| {
                    if i == l {
                        flh - half
                    } else if prof.is_high[i] {
                        half
                    } else {
                        f2l - flh + half
                    }
                })
                .collect();
            (pi, CutFamily::HigherSi, format!("HigherAvg(l={})", l + 1))
        }
    };
    Ok(LinearCut::new(0.0, pi, fam, Provenance { note: Some(note), ..Default::default() }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CategoryTag {
    C1,
    C2,
    C3,
    C4,
    C5,
}

/// Category of a fractional point with its largest lower and higher items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub tag: CategoryTag,
    pub l: usize,
    pub h: usize,
}

fn argmax_in(items: &[usize], x: &[f64]) -> usize {
    let mut best = items[0];
    for &i in &items[1..] {
        if x[i] > x[best] {
            best = i;
        }
    }
    best
}

/// Assigns `xbar` to one of the five categories. Strict inequalities need a
/// margin above `1e-9`, weak ones allow `1e-9` slack; on shared boundaries
/// the lowest-numbered category wins.
pub fn classify(prof: &TwoWeightProfile, xbar: &[f64]) -> Result<Category> {
    if xbar.len() != prof.is_high.len() {
        return Err(Error::Input(format!("point has {} entries, expected {}", xbar.len(), prof.is_high.len())));
    }
    if xbar.iter().any(|v| !(-TOL..=1.0 + TOL).contains(v)) {
        return Err(Error::Input("point must lie in [0, 1]^n".into()));
    }
    let total: f64 = xbar.iter().sum();
    if total > 2.0 + TOL {
        return Err(Error::Input(format!("sum of x = {total} exceeds 2")));
    }
    let sl: f64 = prof.il.iter().map(|&i| xbar[i]).sum();
    let sh: f64 = prof.ih.iter().map(|&i| xbar[i]).sum();
    let l = argmax_in(&prof.il, xbar);
    let h = argmax_in(&prof.ih, xbar);
    let (xl2, xh2) = (2.0 * xbar[l], 2.0 * xbar[h]);
    let gt = |a: f64, b: f64| a - b > TOL;
    let le = |a: f64, b: f64| a - b <= TOL;
    let tag = if gt(xl2, total) {
        CategoryTag::C1
    } else if gt(xh2, total) {
        CategoryTag::C2
    } else if gt(sl, xl2) && gt(sh, xh2) {
        CategoryTag::C3
    } else if le(sl, xl2) && le(xl2, total) && le(xh2, total) && le(xh2 - sh, xl2 - sl) {
        CategoryTag::C4
    } else if le(sh, xh2) && le(xh2, total) && le(xl2, total) && le(xl2 - sl, xh2 - sh) {
        CategoryTag::C5
    } else {
        return Err(Error::Logic(format!("point {xbar:?} fits no category")));
    };
    Ok(Category { tag, l, h })
}

/// The designated cut of the point's category. When a family's class-size
/// precondition fails the EPI of the same distinguished item is used.
pub fn designated_cut(inst: &Instance, cat: &Category) -> Result<LinearCut> {
    let prof = require_k2(inst)?;
    match cat.tag {
        CategoryTag::C1 => p22_cut(inst, P22Family::EpiL(cat.l)),
        CategoryTag::C2 => p22_cut(inst, P22Family::EpiH(cat.h)),
        CategoryTag::C3 => super_average_cut(inst),
        CategoryTag::C4 if prof.ih.len() >= 2 => p22_cut(inst, P22Family::HigherAvg(cat.l)),
        CategoryTag::C4 => p22_cut(inst, P22Family::EpiL(cat.l)),
        CategoryTag::C5 if prof.il.len() >= 2 => p22_cut(inst, P22Family::LowerAvg(cat.h)),
        CategoryTag::C5 => p22_cut(inst, P22Family::EpiH(cat.h)),
    }
}

/// The category's designated cut if it is violated at `(wbar, xbar)` by
/// more than `1e-9`.
pub fn most_violated_cut(inst: &Instance, wbar: f64, xbar: &[f64]) -> Result<Option<LinearCut>> {
    let prof = require_k2(inst)?;
    let cat = classify(&prof, xbar)?;
    let cut = designated_cut(inst, &cat)?;
    Ok((cut.violation(wbar, xbar) > TOL).then_some(cut))
}

/// Which optional families take part in the explicit `k = 2` system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct P22System {
    pub super_average: bool,
    pub lower_avg: bool,
    pub higher_avg: bool,
}

impl Default for P22System {
    fn default() -> Self {
        Self { super_average: true, lower_avg: true, higher_avg: true }
    }
}

/// Every non-trivial inequality of the explicit system. Coefficients are
/// symmetric within a class apart from the distinguished item, so one cut
/// per distinguished item covers all permutations.
pub fn p22_system_cuts(inst: &Instance, system: P22System) -> Result<Vec<LinearCut>> {
    let prof = require_k2(inst)?;
    let mut cuts = Vec::new();
    for &l in &prof.il {
        cuts.push(p22_cut(inst, P22Family::EpiL(l))?);
    }
    for &h in &prof.ih {
        cuts.push(p22_cut(inst, P22Family::EpiH(h))?);
    }
    if system.super_average {
        cuts.push(super_average_cut(inst)?);
    }
    if system.lower_avg && prof.il.len() >= 2 {
        for &h in &prof.ih {
            cuts.push(p22_cut(inst, P22Family::LowerAvg(h))?);
        }
    }
    if system.higher_avg && prof.ih.len() >= 2 {
        for &l in &prof.il {
            cuts.push(p22_cut(inst, P22Family::HigherAvg(l))?);
        }
    }
    Ok(cuts)
}

/// Bounds, cardinality and every cut of `cuts`, all within `tol`.
pub fn satisfies_system(cuts: &[LinearCut], k: usize, wbar: f64, xbar: &[f64], tol: f64) -> bool {
    xbar.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
        && xbar.iter().sum::<f64>() <= k as f64 + tol
        && cuts.iter().all(|c| c.violation(wbar, xbar) <= tol)
}

/// A valid inequality `pi_w w >= pi0 + pi x`, `pi_w` normalized to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarRay {
    pub pi_w: f64,
    pub pi0: f64,
    pub pi: Vec<f64>,
}

impl PolarRay {
    pub fn to_cut(&self) -> LinearCut {
        LinearCut::new(self.pi0, self.pi.clone(), CutFamily::PolarRay, Provenance::default())
    }
}

/// Optimal vertex of the separation LP and its dual convex combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub ray: PolarRay,
    /// `pi0 + pi · xbar` at the optimum: the largest valid lower bound on `w`.
    pub value: f64,
    /// Supports with positive dual weight `Q(S)` (0-based items).
    pub weights: Vec<(Vec<usize>, f64)>,
    /// Supports whose rows are tight at the optimum.
    pub tight: Vec<Vec<usize>>,
}

/// All supports with at most `k` items, in size-then-lexicographic order.
pub fn feasible_supports(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 0..=k.min(n) {
        rec(0, n, size, &mut Vec::new(), &mut out);
    }
    out
}

fn support_count(n: usize, k: usize) -> usize {
    let mut total: usize = 0;
    let mut c: usize = 1;
    for s in 0..=k.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul(n - s) / (s + 1);
    }
    total
}

/// Reusable separation LP over all supports of size at most `k`.
#[derive(Debug, Clone)]
pub struct SeparationLp {
    supports: Vec<Vec<usize>>,
    problem: LpProblem,
}

impl SeparationLp {
    pub fn new(inst: &Instance, k: usize) -> Result<Self> {
        let n = inst.n();
        if k == 0 || k > n {
            return Err(Error::Input(format!("k = {k} must lie in [1, {n}]")));
        }
        let rows = support_count(n, k);
        if rows > SEPARATION_ROW_CAP {
            return Err(Error::Capacity(format!("{rows} supports exceed the LP cap {SEPARATION_ROW_CAP}")));
        }
        let supports = feasible_supports(n, k);
        // Columns: pi0, pi_1..pi_n, all free.
        let mut problem = LpProblem::new(Sense::Maximize, vec![0.0; n + 1]);
        for j in 0..=n {
            problem.set_free(j);
        }
        for s in &supports {
            let mut row = vec![0.0; n + 1];
            row[0] = 1.0;
            for &i in s {
                row[i + 1] = 1.0;
            }
            problem.add_row(row, Relation::Le, inst.eval_set(s)?);
        }
        Ok(Self { supports, problem })
    }

    pub fn supports(&self) -> &[Vec<usize>] {
        &self.supports
    }

    pub fn problem(&self) -> &LpProblem {
        &self.problem
    }

    /// Maximizes `pi0 + pi · xbar`; `None` when unbounded (xbar outside the
    /// cardinality polytope).
    pub fn solve(&mut self, xbar: &[f64]) -> Result<Option<Separation>> {
        let n = self.problem.num_cols() - 1;
        if xbar.len() != n {
            return Err(Error::Input(format!("point has {} entries, expected {n}", xbar.len())));
        }
        self.problem.objective[0] = 1.0;
        self.problem.objective[1..].copy_from_slice(xbar);
        let sol = lp::solve(&self.problem, None)?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Unbounded | LpStatus::Infeasible => return Ok(None),
            LpStatus::IterLimit => return Err(Error::Lp("separation LP hit the iteration limit".into())),
        }
        let ray = PolarRay { pi_w: 1.0, pi0: sol.x[0], pi: sol.x[1..].to_vec() };
        let mut weights = Vec::new();
        let mut tight = Vec::new();
        for (r, s) in self.supports.iter().enumerate() {
            if sol.duals[r] > 1e-12 {
                weights.push((s.clone(), sol.duals[r]));
            }
            let slack = self.problem.rows[r].rhs - self.problem.rows[r].activity(&sol.x);
            if slack.abs() <= HULL_TOL {
                tight.push(s.clone());
            }
        }
        Ok(Some(Separation { ray, value: sol.objective, weights, tight }))
    }
}

/// Most violated valid inequality at `xbar` (with `w` coefficient 1).
pub fn separation_lp(inst: &Instance, xbar: &[f64], k: usize) -> Result<Option<Separation>> {
    SeparationLp::new(inst, k)?.solve(xbar)
}

/// True iff `(wbar, xbar)` lies in the convex hull of feasible points with
/// at most `k` items, within `1e-7` on `w`.
pub fn hull_membership(inst: &Instance, wbar: f64, xbar: &[f64], k: usize) -> Result<bool> {
    let mut lp = SeparationLp::new(inst, k)?;
    membership_with(&mut lp, wbar, xbar)
}

pub fn membership_with(lp: &mut SeparationLp, wbar: f64, xbar: &[f64]) -> Result<bool> {
    Ok(match lp.solve(xbar)? {
        Some(sep) => wbar >= sep.value - HULL_TOL,
        None => false,
    })
}

/// Outcome of [`verify_hull`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullCheck {
    /// Probe counts per category, in tag order.
    pub per_category: Vec<(CategoryTag, usize)>,
    pub members: usize,
    pub non_members: usize,
    /// Points where the LP and the explicit system disagree.
    pub mismatches: Vec<(f64, Vec<f64>)>,
}

impl HullCheck {
    pub fn equivalent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Seeded points in `[0,1]^n` with coordinate sum at most `k`, mixing
/// uniform, near-integral and sparse points.
pub fn random_probes(n: usize, k: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|t| {
            let mut x = vec![0.0; n];
            match t % 3 {
                0 => x.iter_mut().for_each(|v| *v = rng.random::<f64>()),
                1 => {
                    for _ in 0..k {
                        x[rng.random_range(0..n)] = 1.0 - 0.1 * rng.random::<f64>();
                    }
                }
                _ => {
                    for _ in 0..2 {
                        x[rng.random_range(0..n)] = rng.random::<f64>();
                    }
                }
            }
            let s: f64 = x.iter().sum();
            let cap = k as f64 * rng.random_range(0.3..1.0);
            if s > cap {
                x.iter_mut().for_each(|v| *v *= cap / s);
            }
            x
        })
        .collect()
}

/// Compares LP hull membership with the explicit `k = 2` system on `grid`
/// seeded probes. Each probe is tested just above and just below the
/// system's bound, `1e-4` relative away.
pub fn verify_hull(inst: &Instance, grid: usize, seed: u64) -> Result<HullCheck> {
    let prof = require_k2(inst)?;
    let cuts = p22_system_cuts(inst, P22System::default())?;
    let mut lp = SeparationLp::new(inst, 2)?;
    let tags = [CategoryTag::C1, CategoryTag::C2, CategoryTag::C3, CategoryTag::C4, CategoryTag::C5];
    let mut counts = [0usize; 5];
    let (mut members, mut non_members) = (0, 0);
    let mut mismatches = Vec::new();
    for x in random_probes(inst.n(), 2, grid, seed) {
        let cat = classify(&prof, &x)?;
        counts[tags.iter().position(|t| *t == cat.tag).expect("known tag")] += 1;
        let bound = cuts.iter().map(|c| c.rhs(&x)).fold(f64::NEG_INFINITY, f64::max);
        let delta = 1e-4 * (1.0 + bound.abs());
        for w in [bound + delta, bound - delta] {
            let member = membership_with(&mut lp, w, &x)?;
            if member {
                members += 1;
            } else {
                non_members += 1;
            }
            if member != satisfies_system(&cuts, 2, w, &x, HULL_TOL) {
                mismatches.push((w, x.clone()));
            }
        }
    }
    Ok(HullCheck { per_category: tags.into_iter().zip(counts).collect(), members, non_members, mismatches })
}

/// A certified facet of the hull found by polar enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarFacet {
    pub ray: PolarRay,
    pub tight_count: usize,
    /// Affine dimension of the tight feasible points in `(w, x)` space.
    pub affine_dimension: usize,
    /// Probe index that first produced this facet.
    pub probe: usize,
}

fn rank_of(mut rows: Vec<Vec<f64>>) -> usize {
    let m = rows.len();
    if m == 0 {
        return 0;
    }
    let cols = rows[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m).max_by(|&i, &j| rows[i][c].abs().total_cmp(&rows[j][c].abs())) else {
            break;
        };
        if rows[p][c].abs() <= 1e-9 {
            continue;
        }
        rows.swap(r, p);
        for i in (r + 1)..m {
            let fac = rows[i][c] / rows[r][c];
            if fac != 0.0 {
                for j in c..cols {
                    rows[i][j] -= fac * rows[r][j];
                }
            }
        }
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

/// Probe points: each feasible support pulled 10% toward the interior
/// point `k/(2n) · 1`, followed by `point_budget` seeded random points with
/// coordinate sum at most `k`.
pub fn probe_points(n: usize, k: usize, point_budget: usize) -> Vec<Vec<f64>> {
    let c = k as f64 / (2.0 * n as f64);
    let mut pts: Vec<Vec<f64>> = feasible_supports(n, k)
        .into_iter()
        .map(|s| {
            let mut x = vec![0.1 * c; n];
            for i in s {
                x[i] += 0.9;
            }
            x
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for _ in 0..point_budget {
        let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let s: f64 = x.iter().sum();
        let cap = k as f64 * rng.random_range(0.5..1.0);
        if s > cap {
            x.iter_mut().for_each(|v| *v *= cap / s);
        }
        pts.push(x);
    }
    pts
}

/// Runs the separation LP at every probe point and keeps the distinct
/// optimal vertices whose tight feasible points have affine dimension `n`.
pub fn enumerate_polar_facets(inst: &Instance, k: usize, point_budget: usize) -> Result<Vec<PolarFacet>> {
    let n = inst.n();
    if n > 10 || k > 4 {
        return Err(Error::Capacity(format!("polar enumeration is limited to n <= 10, k <= 4 (n = {n}, k = {k})")));
    }
    let mut lp = SeparationLp::new(inst, k)?;
    let mut seen: Vec<Vec<f64>> = Vec::new();
    let mut out = Vec::new();
    for (idx, x) in probe_points(n, k, point_budget).iter().enumerate() {
        let Some(sep) = lp.solve(x)? else { continue };
        let cut = sep.ray.to_cut();
        let norm = cut.normalized();
        if seen.iter().any(|s| s.iter().zip(&norm).all(|(a, b)| (a - b).abs() <= 1e-7)) {
            continue;
        }
        let rows: Vec<Vec<f64>> = sep
            .tight
            .iter()
            .map(|s| {
                let mut v = vec![0.0; n + 1];
                v[0] = 1.0;
                for &i in s {
                    v[i + 1] = 1.0;
                }
                v
            })
            .collect();
        let dim = rank_of(rows).saturating_sub(1);
        if dim != n {
            continue;
        }
        seen.push(norm);
        out.push(PolarFacet { ray: sep.ray, tight_count: sep.tight.len(), affine_dimension: dim, probe: idx });
    }
    Ok(out)
}

/// Families from the proposed classes that reproduce a facet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FacetClass {
    Known(Vec<CutFamily>),
    Unknown,
}

fn multiset_eq(mut a: Vec<f64>, mut b: Vec<f64>, tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

/// Compares a facet against the proposed families for the instance's weight
/// classes. Items within a class are interchangeable, so a family member
/// matches iff the per-class coefficient multisets agree.
pub fn classify_facet(inst: &Instance, k: usize, ray: &PolarRay) -> Result<FacetClass> {
    let tol = 1e-7;
    if ray.pi0.abs() > tol {
        return Ok(FacetClass::Unknown);
    }
    let inst_k = inst.with_k(k)?;
    let Ok(prof) = two_weight_profile(&inst_k) else {
        return classify_general(&inst_k, ray);
    };
    let n = inst.n();
    let lows_of = |v: &[f64]| prof.il.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let highs_of = |v: &[f64]| prof.ih.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let (rl, rh) = (lows_of(&ray.pi), highs_of(&ray.pi));
    let matches = |pi: &[f64]| multiset_eq(lows_of(pi), rl.clone(), tol) && multiset_eq(highs_of(pi), rh.clone(), tol);
    let mut fams = Vec::new();

    // Lifted-EPIs: one representative per class pattern.
    let nl = prof.il.len();
    let mut found = false;
    for mask in 0u32..(1u32 << n) {
        if found || mask.count_ones() as usize != nl {
            continue;
        }
        let (mut li, mut hi) = (prof.il.iter(), prof.ih.iter());
        let order: Vec<usize> =
            (0..n).map(|p| if mask & (1 << p) != 0 { *li.next().unwrap() } else { *hi.next().unwrap() }).collect();
        let by_pos = lifted_epi_by_position(&inst_k, &prof, &order);
        let mut pi = vec![0.0; n];
        for (p, &i) in order.iter().enumerate() {
            pi[i] = by_pos[p];
        }
        found = matches(&pi);
    }
    if found {
        fams.push(CutFamily::LiftedEpi);
    }
    if nl >= k
        && (0..k).any(|i0| {
            let params = SiParams::natural(&prof, WeightClass::Lower, i0);
            lower_si_cut(&inst_k, &params).is_ok_and(|c| matches(&c.pi))
        })
    {
        fams.push(CutFamily::LowerSi);
    }
    if prof.ih.len() > k
        && (0..k).any(|i0| {
            check_assumption(&prof, inst_k.f(), k, i0)
                && matches(&higher_si_unchecked(&inst_k, &prof, &SiParams::natural(&prof, WeightClass::Higher, i0)).pi)
        })
    {
        fams.push(CutFamily::HigherSi);
    }
    if k == 2 && super_average_cut(&inst_k).is_ok_and(|c| matches(&c.pi)) {
        fams.push(CutFamily::SuperAverage);
    }
    Ok(if fams.is_empty() { FacetClass::Unknown } else { FacetClass::Known(fams) })
}

impl FacetClass {
    pub fn label(&self) -> String {
        match self {
            FacetClass::Known(v) => {
                format!("known: {}", v.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", "))
            }
            FacetClass::Unknown => "unknown".into(),
        }
    }
}

/// Without two weights only EPIs are recognized (by brute force, n <= 8).
fn classify_general(inst: &Instance, ray: &PolarRay) -> Result<FacetClass> {
    let n = inst.n();
    if n > 8 {
        return Ok(FacetClass::Unknown);
    }
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        let c = epi_cut(inst, &Permutation::new(order.clone())?)?;
        if c.pi.iter().zip(&ray.pi).all(|(a, b)| (a - b).abs() <= 1e-7 * (1.0 + a.abs())) {
            return Ok(FacetClass::Known(vec![CutFamily::Epi]));
        }
        if !next_permutation(&mut order) {
            return Ok(FacetClass::Unknown);
        }
    }
}

/// Lexicographic successor; false after the last permutation.
pub fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
