//! Bounded dual simplex over a kernel basis representation.
//!
//! Every row `i` gets a logical `s_i = a_i · x` bounded by the row relation,
//! so the constraint matrix is `[A | -I]` with zero right-hand side. A basis
//! is fully described by its basic structurals `C` and the rows `R` whose
//! logicals are nonbasic; `|C| = |R|` and the only matrix ever factored is
//! the kernel `A[R, C]`. With few columns and many cut rows this kernel stays
//! small no matter how many rows are added.
//!
//! Infinite bounds are replaced by `±big` so that every nonbasic variable has
//! a finite resting value and the method starts dual feasible from any basis.
//! Once the boxed problem is optimal, variables resting on an artificial
//! bound either prove unboundedness (nonzero reduced cost) or are moved back
//! to a real bound by primal ratio steps.

use super::lu::DenseLu;
use super::problem::{LpProblem, Sense};
use super::{Basis, LpSolution, LpStatus, VarStatus};
use crate::error::{Error, Result};

/// Tolerances and limits for [`Simplex`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iter: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub pivot_tol: f64,
    /// Magnitude used in place of infinite bounds.
    pub big: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_iter: 50_000, bland_after: 1_000, feas_tol: 1e-7, opt_tol: 1e-9, pivot_tol: 1e-10, big: 1e7 }
    }
}

/// Single-threaded solver handle. Cheap to create; holds only options.
#[derive(Debug, Clone, Default)]
pub struct Simplex {
    pub options: SimplexOptions,
}

impl Simplex {
    pub fn new(options: SimplexOptions) -> Self {
        Self { options }
    }

    pub fn solve(&mut self, p: &LpProblem, warm: Option<&Basis>) -> Result<LpSolution> {
        p.validate()?;
        let mut engine = Engine::new(p, self.options);
        let warm_ok = match warm {
            Some(b) => engine.load_basis(b),
            None => false,
        };
        if !warm_ok {
            engine.slack_basis();
        }
        let status = match engine.run() {
            Ok(s) => s,
            Err(_) if warm_ok => {
                // Numerical trouble from a stale basis: retry cold once.
                engine.slack_basis();
                engine.run()?
            }
            Err(e) => return Err(e),
        };
        Ok(engine.extract(status))
    }
}

struct Engine<'p> {
    p: &'p LpProblem,
    n: usize,
    m: usize,
    opts: SimplexOptions,
    /// Internal minimization costs, length `n + m`.
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    real_lo: Vec<bool>,
    real_hi: Vec<bool>,
    status: Vec<VarStatus>,
    x: Vec<f64>,
    basic_cols: Vec<usize>,
    nb_rows: Vec<usize>,
    lu: DenseLu,
    /// `u_i` on kernel rows, zero elsewhere.
    u: Vec<f64>,
    d: Vec<f64>,
    iterations: usize,
}

impl<'p> Engine<'p> {
    fn new(p: &'p LpProblem, opts: SimplexOptions) -> Self {
        let n = p.num_cols();
        let m = p.num_rows();
        let sign = match p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut cost = vec![0.0; n + m];
        for j in 0..n {
            cost[j] = sign * p.objective[j];
        }
        let mut lo = Vec::with_capacity(n + m);
        let mut hi = Vec::with_capacity(n + m);
        let mut real_lo = Vec::with_capacity(n + m);
        let mut real_hi = Vec::with_capacity(n + m);
        let bounds = (0..n).map(|j| (p.lower[j], p.upper[j])).chain(p.rows.iter().map(|r| r.activity_bounds()));
        for (l, h) in bounds {
            real_lo.push(l.is_finite());
            real_hi.push(h.is_finite());
            lo.push(if l.is_finite() { l } else { -opts.big });
            hi.push(if h.is_finite() { h } else { opts.big });
        }
        Self {
            p,
            n,
            m,
            opts,
            cost,
            lo,
            hi,
            real_lo,
            real_hi,
            status: vec![VarStatus::AtLower; n + m],
            x: vec![0.0; n + m],
            basic_cols: Vec::new(),
            nb_rows: Vec::new(),
            lu: DenseLu::empty(),
            u: vec![0.0; m],
            d: vec![0.0; n + m],
            iterations: 0,
        }
    }

    #[inline]
    fn a(&self, i: usize, j: usize) -> f64 {
        self.p.rows[i].coeffs[j]
    }

    fn resting_status(&self, j: usize) -> VarStatus {
        if self.real_lo[j] {
            VarStatus::AtLower
        } else if self.real_hi[j] {
            VarStatus::AtUpper
        } else {
            VarStatus::Free
        }
    }

    fn slack_basis(&mut self) {
        for j in 0..self.n {
            self.status[j] = self.resting_status(j);
        }
        for i in 0..self.m {
            self.status[self.n + i] = VarStatus::Basic;
        }
        self.iterations = 0;
    }

    /// Installs a warm basis; returns false if it does not fit this problem.
    fn load_basis(&mut self, b: &Basis) -> bool {
        if b.cols.len() != self.n || b.rows.len() != self.m {
            return false;
        }
        let basic_c = b.cols.iter().filter(|s| **s == VarStatus::Basic).count();
        let nonbasic_r = b.rows.iter().filter(|s| **s != VarStatus::Basic).count();
        if basic_c != nonbasic_r {
            return false;
        }
        for (j, s) in b.cols.iter().chain(&b.rows).enumerate() {
            self.status[j] = match s {
                VarStatus::Free if self.real_lo[j] || self.real_hi[j] => self.resting_status(j),
                other => *other,
            };
        }
        true
    }

    fn refactor(&mut self) -> Result<()> {
        self.basic_cols = (0..self.n).filter(|&j| self.status[j] == VarStatus::Basic).collect();
        self.nb_rows = (0..self.m).filter(|&i| self.status[self.n + i] != VarStatus::Basic).collect();
        let r = self.basic_cols.len();
        if r != self.nb_rows.len() {
            return Err(Error::Lp(format!(
                "basis shape mismatch: {r} basic columns vs {} tight rows",
                self.nb_rows.len()
            )));
        }
        let mut k = Vec::with_capacity(r * r);
        for &i in &self.nb_rows {
            for &j in &self.basic_cols {
                k.push(self.a(i, j));
            }
        }
        self.lu = DenseLu::factor(r, k, self.opts.pivot_tol).ok_or_else(|| Error::Lp("singular basis".into()))?;
        Ok(())
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            VarStatus::AtLower => self.lo[j],
            VarStatus::AtUpper => self.hi[j],
            VarStatus::Free => 0.0,
            VarStatus::Basic => self.x[j],
        }
    }

    fn compute_primal(&mut self) {
        let n = self.n;
        for j in 0..n + self.m {
            if self.status[j] != VarStatus::Basic {
                self.x[j] = self.nonbasic_value(j);
            }
        }
        let mut v: Vec<f64> = self
            .nb_rows
            .iter()
            .map(|&i| {
                let row = &self.p.rows[i].coeffs;
                let mut s = self.x[n + i];
                for j in 0..n {
                    if self.status[j] != VarStatus::Basic {
                        s -= row[j] * self.x[j];
                    }
                }
                s
            })
            .collect();
        self.lu.solve(&mut v);
        for (b, &j) in self.basic_cols.iter().enumerate() {
            self.x[j] = v[b];
        }
        for i in 0..self.m {
            if self.status[n + i] == VarStatus::Basic {
                self.x[n + i] = self.p.rows[i].activity(&self.x[..n]);
            }
        }
    }

    fn compute_duals(&mut self) {
        let n = self.n;
        let mut rhs: Vec<f64> = self.basic_cols.iter().map(|&j| self.cost[j]).collect();
        self.lu.solve_transpose(&mut rhs);
        self.u.iter_mut().for_each(|v| *v = 0.0);
        for (a, &i) in self.nb_rows.iter().enumerate() {
            self.u[i] = rhs[a];
        }
        for j in 0..n {
            self.d[j] = if self.status[j] == VarStatus::Basic {
                0.0
            } else {
                let mut s = self.cost[j];
                for &i in &self.nb_rows {
                    s -= self.a(i, j) * self.u[i];
                }
                s
            };
        }
        for i in 0..self.m {
            self.d[n + i] = if self.status[n + i] == VarStatus::Basic { 0.0 } else { self.u[i] };
        }
    }

    /// Moves nonbasic variables to the bound matching their reduced cost.
    fn restore_dual_feasibility(&mut self) -> bool {
        let mut changed = false;
        for j in 0..self.n + self.m {
            let s = self.status[j];
            if s == VarStatus::Basic || self.lo[j] == self.hi[j] {
                continue;
            }
            let want = if self.d[j] > self.opts.opt_tol {
                VarStatus::AtLower
            } else if self.d[j] < -self.opts.opt_tol {
                VarStatus::AtUpper
            } else {
                continue;
            };
            if s != want {
                self.status[j] = want;
                changed = true;
            }
        }
        changed
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lo[j] {
            self.lo[j] - v
        } else if v > self.hi[j] {
            v - self.hi[j]
        } else {
            0.0
        }
    }

    fn choose_leaving(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        let basics = self
            .basic_cols
            .iter()
            .copied()
            .chain((0..self.m).filter(|&i| self.status[self.n + i] == VarStatus::Basic).map(|i| self.n + i));
        for j in basics {
            let inf = self.infeasibility(j);
            if inf <= self.opts.feas_tol {
                continue;
            }
            match best {
                None => best = Some((j, inf)),
                Some((bj, binf)) => {
                    let better = if bland { j < bj } else { inf > binf || (inf == binf && j < bj) };
                    if better {
                        best = Some((j, inf));
                    }
                }
            }
        }
        best.map(|(j, _)| j)
    }

    /// Row `p` of `B^{-1} [A | -I]` over all variables.
    fn row_alpha(&self, p: usize) -> Vec<f64> {
        let n = self.n;
        let r = self.basic_cols.len();
        let mut u = vec![0.0; r];
        let mut extra: Option<usize> = None;
        if p < n {
            let q = self.basic_cols.iter().position(|&j| j == p).expect("leaving column is basic");
            u[q] = 1.0;
        } else {
            let ip = p - n;
            for (b, &j) in self.basic_cols.iter().enumerate() {
                u[b] = self.a(ip, j);
            }
            extra = Some(ip);
        }
        self.lu.solve_transpose(&mut u);
        let mut alpha = vec![0.0; n + self.m];
        for j in 0..n {
            if self.status[j] == VarStatus::Basic {
                continue;
            }
            let mut s = 0.0;
            for (a, &i) in self.nb_rows.iter().enumerate() {
                s += self.a(i, j) * u[a];
            }
            if let Some(ip) = extra {
                s -= self.a(ip, j);
            }
            alpha[j] = s;
        }
        for (a, &i) in self.nb_rows.iter().enumerate() {
            alpha[n + i] = -u[a];
        }
        alpha
    }

    /// Dual ratio test (two-pass Harris); `dir` is +1 when the leaving
    /// variable must increase.
    fn choose_entering(&self, alpha: &[f64], dir: f64, bland: bool) -> Option<(usize, f64)> {
        let amax = alpha.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let piv = self.opts.pivot_tol * amax.max(1.0);
        let mut cands: Vec<(usize, f64, f64)> = Vec::new();
        for j in 0..self.n + self.m {
            let s = self.status[j];
            if s == VarStatus::Basic || self.lo[j] == self.hi[j] {
                continue;
            }
            let a = alpha[j];
            if a.abs() <= piv {
                continue;
            }
            let ok = match s {
                VarStatus::AtLower => dir * a < 0.0,
                VarStatus::AtUpper => dir * a > 0.0,
                VarStatus::Free => true,
                VarStatus::Basic => false,
            };
            if !ok {
                continue;
            }
            let dj = match s {
                VarStatus::AtLower => self.d[j].max(0.0),
                VarStatus::AtUpper => (-self.d[j]).max(0.0),
                _ => self.d[j].abs(),
            };
            cands.push((j, dj, a.abs()));
        }
        if cands.is_empty() {
            return None;
        }
        if bland {
            let tmin = cands.iter().map(|c| c.1 / c.2).fold(f64::INFINITY, f64::min);
            let tol = 1e-12 * tmin.abs().max(1.0);
            let (j, dj, aj) = *cands.iter().find(|c| c.1 / c.2 <= tmin + tol).unwrap();
            return Some((j, dj / aj));
        }
        let bound = cands.iter().map(|c| (c.1 + self.opts.opt_tol) / c.2).fold(f64::INFINITY, f64::min);
        let mut best: Option<(usize, f64, f64)> = None;
        for &(j, dj, aj) in &cands {
            if dj / aj > bound {
                continue;
            }
            if best.is_none_or(|(_, _, ba)| aj > ba) {
                best = Some((j, dj, aj));
            }
        }
        best.map(|(j, dj, aj)| (j, dj / aj))
    }

    fn run(&mut self) -> Result<LpStatus> {
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            self.refactor()?;
            self.compute_duals();
            // Bound flips leave the basis and hence the duals unchanged.
            self.restore_dual_feasibility();
            self.compute_primal();
            let Some(p) = self.choose_leaving(bland) else {
                return self.finish();
            };
            if self.iterations >= self.opts.max_iter {
                return Ok(LpStatus::IterLimit);
            }
            let dir = if self.x[p] < self.lo[p] { 1.0 } else { -1.0 };
            let alpha = self.row_alpha(p);
            let Some((q, theta)) = self.choose_entering(&alpha, dir, bland) else {
                return Ok(LpStatus::Infeasible);
            };
            if theta < 1e-12 {
                degenerate += 1;
                if degenerate >= self.opts.bland_after {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.status[q] = VarStatus::Basic;
            self.status[p] = if dir > 0.0 { VarStatus::AtLower } else { VarStatus::AtUpper };
            self.iterations += 1;
        }
    }

    fn at_artificial(&self, j: usize) -> bool {
        match self.status[j] {
            VarStatus::AtLower => !self.real_lo[j],
            VarStatus::AtUpper => !self.real_hi[j],
            _ => false,
        }
    }

    /// Column of `B^{-1}` times the entering column, indexed by variable.
    fn column_direction(&self, q: usize) -> Vec<(usize, f64)> {
        let n = self.n;
        let col = |i: usize| -> f64 {
            if q < n {
                self.a(i, q)
            } else if q - n == i {
                -1.0
            } else {
                0.0
            }
        };
        let mut v: Vec<f64> = self.nb_rows.iter().map(|&i| col(i)).collect();
        self.lu.solve(&mut v);
        let mut out: Vec<(usize, f64)> = self.basic_cols.iter().copied().zip(v.iter().copied()).collect();
        for i in 0..self.m {
            if self.status[n + i] == VarStatus::Basic {
                let mut s = -col(i);
                for (b, &j) in self.basic_cols.iter().enumerate() {
                    s += self.a(i, j) * v[b];
                }
                out.push((n + i, s));
            }
        }
        out
    }

    /// Optimal for the boxed problem: decide unboundedness, then move
    /// variables off artificial bounds with primal ratio steps.
    fn finish(&mut self) -> Result<LpStatus> {
        let limit = 4 * (self.n + self.m) + 16;
        for _ in 0..limit {
            let Some(q) = (0..self.n + self.m).find(|&j| self.at_artificial(j)) else {
                return Ok(LpStatus::Optimal);
            };
            if self.d[q].abs() > self.opts.opt_tol {
                return Ok(LpStatus::Unbounded);
            }
            let cur = self.x[q];
            let (target, target_status) = if self.status[q] == VarStatus::AtLower {
                if self.real_hi[q] {
                    (self.hi[q], VarStatus::AtUpper)
                } else {
                    (0.0, VarStatus::Free)
                }
            } else if self.real_lo[q] {
                (self.lo[q], VarStatus::AtLower)
            } else {
                (0.0, VarStatus::Free)
            };
            let sgn = if target > cur { 1.0 } else { -1.0 };
            let mut step = (target - cur).abs();
            let mut block: Option<(usize, VarStatus)> = None;
            for (b, y) in self.column_direction(q) {
                // Basic variables change by -sgn * t * y.
                let rate = -sgn * y;
                if rate.abs() <= self.opts.pivot_tol {
                    continue;
                }
                let (room, st) = if rate > 0.0 {
                    ((self.hi[b] - self.x[b]).max(0.0), VarStatus::AtUpper)
                } else {
                    ((self.x[b] - self.lo[b]).max(0.0), VarStatus::AtLower)
                };
                let t = room / rate.abs();
                if t < step {
                    step = t;
                    block = Some((b, st));
                }
            }
            match block {
                Some((b, st)) => {
                    self.status[q] = VarStatus::Basic;
                    self.status[b] = st;
                }
                None => self.status[q] = target_status,
            }
            self.iterations += 1;
            self.refactor()?;
            self.compute_primal();
            self.compute_duals();
        }
        Ok(LpStatus::Optimal)
    }

    fn extract(&self, status: LpStatus) -> LpSolution {
        let n = self.n;
        let sign = match self.p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let x = self.x[..n].to_vec();
        let objective = self.p.objective_value(&x);
        LpSolution {
            status,
            objective,
            duals: self.u.iter().map(|v| sign * v).collect(),
            reduced_costs: self.d[..n].iter().map(|v| sign * v).collect(),
            x,
            basis: Basis { cols: self.status[..n].to_vec(), rows: self.status[n..].to_vec() },
            iterations: self.iterations,
        }
    }
}
