//! Dense bounded-variable LP solver.

mod lptext;
mod lu;
mod problem;
mod simplex;

use serde::{Deserialize, Serialize};

pub use lptext::to_lp_text;
pub use problem::{LpProblem, Relation, Row, Sense};
pub use simplex::{Simplex, SimplexOptions};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

/// Status of a structural or logical (row) variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    Free,
}

/// Basis descriptor usable as a warm start.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub cols: Vec<VarStatus>,
    /// Status of each row's logical variable (`Basic` = row not tight).
    pub rows: Vec<VarStatus>,
}

impl Basis {
    /// The same basis with `extra` new rows whose logicals are basic.
    pub fn with_added_rows(&self, extra: usize) -> Self {
        let mut b = self.clone();
        b.rows.extend(std::iter::repeat_n(VarStatus::Basic, extra));
        b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// Row duals as the derivative of the objective with respect to the rhs.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub basis: Basis,
    pub iterations: usize,
}

/// Optimality residuals of a solution against its problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    pub primal: f64,
    /// Stationarity plus dual sign violations.
    pub dual: f64,
    pub complementarity: f64,
    /// |primal objective − dual objective|.
    pub duality_gap: f64,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn kkt(&self, p: &LpProblem) -> KktResiduals {
        let n = p.num_cols();
        let max = p.sense == Sense::Maximize;
        let mut dual: f64 = 0.0;
        let mut comp: f64 = 0.0;
        let mut dual_obj = 0.0;
        for j in 0..n {
            let mut r = p.objective[j];
            for (i, row) in p.rows.iter().enumerate() {
                r -= row.coeffs[j] * self.duals[i];
            }
            dual = dual.max((r - self.reduced_costs[j]).abs());
            // In minimization terms: r >= 0 needs x at lower, r <= 0 at upper.
            let rm = if max { -r } else { r };
            let xj = self.x[j];
            if rm > 0.0 {
                if p.lower[j].is_finite() {
                    comp = comp.max(rm * (xj - p.lower[j]).abs());
                    dual_obj += r * p.lower[j];
                } else {
                    dual = dual.max(rm);
                }
            } else if rm < 0.0 {
                if p.upper[j].is_finite() {
                    comp = comp.max(-rm * (xj - p.upper[j]).abs());
                    dual_obj += r * p.upper[j];
                } else {
                    dual = dual.max(-rm);
                }
            }
        }
        for (i, row) in p.rows.iter().enumerate() {
            let y = self.duals[i];
            let ym = if max { -y } else { y };
            let sign_violation = match row.relation {
                Relation::Le => ym.max(0.0),
                Relation::Ge => (-ym).max(0.0),
                Relation::Eq => 0.0,
            };
            dual = dual.max(sign_violation);
            comp = comp.max((y * (row.activity(&self.x) - row.rhs)).abs());
            dual_obj += y * row.rhs;
        }
        KktResiduals {
            primal: p.primal_residual(&self.x),
            dual,
            complementarity: comp,
            duality_gap: (self.objective - dual_obj).abs(),
        }
    }
}

/// Solves `p` with default options, optionally warm-started.
pub fn solve(p: &LpProblem, warm: Option<&Basis>) -> Result<LpSolution> {
    Simplex::default().solve(p, warm)
}

/// Appends `rows` to `p` and re-optimizes from the previous optimal basis.
pub fn resolve_with_added_rows(p: &mut LpProblem, prev: &LpSolution, rows: Vec<Row>) -> Result<LpSolution> {
    if prev.basis.rows.len() != p.num_rows() || prev.basis.cols.len() != p.num_cols() {
        return Err(Error::Input("previous solution does not belong to this problem".into()));
    }
    let extra = rows.len();
    p.rows.extend(rows);
    let warm = prev.basis.with_added_rows(extra);
    solve(p, Some(&warm))
}
