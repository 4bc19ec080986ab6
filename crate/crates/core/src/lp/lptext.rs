//! CPLEX LP-format dump for cross-checking with external solvers.

use std::fmt::Write;

use super::problem::{LpProblem, Relation, Sense};

fn term(out: &mut String, coef: f64, name: &str, first: bool) {
    if coef == 0.0 {
        return;
    }
    if coef < 0.0 {
        let _ = write!(out, " - {} {name}", -coef);
    } else if first {
        let _ = write!(out, " {coef} {name}");
    } else {
        let _ = write!(out, " + {coef} {name}");
    }
}

fn linear(coeffs: &[f64]) -> String {
    let mut s = String::new();
    let mut first = true;
    for (j, &c) in coeffs.iter().enumerate() {
        if c != 0.0 {
            term(&mut s, c, &format!("x{}", j + 1), first);
            first = false;
        }
    }
    if first {
        s.push_str(" 0 x1");
    }
    s
}

/// Renders `p` in CPLEX LP format; columns are named `x1..xn`, rows `r1..rm`.
pub fn to_lp_text(p: &LpProblem) -> String {
    let mut out = String::new();
    out.push_str(match p.sense {
        Sense::Minimize => "Minimize\n",
        Sense::Maximize => "Maximize\n",
    });
    let _ = writeln!(out, " obj:{}", linear(&p.objective));
    out.push_str("Subject To\n");
    for (i, row) in p.rows.iter().enumerate() {
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        let _ = writeln!(out, " r{}:{} {rel} {}", i + 1, linear(&row.coeffs), row.rhs);
    }
    out.push_str("Bounds\n");
    for j in 0..p.num_cols() {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        let name = format!("x{}", j + 1);
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " {name} free");
            }
            (true, true) => {
                let _ = writeln!(out, " {lo} <= {name} <= {hi}");
            }
            (true, false) => {
                let _ = writeln!(out, " {name} >= {lo}");
            }
            (false, true) => {
                let _ = writeln!(out, " -inf <= {name} <= {hi}");
            }
        }
    }
    out.push_str("End\n");
    out
}
