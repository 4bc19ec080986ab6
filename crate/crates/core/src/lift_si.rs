//! Separation inequalities over one weight class and their exact lifting
//! onto the other class.

use serde::{Deserialize, Serialize};

use crate::cut::{CutFamily, LinearCut, Permutation, Provenance};
use crate::error::{Error, Result};
use crate::function::ConcaveFunction;
use crate::instance::{two_weight_profile, Instance, TwoWeightProfile};
use crate::lift_epi::{lift_oracle_impl, LiftingContext, ORACLE_SUBSET_CAP};
use crate::TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightClass {
    Lower,
    Higher,
}

/// Parameters of a lower- or higher-SI. Item lists are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiParams {
    pub i0: usize,
    /// Class carrying the base SI.
    pub weight_class: WeightClass,
    pub perm_within_class: Vec<usize>,
    /// Lifting order of the other class.
    pub perm_other_class: Vec<usize>,
}

impl SiParams {
    /// Both classes in ascending index order.
    pub fn natural(prof: &TwoWeightProfile, weight_class: WeightClass, i0: usize) -> Self {
        let (within, other) = match weight_class {
            WeightClass::Lower => (prof.il.clone(), prof.ih.clone()),
            WeightClass::Higher => (prof.ih.clone(), prof.il.clone()),
        };
        Self { i0, weight_class, perm_within_class: within, perm_other_class: other }
    }

    /// Both classes by descending `xbar`, ties to the lower index.
    pub fn descending(prof: &TwoWeightProfile, weight_class: WeightClass, i0: usize, xbar: &[f64]) -> Self {
        let sort = |v: &[usize]| {
            let mut v = v.to_vec();
            v.sort_by(|&i, &j| xbar[j].total_cmp(&xbar[i]).then(i.cmp(&j)));
            v
        };
        let mut p = Self::natural(prof, weight_class, i0);
        p.perm_within_class = sort(&p.perm_within_class);
        p.perm_other_class = sort(&p.perm_other_class);
        p
    }

    /// Base class followed by the lifted class.
    pub fn order(&self) -> Vec<usize> {
        self.perm_within_class.iter().chain(&self.perm_other_class).copied().collect()
    }

    fn validate(&self, prof: &TwoWeightProfile, k: usize) -> Result<()> {
        let (within, other) = match self.weight_class {
            WeightClass::Lower => (&prof.il, &prof.ih),
            WeightClass::Higher => (&prof.ih, &prof.il),
        };
        let same = |a: &[usize], b: &[usize]| {
            let mut a = a.to_vec();
            a.sort_unstable();
            a == b
        };
        if !same(&self.perm_within_class, within) || !same(&self.perm_other_class, other) {
            return Err(Error::Input("class permutations must cover exactly their weight classes".into()));
        }
        if self.i0 >= k {
            return Err(Error::Input(format!("i0 = {} must lie in [0, {}]", self.i0, k - 1)));
        }
        Ok(())
    }
}

fn si_coefficients(f: &ConcaveFunction, count: usize, alpha: f64, k: usize, i0: usize) -> Vec<f64> {
    let psi = (f.eval(k as f64 * alpha) - f.eval(i0 as f64 * alpha)) / (k - i0) as f64;
    (0..count).map(|t| if t < i0 { f.eval((t + 1) as f64 * alpha) - f.eval(t as f64 * alpha) } else { psi }).collect()
}

/// SI over `count` items of equal weight `alpha`: the first `i0` items of
/// `perm` get their EPI marginals and the rest the averaged tail
/// `(f(k alpha) - f(i0 alpha)) / (k - i0)`.
pub fn si_cut(
    f: &ConcaveFunction,
    count: usize,
    alpha: f64,
    k: usize,
    i0: usize,
    perm: &Permutation,
) -> Result<LinearCut> {
    if k == 0 || count < k {
        return Err(Error::Input(format!("need 1 <= k <= count, got k = {k}, count = {count}")));
    }
    if i0 >= k {
        return Err(Error::Input(format!("i0 = {i0} must lie in [0, {}]", k - 1)));
    }
    if perm.len() != count {
        return Err(Error::Input(format!("permutation has {} entries, expected {count}", perm.len())));
    }
    let by_pos = si_coefficients(f, count, alpha, k, i0);
    let mut pi = vec![0.0; count];
    for (p, &i) in perm.order().iter().enumerate() {
        pi[i] = by_pos[p];
    }
    Ok(LinearCut::new(
        0.0,
        pi,
        CutFamily::Si,
        Provenance { perm: Some(perm.clone()), base_set: perm.order().to_vec(), i0: Some(i0), note: None },
    ))
}

/// Both sides of the weight condition required for exact higher-SI lifting:
/// `f(a_L + (i0+1) a_H) - f(a_L + i0 a_H)` and
/// `(f(k a_H) - f(i0 a_H)) / (k - i0)`.
pub fn assumption_sides(prof: &TwoWeightProfile, f: &ConcaveFunction, k: usize, i0: usize) -> (f64, f64) {
    let (al, ah) = (prof.a_l, prof.a_h);
    let lhs = f.eval(al + (i0 + 1) as f64 * ah) - f.eval(al + i0 as f64 * ah);
    let rhs = (f.eval(k as f64 * ah) - f.eval(i0 as f64 * ah)) / (k - i0) as f64;
    (lhs, rhs)
}

pub fn check_assumption(prof: &TwoWeightProfile, f: &ConcaveFunction, k: usize, i0: usize) -> bool {
    if i0 + 1 == k {
        return true;
    }
    let (lhs, rhs) = assumption_sides(prof, f, k, i0);
    lhs <= rhs + TOL
}

/// Lifting context with the base SI coefficients already fixed.
pub fn si_context<'a>(inst: &'a Instance, params: &SiParams) -> Result<LiftingContext<'a>> {
    let prof = two_weight_profile(inst)?;
    params.validate(&prof, inst.k())?;
    let alpha = match params.weight_class {
        WeightClass::Lower => prof.a_l,
        WeightClass::Higher => prof.a_h,
    };
    let base = si_coefficients(inst.f(), params.perm_within_class.len(), alpha, inst.k(), params.i0);
    let mut ctx = LiftingContext::new(inst, Permutation::new(params.order())?)?;
    for c in base {
        ctx.push(c)?;
    }
    Ok(ctx)
}

/// Exhaustive lifting value for position `j` of the class order; `j` must
/// belong to the lifted class.
pub fn lift_oracle_si(ctx: &LiftingContext<'_>, base_len: usize, j: usize) -> Result<f64> {
    if j < base_len {
        return Err(Error::Input(format!("position {} belongs to the base class", j + 1)));
    }
    lift_oracle_impl(ctx, j, false, ORACLE_SUBSET_CAP).map(|r| r.0)
}

/// Lifted coefficients for the other class, in lifting order. `mixed(s)`
/// returns the support weight and coefficient sum replacing `s` base items
/// by the first `s` lifted items.
fn lift_other_class(
    f: &ConcaveFunction,
    lifted_weight: f64,
    count: usize,
    k: usize,
    mut mixed: impl FnMut(usize, &[f64]) -> (f64, f64),
) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(count);
    for s in 0..count {
        let v = if s == 0 || s < k {
            let (w, c) = mixed(s, &out);
            let cand = f.eval(lifted_weight + w) - c;
            if s == 0 {
                cand
            } else {
                out[s - 1].min(cand)
            }
        } else {
            out[s - 1]
        };
        out.push(v);
    }
    out
}

fn check_lower(prof: &TwoWeightProfile, k: usize) -> Result<()> {
    if prof.il.len() < k {
        return Err(Error::Structure(format!("lower-SI needs |I_L| >= k, got {} < {k}", prof.il.len())));
    }
    Ok(())
}

/// Lower-SI: SI over the lower class, exactly lifted onto the higher class.
pub fn lower_si_cut(inst: &Instance, params: &SiParams) -> Result<LinearCut> {
    if params.weight_class != WeightClass::Lower {
        return Err(Error::Input("lower-SI needs weight_class = Lower".into()));
    }
    let prof = two_weight_profile(inst)?;
    let k = inst.k();
    check_lower(&prof, k)?;
    params.validate(&prof, k)?;
    let f = inst.f();
    let base = si_coefficients(f, prof.il.len(), prof.a_l, k, params.i0);
    let lifted = lift_other_class(f, prof.a_h, prof.ih.len(), k, |s, prev| {
        // [k-1-s] lower items plus the first s higher items.
        let w = (k - 1 - s) as f64 * prof.a_l + s as f64 * prof.a_h;
        let c = base[..k - 1 - s].iter().sum::<f64>() + prev[..s].iter().sum::<f64>();
        (w, c)
    });
    Ok(assemble(inst, params, &base, &lifted, CutFamily::LowerSi))
}

/// Higher-SI: SI over the higher class, lifted onto the lower class. Refused
/// when the weight condition fails for `i0`, since the closed form is then
/// not guaranteed valid.
pub fn higher_si_cut(inst: &Instance, params: &SiParams) -> Result<LinearCut> {
    if params.weight_class != WeightClass::Higher {
        return Err(Error::Input("higher-SI needs weight_class = Higher".into()));
    }
    let prof = two_weight_profile(inst)?;
    let k = inst.k();
    if prof.ih.len() <= k {
        return Err(Error::Structure(format!("higher-SI needs |I_H| > k, got {} <= {k}", prof.ih.len())));
    }
    params.validate(&prof, k)?;
    if !check_assumption(&prof, inst.f(), k, params.i0) {
        let (lhs, rhs) = assumption_sides(&prof, inst.f(), k, params.i0);
        return Err(Error::Assumption(format!("i0 = {}: {lhs} > {rhs}", params.i0)));
    }
    Ok(higher_si_unchecked(inst, &prof, params))
}

/// Higher-SI closed form without the weight-condition check.
pub fn higher_si_unchecked(inst: &Instance, prof: &TwoWeightProfile, params: &SiParams) -> LinearCut {
    let k = inst.k();
    let f = inst.f();
    let base = si_coefficients(f, prof.ih.len(), prof.a_h, k, params.i0);
    let lifted = lift_other_class(f, prof.a_l, prof.il.len(), k, |t, prev| {
        // The first t lower items plus [k-1-t] higher items.
        let w = t as f64 * prof.a_l + (k - 1 - t) as f64 * prof.a_h;
        let c = prev[..t].iter().sum::<f64>() + base[..k - 1 - t].iter().sum::<f64>();
        (w, c)
    });
    assemble(inst, params, &base, &lifted, CutFamily::HigherSi)
}

fn assemble(inst: &Instance, params: &SiParams, base: &[f64], lifted: &[f64], family: CutFamily) -> LinearCut {
    let mut pi = vec![0.0; inst.n()];
    for (&i, &c) in params.perm_within_class.iter().zip(base) {
        pi[i] = c;
    }
    for (&i, &c) in params.perm_other_class.iter().zip(lifted) {
        pi[i] = c;
    }
    LinearCut::new(
        0.0,
        pi,
        family,
        Provenance {
            perm: Permutation::new(params.order()).ok(),
            base_set: params.perm_within_class.clone(),
            i0: Some(params.i0),
            note: None,
        },
    )
}

/// The `i0` whose lower-SI (classes ordered by descending `xbar`) has the
/// largest right-hand side at `xbar`; ties go to the smallest `i0`.
pub fn best_i0(inst: &Instance, xbar: &[f64]) -> Result<usize> {
    let prof = two_weight_profile(inst)?;
    check_lower(&prof, inst.k())?;
    let mut best = (0, f64::NEG_INFINITY);
    for i0 in 0..inst.k() {
        let params = SiParams::descending(&prof, WeightClass::Lower, i0, xbar);
        let v = lower_si_cut(inst, &params)?.rhs(xbar);
        if v > best.1 + 1e-12 {
            best = (i0, v);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn si_formula() {
        let f = ConcaveFunction::sqrt();
        let c = si_cut(&f, 3, 4.0, 2, 1, &Permutation::identity(3)).unwrap();
        assert!((c.pi[0] - 2.0).abs() < 1e-12);
        assert!((c.pi[1] - (8f64.sqrt() - 2.0)).abs() < 1e-12);
        let c0 = si_cut(&f, 3, 4.0, 2, 0, &Permutation::identity(3)).unwrap();
        assert!(c0.pi.iter().all(|v| (v - 8f64.sqrt() / 2.0).abs() < 1e-12));
        assert!(si_cut(&f, 3, 4.0, 2, 2, &Permutation::identity(3)).is_err());
    }

    #[test]
    fn assumption_examples() {
        let f = ConcaveFunction::capped_quadratic(8.0).unwrap();
        let inst = Instance::new(vec![2.0, 5.0, 5.0], 2, f.clone()).unwrap();
        let prof = two_weight_profile(&inst).unwrap();
        // f(7) - f(2) = 63 - 28 exceeds f(10) / 2 = 30.
        assert_eq!(assumption_sides(&prof, &f, 2, 0), (35.0, 30.0));
        assert!(!check_assumption(&prof, &f, 2, 0));
        let g = ConcaveFunction::sqrt();
        assert!(check_assumption(&prof, &g, 2, 0));
        let inst = Instance::new(vec![2.0, 10.0, 10.0], 2, f.clone()).unwrap();
        let prof = two_weight_profile(&inst).unwrap();
        assert_eq!(assumption_sides(&prof, &f, 2, 0), (20.0, -40.0));
        assert!(!check_assumption(&prof, &f, 2, 0));
        assert!(check_assumption(&prof, &f, 2, 1));
    }

    #[test]
    fn k2_lower_si_pattern() {
        let f = ConcaveFunction::sqrt();
        let inst = Instance::new(vec![4.0, 100.0, 100.0, 100.0, 4.0, 4.0], 2, f.clone()).unwrap();
        let prof = two_weight_profile(&inst).unwrap();
        let c = lower_si_cut(&inst, &SiParams::natural(&prof, WeightClass::Lower, 0)).unwrap();
        let half = f.eval(8.0) / 2.0;
        assert!((c.pi[0] - half).abs() < 1e-12);
        assert!((c.pi[1] - (f.eval(104.0) - half)).abs() < 1e-12);
        assert!((c.pi[2] - (f.eval(200.0) - f.eval(104.0) + half)).abs() < 1e-12);
    }

    #[test]
    fn higher_si_refused_without_assumption() {
        let f = ConcaveFunction::capped_quadratic(8.0).unwrap();
        let inst = Instance::new(vec![2.0, 10.0, 10.0, 10.0], 2, f).unwrap();
        let prof = two_weight_profile(&inst).unwrap();
        let p = SiParams::natural(&prof, WeightClass::Higher, 0);
        assert!(matches!(higher_si_cut(&inst, &p), Err(Error::Assumption(_))));
    }
}
