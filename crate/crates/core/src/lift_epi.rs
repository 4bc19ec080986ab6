//! EPIs, exactly lifted EPIs, approximate lifting, and the brute-force
//! sequential lifting oracle.
//!
//! All generators work in permuted coordinates: position `p` holds item
//! `perm[p]`. Coefficients are mapped back to item order before returning.

use crate::cut::{CutFamily, LinearCut, Permutation, Provenance};
use crate::error::{Error, Result};
use crate::instance::{two_weight_profile, Instance, TwoWeightProfile};
use crate::TOL;

/// Default cap on the number of subsets one oracle call may enumerate.
pub const ORACLE_SUBSET_CAP: u64 = 2_000_000;

/// State of a sequential lifting run: the visiting order and the
/// coefficients fixed so far, indexed by position.
#[derive(Debug, Clone)]
pub struct LiftingContext<'a> {
    pub inst: &'a Instance,
    pub profile: Option<TwoWeightProfile>,
    pub perm: Permutation,
    pub k: usize,
    coeffs: Vec<f64>,
}

impl<'a> LiftingContext<'a> {
    pub fn new(inst: &'a Instance, perm: Permutation) -> Result<Self> {
        if perm.len() != inst.n() {
            return Err(Error::Input(format!("permutation has {} entries, instance has {}", perm.len(), inst.n())));
        }
        Ok(Self { inst, profile: two_weight_profile(inst).ok(), perm, k: inst.k(), coeffs: Vec::new() })
    }

    /// Coefficients fixed so far, by position.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn push(&mut self, coeff: f64) -> Result<()> {
        if self.coeffs.len() >= self.inst.n() {
            return Err(Error::Logic("all positions already have coefficients".into()));
        }
        self.coeffs.push(coeff);
        Ok(())
    }

    fn weight_at(&self, pos: usize) -> f64 {
        self.inst.a()[self.perm.order()[pos]]
    }

    /// Maps position-indexed coefficients to item order.
    pub fn to_items(&self, by_pos: &[f64]) -> Vec<f64> {
        let mut pi = vec![0.0; by_pos.len()];
        for (p, &c) in by_pos.iter().enumerate() {
            pi[self.perm.order()[p]] = c;
        }
        pi
    }
}

/// `f(a_j + a(X)) - sum of coefficients on X`, with `j` and `X` given as
/// positions; `X` must lie among already-lifted positions before `j`.
pub fn zeta_support_value(ctx: &LiftingContext<'_>, j: usize, x: &[usize]) -> Result<f64> {
    if j >= ctx.inst.n() {
        return Err(Error::Input(format!("position {} outside the ground set", j + 1)));
    }
    if x.len() + 1 > ctx.k {
        return Err(Error::Input(format!("support of size {} exceeds k - 1 = {}", x.len(), ctx.k - 1)));
    }
    let mut seen = vec![false; j];
    let mut weight = ctx.weight_at(j);
    let mut coef = 0.0;
    for &p in x {
        if p >= j || p >= ctx.coeffs.len() || seen[p] {
            return Err(Error::Input(format!(
                "support position {} is not a distinct, already lifted predecessor of {}",
                p + 1,
                j + 1
            )));
        }
        seen[p] = true;
        weight += ctx.weight_at(p);
        coef += ctx.coeffs[p];
    }
    Ok(ctx.inst.f().eval(weight) - coef)
}

fn subset_count(m: usize, max_size: usize) -> u64 {
    let mut total: u64 = 0;
    let mut c: u64 = 1;
    for s in 0..=max_size.min(m) {
        total = total.saturating_add(c);
        c = c.saturating_mul((m - s) as u64) / (s as u64 + 1);
    }
    total
}

/// Minimum of the lifting problem for position `j` plus every minimizing
/// support (positions, lexicographic order), ties within `1e-9`.
pub fn lift_oracle_argmins(ctx: &LiftingContext<'_>, j: usize) -> Result<(f64, Vec<Vec<usize>>)> {
    lift_oracle_impl(ctx, j, true, ORACLE_SUBSET_CAP)
}

/// Minimum over all `X` among positions `0..j` with `|X| <= k - 1` of
/// `f(a_j + a(X)) - sum of coefficients on X`, by exhaustive enumeration.
pub fn lift_oracle_epi(ctx: &LiftingContext<'_>, j: usize) -> Result<f64> {
    lift_oracle_impl(ctx, j, false, ORACLE_SUBSET_CAP).map(|r| r.0)
}

pub(crate) fn lift_oracle_impl(
    ctx: &LiftingContext<'_>,
    j: usize,
    collect: bool,
    cap: u64,
) -> Result<(f64, Vec<Vec<usize>>)> {
    if j >= ctx.inst.n() {
        return Err(Error::Input(format!("position {} outside the ground set", j + 1)));
    }
    if ctx.coeffs.len() < j {
        return Err(Error::Input(format!(
            "positions before {} need coefficients first ({} fixed)",
            j + 1,
            ctx.coeffs.len()
        )));
    }
    let max_size = ctx.k - 1;
    let count = subset_count(j, max_size);
    if count > cap {
        return Err(Error::Capacity(format!("{count} subsets exceed the enumeration cap {cap}")));
    }
    let weights: Vec<f64> = (0..j).map(|p| ctx.weight_at(p)).collect();
    let f = ctx.inst.f();
    let aj = ctx.weight_at(j);
    let mut best = f64::INFINITY;
    let mut argmins: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::with_capacity(max_size);

    // Depth-first over subsets in lexicographic order.
    #[allow(clippy::too_many_arguments)]
    fn visit(
        start: usize,
        weight: f64,
        coef: f64,
        stack: &mut Vec<usize>,
        env: &mut dyn FnMut(&[usize], f64, f64),
        weights: &[f64],
        coeffs: &[f64],
        max_size: usize,
    ) {
        env(stack, weight, coef);
        if stack.len() == max_size {
            return;
        }
        for p in start..weights.len() {
            stack.push(p);
            visit(p + 1, weight + weights[p], coef + coeffs[p], stack, env, weights, coeffs, max_size);
            stack.pop();
        }
    }

    let mut record = |x: &[usize], weight: f64, coef: f64| {
        let v = f.eval(aj + weight) - coef;
        if collect {
            if v < best - TOL {
                best = v;
                argmins.clear();
                argmins.push(x.to_vec());
            } else if v <= best + TOL {
                argmins.push(x.to_vec());
                best = best.min(v);
            }
        } else if v < best {
            best = v;
        }
    };
    visit(0, 0.0, 0.0, &mut stack, &mut record, &weights, &ctx.coeffs[..j], max_size);
    if collect {
        // Drop early ties that a later strict improvement pushed out of range.
        let bv = best;
        argmins.retain(|x| {
            let w: f64 = x.iter().map(|&p| weights[p]).sum();
            let c: f64 = x.iter().map(|&p| ctx.coeffs[p]).sum();
            f.eval(aj + w) - c <= bv + TOL
        });
    }
    Ok((best, argmins))
}

/// Lifts every position from `ctx.coeffs().len()` to `n - 1` with the oracle.
pub fn lift_remaining_by_oracle(ctx: &mut LiftingContext<'_>) -> Result<Vec<f64>> {
    while ctx.coeffs.len() < ctx.inst.n() {
        let j = ctx.coeffs.len();
        let v = lift_oracle_epi(ctx, j)?;
        ctx.coeffs.push(v);
    }
    Ok(ctx.coeffs.clone())
}

/// Telescoping EPI coefficients over the whole order (valid without the
/// cardinality row).
pub fn epi_cut(inst: &Instance, perm: &Permutation) -> Result<LinearCut> {
    let ctx = LiftingContext::new(inst, perm.clone())?;
    let f = inst.f();
    let mut acc = 0.0;
    let mut prev = 0.0;
    let by_pos: Vec<f64> = perm
        .order()
        .iter()
        .map(|&i| {
            acc += inst.a()[i];
            let v = f.eval(acc);
            let rho = v - prev;
            prev = v;
            rho
        })
        .collect();
    Ok(LinearCut::new(
        0.0,
        ctx.to_items(&by_pos),
        CutFamily::Epi,
        Provenance { perm: Some(perm.clone()), base_set: perm.order().to_vec(), ..Default::default() },
    ))
}

/// Closed-form lifted-EPI coefficients by position.
pub(crate) fn lifted_epi_by_position(inst: &Instance, prof: &TwoWeightProfile, order: &[usize]) -> Vec<f64> {
    let n = inst.n();
    let k = inst.k();
    let f = inst.f();
    let km1 = k - 1;
    let mut zeta = vec![0.0; n];
    let mut prefix_w = 0.0;
    let mut prefix_f = 0.0;
    for p in 0..km1 {
        prefix_w += inst.a()[order[p]];
        let v = f.eval(prefix_w);
        zeta[p] = v - prefix_f;
        prefix_f = v;
    }
    // Lower items of the prefix in order, and the prefix's higher-part sums.
    let lower_prefix: Vec<usize> = (0..km1).filter(|&p| !prof.is_high[order[p]]).collect();
    let d_l = lower_prefix.len();
    let (mut hp_w, mut hp_c) = (0.0, 0.0);
    for p in (0..km1).filter(|&p| prof.is_high[order[p]]) {
        hp_w += prof.a_h;
        hp_c += zeta[p];
    }
    let zeta_lower = f.eval(prof.a_l + prefix_w) - prefix_f;
    let base_high = f.eval(prof.a_h + prefix_w) - prefix_f;
    let mut prev_high = base_high;
    let mut h_seq: Vec<usize> = Vec::new();
    for p in km1..n {
        if !prof.is_high[order[p]] {
            zeta[p] = zeta_lower;
            continue;
        }
        let i = h_seq.len() + 1;
        let take_h = (i - 1).min(d_l);
        let take_l = (d_l + 1).saturating_sub(i);
        let mut w = prof.a_h + hp_w;
        let mut c = hp_c;
        for &q in &h_seq[..take_h] {
            w += prof.a_h;
            c += zeta[q];
        }
        for &q in &lower_prefix[..take_l] {
            w += prof.a_l;
            c += zeta[q];
        }
        let candidate = f.eval(w) - c;
        zeta[p] = prev_high.min(candidate);
        prev_high = zeta[p];
        h_seq.push(p);
    }
    zeta
}

/// Exactly lifted EPI for a two-weight instance: the EPI over the first
/// `k - 1` items of `perm`, lifted in the remaining order.
pub fn lifted_epi_cut(inst: &Instance, perm: &Permutation) -> Result<LinearCut> {
    let ctx = LiftingContext::new(inst, perm.clone())?;
    let prof = two_weight_profile(inst)?;
    let by_pos = lifted_epi_by_position(inst, &prof, perm.order());
    Ok(LinearCut::new(
        0.0,
        ctx.to_items(&by_pos),
        CutFamily::LiftedEpi,
        Provenance { perm: Some(perm.clone()), base_set: perm.order()[..inst.k()].to_vec(), ..Default::default() },
    ))
}

/// Approximately lifted EPI: EPI over the first `k` items; every later item
/// gets its marginal on top of `k - 1` predecessors holding as many
/// higher-weight items as possible.
pub fn ali_cut(inst: &Instance, perm: &Permutation) -> Result<LinearCut> {
    let ctx = LiftingContext::new(inst, perm.clone())?;
    let prof = two_weight_profile(inst)?;
    let order = perm.order();
    let (n, k, f) = (inst.n(), inst.k(), inst.f());
    let mut by_pos = vec![0.0; n];
    let mut acc = 0.0;
    let mut prev = 0.0;
    for p in 0..k {
        acc += inst.a()[order[p]];
        let v = f.eval(acc);
        by_pos[p] = v - prev;
        prev = v;
    }
    let mut highs_before = order[..k].iter().filter(|&&i| prof.is_high[i]).count();
    for p in k..n {
        let h = highs_before.min(k - 1);
        let t = h as f64 * prof.a_h + (k - 1 - h) as f64 * prof.a_l;
        by_pos[p] = f.eval(inst.a()[order[p]] + t) - f.eval(t);
        if prof.is_high[order[p]] {
            highs_before += 1;
        }
    }
    Ok(LinearCut::new(
        0.0,
        ctx.to_items(&by_pos),
        CutFamily::Ali,
        Provenance { perm: Some(perm.clone()), base_set: order[..k].to_vec(), ..Default::default() },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::ConcaveFunction;

    fn example() -> Instance {
        Instance::new(vec![4.0, 100.0, 100.0, 100.0, 4.0, 4.0], 2, ConcaveFunction::sqrt()).unwrap()
    }

    fn close3(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 5e-4)
    }

    #[test]
    fn worked_example_lifted() {
        let perm: Permutation = "5,2,3,1,4,6".parse().unwrap();
        let cut = lifted_epi_cut(&example(), &perm).unwrap();
        assert!(close3(&cut.pi, &[0.828, 8.198, 5.944, 5.944, 2.0, 0.828]), "{cut}");
    }

    #[test]
    fn worked_example_ali() {
        let inst = example();
        let a = ali_cut(&inst, &"2,5,1,6,4,3".parse().unwrap()).unwrap();
        assert!(close3(&a.pi, &[0.198, 10.0, 4.142, 4.142, 0.198, 0.198]), "{a}");
        let b = ali_cut(&inst, &"5,2,3,1,4,6".parse().unwrap()).unwrap();
        assert!(close3(&b.pi, &[0.198, 8.198, 4.142, 4.142, 2.0, 0.198]), "{b}");
    }

    #[test]
    fn oracle_on_example() {
        let inst = example();
        let perm: Permutation = "5,2,3,1,4,6".parse().unwrap();
        let mut ctx = LiftingContext::new(&inst, perm).unwrap();
        ctx.push(2.0).unwrap();
        ctx.push(104f64.sqrt() - 2.0).unwrap();
        assert!((lift_oracle_epi(&ctx, 2).unwrap() - 5.944).abs() < 5e-4);
        assert!((zeta_support_value(&ctx, 2, &[1]).unwrap() - 5.944).abs() < 5e-4);
        assert_eq!(zeta_support_value(&ctx, 2, &[]).unwrap(), 10.0);
        assert!(zeta_support_value(&ctx, 2, &[0, 1]).is_err());
        assert!(zeta_support_value(&ctx, 1, &[1]).is_err());
    }

    #[test]
    fn epi_telescopes() {
        let inst = Instance::new(vec![1.0, 2.0, 3.0, 4.0], 2, ConcaveFunction::sqrt()).unwrap();
        let c = epi_cut(&inst, &Permutation::identity(4)).unwrap();
        let s = |v: f64| v.sqrt();
        let want = [1.0, s(3.0) - 1.0, s(6.0) - s(3.0), s(10.0) - s(6.0)];
        assert!(c.pi.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn lifted_needs_two_weights() {
        let inst = Instance::new(vec![1.0, 2.0, 3.0], 2, ConcaveFunction::sqrt()).unwrap();
        assert!(matches!(lifted_epi_cut(&inst, &Permutation::identity(3)), Err(Error::Structure(_))));
    }

    #[test]
    fn oracle_capacity() {
        let inst = Instance::new(vec![1.0; 40], 20, ConcaveFunction::sqrt()).unwrap();
        let mut ctx = LiftingContext::new(&inst, Permutation::identity(40)).unwrap();
        for _ in 0..39 {
            ctx.push(0.0).unwrap();
        }
        assert!(matches!(lift_oracle_epi(&ctx, 39), Err(Error::Capacity(_))));
    }
}
