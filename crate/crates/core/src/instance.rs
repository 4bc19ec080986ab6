//! Problem instances, set-function evaluation and the two-weight view.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::ConcaveFunction;
use crate::TOL;

/// Default ground-set cap for [`Instance::check_submodular`].
pub const SUBMODULAR_CHECK_CAP: usize = 10;
/// Grid size for the monotonicity check in [`reduce_to_two_weights`].
pub const MONOTONE_GRID: usize = 1001;

/// Ground set `[n]`, nonnegative weights `a`, cardinality bound `k` and a
/// concave `f`; the set function is `F(S) = f(a(S))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::format::InstanceFile", into = "crate::format::InstanceFile")]
pub struct Instance {
    n: usize,
    a: Vec<f64>,
    k: usize,
    f: ConcaveFunction,
}

impl Instance {
    pub fn new(a: Vec<f64>, k: usize, f: ConcaveFunction) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::Input("ground set must be nonempty".into()));
        }
        if let Some((i, v)) = a.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Input(format!("weight a_{} = {v} must be finite and >= 0", i + 1)));
        }
        if k == 0 || k > n {
            return Err(Error::Input(format!("k = {k} must lie in [1, {n}]")));
        }
        f.validate()?;
        Ok(Self { n, a, k, f })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn f(&self) -> &ConcaveFunction {
        &self.f
    }

    /// Same weights and function with a different cardinality bound.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(self.a.clone(), k, self.f.clone())
    }

    pub fn weight_of(&self, s: &[usize]) -> f64 {
        s.iter().map(|&i| self.a[i]).sum()
    }

    fn check_indices(&self, s: &[usize]) -> Result<()> {
        match s.iter().find(|&&i| i >= self.n) {
            Some(i) => Err(Error::Input(format!("index {} outside [1, {}]", i + 1, self.n))),
            None => Ok(()),
        }
    }

    /// `F(S) = f(sum of a_i over S)`; `s` holds 0-based indices.
    #[doc(alias = "eval_F")]
    pub fn eval_set(&self, s: &[usize]) -> Result<f64> {
        self.check_indices(s)?;
        Ok(self.f.eval(self.weight_of(s)))
    }

    /// `F(X + i) - F(X)`.
    pub fn marginal(&self, i: usize, x: &[usize]) -> Result<f64> {
        self.check_indices(x)?;
        self.check_indices(&[i])?;
        if x.contains(&i) {
            return Err(Error::Input(format!("item {} already in the set", i + 1)));
        }
        let base = self.weight_of(x);
        Ok(self.f.eval(base + self.a[i]) - self.f.eval(base))
    }

    /// Value of `f` at the weight of the support of a 0/1 vector.
    pub fn eval_point(&self, x: &[f64]) -> f64 {
        self.f.eval(self.a.iter().zip(x).map(|(a, v)| a * v).sum())
    }

    pub fn check_submodular(&self) -> Result<bool> {
        self.check_submodular_with_cap(SUBMODULAR_CHECK_CAP)
    }

    /// Exhaustive diminishing-returns check over all `X ⊆ Y ⊆ [n] - i`.
    pub fn check_submodular_with_cap(&self, cap: usize) -> Result<bool> {
        if self.n > cap {
            return Err(Error::Capacity(format!("n = {} exceeds the brute-force cap {cap}", self.n)));
        }
        let n = self.n;
        let full = 1usize << n;
        let mut weight = vec![0.0; full];
        for mask in 1..full {
            let low = mask.trailing_zeros() as usize;
            weight[mask] = weight[mask & (mask - 1)] + self.a[low];
        }
        let value: Vec<f64> = weight.iter().map(|&w| self.f.eval(w)).collect();
        for i in 0..n {
            let bit = 1usize << i;
            let marg = |m: usize| value[m | bit] - value[m];
            for y in (0..full).filter(|y| y & bit == 0) {
                let my = marg(y);
                // Enumerate subsets x of y.
                let mut x = y;
                loop {
                    if marg(x) < my - TOL {
                        return Ok(false);
                    }
                    if x == 0 {
                        break;
                    }
                    x = (x - 1) & y;
                }
            }
        }
        Ok(true)
    }
}

/// Two-weight view: `a_L < a_H` with the induced partition of `[n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoWeightProfile {
    pub a_l: f64,
    pub a_h: f64,
    /// Lower-weight items, ascending.
    pub il: Vec<usize>,
    /// Higher-weight items, ascending.
    pub ih: Vec<usize>,
    pub is_high: Vec<bool>,
}

impl TwoWeightProfile {
    pub fn weight(&self, high: bool) -> f64 {
        if high {
            self.a_h
        } else {
            self.a_l
        }
    }

    /// Lower items among the first `k - 1` entries of `order`.
    pub fn d_l(&self, order: &[usize], k: usize) -> usize {
        order.iter().take(k.saturating_sub(1)).filter(|&&i| !self.is_high[i]).count()
    }

    /// Higher items strictly after the first `k - 1` entries of `order`.
    pub fn d_h(&self, order: &[usize], k: usize) -> usize {
        order.iter().skip(k.saturating_sub(1)).filter(|&&i| self.is_high[i]).count()
    }
}

/// Sorted distinct values of `a`.
pub fn distinct_weights(a: &[f64]) -> Vec<f64> {
    let mut v = a.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn two_weight_profile(inst: &Instance) -> Result<TwoWeightProfile> {
    let distinct = distinct_weights(inst.a());
    if distinct.len() != 2 {
        return Err(Error::Structure(format!("expected exactly 2 distinct weights, found {}", distinct.len())));
    }
    let (a_l, a_h) = (distinct[0], distinct[1]);
    let is_high: Vec<bool> = inst.a().iter().map(|&v| v == a_h).collect();
    let il = (0..inst.n()).filter(|&i| !is_high[i]).collect();
    let ih = (0..inst.n()).filter(|&i| is_high[i]).collect();
    Ok(TwoWeightProfile { a_l, a_h, il, ih, is_high })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Collapses a multi-weight instance onto two weights so that cuts for the
/// reduced instance stay valid for the original one.
///
/// `Increasing` maps weights below `pivot` to the minimum and the rest to
/// `pivot`; `Decreasing` maps weights above `pivot` to the maximum and the
/// rest to `pivot`. `f` must be monotone in the given direction on `[0, a([n])]`.
pub fn reduce_to_two_weights(inst: &Instance, pivot: f64, direction: Direction) -> Result<Instance> {
    let distinct = distinct_weights(inst.a());
    if distinct.len() < 3 {
        return Err(Error::Input(format!("reduction needs at least 3 distinct weights, found {}", distinct.len())));
    }
    let (lo, hi) = (distinct[0], distinct[distinct.len() - 1]);
    if !(pivot > lo && pivot < hi) {
        return Err(Error::Input(format!("pivot {pivot} must lie strictly between {lo} and {hi}")));
    }
    let total: f64 = inst.a().iter().sum();
    let step = total / (MONOTONE_GRID - 1) as f64;
    let mut prev = inst.f().eval(0.0);
    for t in 1..MONOTONE_GRID {
        let cur = inst.f().eval(step * t as f64);
        let bad = match direction {
            Direction::Increasing => cur < prev - TOL,
            Direction::Decreasing => cur > prev + TOL,
        };
        if bad {
            return Err(Error::Monotonicity(format!("f is not {direction:?} near y = {}", step * t as f64)));
        }
        prev = cur;
    }
    let a_hat = inst
        .a()
        .iter()
        .map(|&v| match direction {
            Direction::Increasing if v < pivot => lo,
            Direction::Increasing => pivot,
            Direction::Decreasing if v > pivot => hi,
            Direction::Decreasing => pivot,
        })
        .collect();
    Instance::new(a_hat, inst.k(), inst.f().clone())
}
