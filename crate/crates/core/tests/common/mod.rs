//! Shared corpus generation and brute-force helpers for integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submod_cuts::{ConcaveFunction, Instance, LinearCut};

pub const CORPUS_SEED: u64 = 0x5eed_2024;

/// Function families cycled through by the corpus.
pub fn function_for(idx: usize, rng: &mut ChaCha8Rng, a_max: f64) -> ConcaveFunction {
    match idx % 4 {
        0 => ConcaveFunction::sqrt_scaled(rng.random_range(0.5..3.0)).unwrap(),
        1 => ConcaveFunction::power(0.3).unwrap(),
        2 => ConcaveFunction::capped_quadratic(rng.random_range(0.5..2.0) * a_max).unwrap(),
        _ => {
            let pieces = rng.random_range(1..4usize);
            let mut bps = Vec::new();
            let mut b = 0.0;
            for _ in 0..pieces {
                b += rng.random_range(1..=8) as f64;
                bps.push(b);
            }
            let mut slopes = vec![rng.random_range(2..=6) as f64];
            for _ in 0..pieces {
                let last = *slopes.last().unwrap();
                slopes.push(last - rng.random_range(0..=3) as f64);
            }
            ConcaveFunction::piecewise_linear(bps, slopes).unwrap()
        }
    }
}

/// Seeded two-weight instances with `3 <= n <= max_n`, `k <= max_k`.
/// Every other instance has a_L close to a_H, so the higher-SI weight
/// condition holds often.
pub fn two_weight_corpus(count: usize, max_n: usize, max_k: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|idx| {
            let n = rng.random_range(3..=max_n);
            let k = rng.random_range(1..=max_k.min(n));
            let (a_l, a_h) = if idx % 2 == 0 {
                let a_h = rng.random_range(4..=20) as f64;
                (a_h - rng.random_range(1..=3) as f64, a_h)
            } else {
                let a_l = if idx % 7 == 1 { 0.0 } else { rng.random_range(1..=6) as f64 };
                (a_l, a_l + rng.random_range(1..=30) as f64)
            };
            let mut high: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            high[0] = false;
            high[n - 1] = true;
            // Shuffle so the forced entries move around.
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                high.swap(i, j);
            }
            let a = high.iter().map(|&h| if h { a_h } else { a_l }).collect();
            let f = function_for(idx, &mut rng, a_h * k as f64);
            Instance::new(a, k, f).unwrap()
        })
        .collect()
}

pub fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
    v
}

/// All subsets of `[n]` with at most `k` elements, as bitmasks.
pub fn feasible_masks(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1u32 << n)).filter(|m| (m.count_ones() as usize) <= k).collect()
}

pub fn mask_items(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

/// Largest violation of `cut` over feasible integer points `(f(a x), x)`.
pub fn max_violation(inst: &Instance, cut: &LinearCut) -> f64 {
    feasible_masks(inst.n(), inst.k())
        .into_iter()
        .map(|m| {
            let s = mask_items(m, inst.n());
            cut.rhs_at_set(&s) - inst.eval_set(&s).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Rank of a dense matrix by Gaussian elimination with a relative pivot tolerance.
pub fn rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let m = rows.len();
    if m == 0 {
        return 0;
    }
    let cols = rows[0].len();
    let scale = rows.iter().flatten().fold(1.0f64, |s, v| s.max(v.abs()));
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m).max_by(|&i, &j| rows[i][c].abs().total_cmp(&rows[j][c].abs())) else {
            break;
        };
        if rows[p][c].abs() <= tol * scale {
            continue;
        }
        rows.swap(r, p);
        for i in 0..m {
            if i != r {
                let fac = rows[i][c] / rows[r][c];
                if fac != 0.0 {
                    for j in c..cols {
                        rows[i][j] -= fac * rows[r][j];
                    }
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

/// Affine dimension of the feasible integer points tight at `cut`, measured
/// in (w, x) space.
pub fn tight_affine_dimension(inst: &Instance, cut: &LinearCut, tol: f64) -> usize {
    let n = inst.n();
    let pts: Vec<Vec<f64>> = feasible_masks(n, inst.k())
        .into_iter()
        .filter_map(|m| {
            let s = mask_items(m, n);
            let w = inst.eval_set(&s).unwrap();
            ((cut.rhs_at_set(&s) - w).abs() <= tol).then(|| {
                let mut v = vec![1.0, w];
                v.extend((0..n).map(|i| if m & (1 << i) != 0 { 1.0 } else { 0.0 }));
                v
            })
        })
        .collect();
    rank(pts, 1e-9).saturating_sub(1)
}

/// Seeded k = 2 two-weight instances with n in 5..=8 for which the
/// higher-SI weight condition holds at i0 = 0. Class sizes vary so that the
/// single-item and two-item class cases appear.
pub fn k2_corpus(count: usize, seed: u64) -> Vec<Instance> {
    use submod_cuts::instance::two_weight_profile;
    use submod_cuts::lift_si::check_assumption;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut idx = 0usize;
    while out.len() < count {
        idx += 1;
        let n = 5 + out.len() % 4;
        let nl = match idx % 5 {
            0 => 1,
            1 => n - 1,
            2 => 2,
            _ => rng.random_range(1..n),
        };
        let a_h = rng.random_range(3..=25) as f64;
        let a_l = a_h * rng.random_range(0.3..0.95);
        let a_l = (a_l * 4.0).round() / 4.0;
        let mut a: Vec<f64> = (0..n).map(|i| if i < nl { a_l } else { a_h }).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            a.swap(i, j);
        }
        let f = function_for(idx, &mut rng, 2.0 * a_h);
        let inst = Instance::new(a, 2, f).unwrap();
        let Ok(prof) = two_weight_profile(&inst) else { continue };
        if check_assumption(&prof, inst.f(), 2, 0) {
            out.push(inst);
        }
    }
    out
}

/// Probe points in [0,1]^n with sum at most `k`: uniform, near integer
/// points, and sparse two-coordinate points.
pub fn probe_grid(n: usize, k: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..count)
        .map(|t| {
            let mut x = vec![0.0; n];
            match t % 3 {
                0 => {
                    for v in x.iter_mut() {
                        *v = rng.random::<f64>();
                    }
                }
                1 => {
                    for _ in 0..k {
                        x[rng.random_range(0..n)] = 1.0 - 0.2 * rng.random::<f64>();
                    }
                    for v in x.iter_mut() {
                        *v = (*v + 0.05 * rng.random::<f64>()).min(1.0);
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
