//! One PASS/FAIL line per acceptance criterion. Each criterion also returns
//! a numeric fingerprint; the last criterion re-runs the others and compares.

mod common;

use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submod_cuts::bench::{gen_instance, run_benchmark, BenchOptions, GenConfig};
use submod_cuts::bnc::{self, Limits, MeanRiskObjective, Strategy};
use submod_cuts::hull22::*;
use submod_cuts::instance::two_weight_profile;
use submod_cuts::lift_epi::{ali_cut, epi_cut, lift_oracle_epi, lifted_epi_cut, LiftingContext};
use submod_cuts::lift_si::{
    check_assumption, higher_si_cut, lift_oracle_si, lower_si_cut, si_context, SiParams, WeightClass,
};
use submod_cuts::{ConcaveFunction, Instance, LinearCut, Permutation};

struct Outcome {
    pass: bool,
    detail: String,
    fingerprint: Vec<f64>,
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn worked_example() -> Instance {
    Instance::new(vec![4.0, 100.0, 100.0, 100.0, 4.0, 4.0], 2, ConcaveFunction::sqrt()).unwrap()
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let inst = worked_example();
    let cases: [(&str, &str, [f64; 6]); 3] = [
        ("lifted-epi", "5,2,3,1,4,6", [0.828, 8.198, 5.944, 5.944, 2.0, 0.828]),
        ("ali", "2,5,1,6,4,3", [0.198, 10.0, 4.142, 4.142, 0.198, 0.198]),
        ("ali", "5,2,3,1,4,6", [0.198, 8.198, 4.142, 4.142, 2.0, 0.198]),
    ];
    let mut ok = true;
    let mut fp = Vec::new();
    let mut bad = Vec::new();
    for (family, perm, expected) in cases {
        let perm: Permutation = perm.parse().unwrap();
        let cut = if family == "ali" { ali_cut(&inst, &perm) } else { lifted_epi_cut(&inst, &perm) }.unwrap();
        let got: Vec<f64> = cut.pi.iter().map(|v| round3(*v)).collect();
        if got != expected {
            ok = false;
            bad.push(format!("{family} {}: {got:?}", perm.to_one_based()));
        }
        fp.extend(&cut.pi);
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: ok && secs < 1.0,
        detail: if bad.is_empty() { format!("3 coefficient vectors match, {secs:.3}s") } else { bad.join("; ") },
        fingerprint: fp,
    }
}

fn criterion2() -> Outcome {
    let start = Instant::now();
    let corpus = two_weight_corpus(240, 10, 4, CORPUS_SEED);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst, mut compared) = (0f64, 0usize);
    let mut fp = Vec::new();
    for inst in &corpus {
        for _ in 0..3 {
            let perm = Permutation::new(random_perm(inst.n(), &mut rng)).unwrap();
            let cut = lifted_epi_cut(inst, &perm).unwrap();
            let mut ctx = LiftingContext::new(inst, perm.clone()).unwrap();
            for p in 0..inst.n() {
                let item = perm.order()[p];
                if p + 1 >= inst.k() {
                    let v = lift_oracle_epi(&ctx, p).unwrap();
                    worst = worst.max((v - cut.pi[item]).abs());
                    compared += 1;
                    fp.push(v);
                }
                ctx.push(cut.pi[item]).unwrap();
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: corpus.len() >= 200 && worst <= 1e-9 && secs < 60.0,
        detail: format!("{} instances, {compared} coefficients, max gap {worst:.1e}, {secs:.1}s", corpus.len()),
        fingerprint: fp,
    }
}

fn criterion3() -> Outcome {
    let start = Instant::now();
    let corpus = two_weight_corpus(240, 10, 4, CORPUS_SEED);
    let (mut worst_l, mut worst_h) = (0f64, 0f64);
    let mut higher_instances = 0;
    let mut lower_instances = 0;
    let mut fp = Vec::new();
    for inst in &corpus {
        let prof = two_weight_profile(inst).unwrap();
        let k = inst.k();
        let mut counted_h = false;
        let mut counted_l = false;
        for i0 in 0..k {
            if prof.il.len() >= k {
                let params = SiParams::natural(&prof, WeightClass::Lower, i0);
                let cut = lower_si_cut(inst, &params).unwrap();
                let mut ctx = si_context(inst, &params).unwrap();
                let base = prof.il.len();
                for (s, &item) in params.perm_other_class.iter().enumerate() {
                    let v = lift_oracle_si(&ctx, base, base + s).unwrap();
                    worst_l = worst_l.max((v - cut.pi[item]).abs());
                    fp.push(v);
                    ctx.push(cut.pi[item]).unwrap();
                }
                counted_l = true;
            }
            if prof.ih.len() > k && check_assumption(&prof, inst.f(), k, i0) {
                let params = SiParams::natural(&prof, WeightClass::Higher, i0);
                let cut = higher_si_cut(inst, &params).unwrap();
                let mut ctx = si_context(inst, &params).unwrap();
                let base = prof.ih.len();
                for (t, &item) in params.perm_other_class.iter().enumerate() {
                    let v = lift_oracle_si(&ctx, base, base + t).unwrap();
                    worst_h = worst_h.max((v - cut.pi[item]).abs());
                    fp.push(v);
                    ctx.push(cut.pi[item]).unwrap();
                }
                counted_h = true;
            }
        }
        lower_instances += counted_l as usize;
        higher_instances += counted_h as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: worst_l <= 1e-9 && worst_h <= 1e-9 && higher_instances >= 50 && secs < 60.0,
        detail: format!(
            "lower-SI on {lower_instances} instances (max gap {worst_l:.1e}), higher-SI on {higher_instances} instances (max gap {worst_h:.1e}), {secs:.1}s"
        ),
        fingerprint: fp,
    }
}

/// Every cut family the crate generates for `inst` under `perm`.
fn cuts_for(inst: &Instance, perm: &Permutation) -> Vec<LinearCut> {
    let prof = two_weight_profile(inst).unwrap();
    let k = inst.k();
    let mut out = vec![epi_cut(inst, perm).unwrap(), lifted_epi_cut(inst, perm).unwrap(), ali_cut(inst, perm).unwrap()];
    let split =
        |high: bool| -> Vec<usize> { perm.order().iter().copied().filter(|&i| prof.is_high[i] == high).collect() };
    for i0 in 0..k {
        if prof.il.len() >= k {
            let p = SiParams {
                i0,
                weight_class: WeightClass::Lower,
                perm_within_class: split(false),
                perm_other_class: split(true),
            };
            out.push(lower_si_cut(inst, &p).unwrap());
        }
        if prof.ih.len() > k && check_assumption(&prof, inst.f(), k, i0) {
            let p = SiParams {
                i0,
                weight_class: WeightClass::Higher,
                perm_within_class: split(true),
                perm_other_class: split(false),
            };
            out.push(higher_si_cut(inst, &p).unwrap());
        }
    }
    if k == 2 {
        out.push(super_average_cut(inst).unwrap());
        if check_assumption(&prof, inst.f(), 2, 0) {
            out.extend(p22_system_cuts(inst, P22System::default()).unwrap());
        }
    }
    out
}

fn criterion4() -> Outcome {
    let corpus = two_weight_corpus(80, 12, 4, CORPUS_SEED + 4);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst, mut checked) = (f64::NEG_INFINITY, 0usize);
    let mut fp = Vec::new();
    for inst in &corpus {
        for _ in 0..20 {
            let perm = Permutation::new(random_perm(inst.n(), &mut rng)).unwrap();
            for cut in cuts_for(inst, &perm) {
                let v = max_violation(inst, &cut);
                worst = worst.max(v);
                checked += 1;
                fp.push(v);
            }
        }
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("{checked} cuts on {} instances, max violation {worst:.1e}", corpus.len()),
        fingerprint: fp,
    }
}

/// Affine dimension of the tight points of the single-class SI over the
/// class alone (cardinality `k`), computed by enumeration.
fn base_si_dimension(inst: &Instance, class: &[usize], cut: &LinearCut) -> usize {
    let sub_a: Vec<f64> = class.iter().map(|&i| inst.a()[i]).collect();
    let sub = Instance::new(sub_a, inst.k(), inst.f().clone()).unwrap();
    let sub_cut = LinearCut::new(cut.pi0, class.iter().map(|&i| cut.pi[i]).collect(), cut.family, Default::default());
    tight_affine_dimension(&sub, &sub_cut, 1e-9)
}

fn criterion5() -> Outcome {
    let corpus = two_weight_corpus(120, 8, 4, CORPUS_SEED + 5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut lepi, mut lsi, mut hsi) = (0, 0, 0);
    let mut failures = Vec::new();
    let mut fp = Vec::new();
    for inst in &corpus {
        let n = inst.n();
        let prof = two_weight_profile(inst).unwrap();
        let k = inst.k();
        for _ in 0..3 {
            let perm = Permutation::new(random_perm(n, &mut rng)).unwrap();
            let cut = lifted_epi_cut(inst, &perm).unwrap();
            let d = tight_affine_dimension(inst, &cut, 1e-9);
            fp.push(d as f64);
            lepi += 1;
            if d != n {
                failures.push(format!("lifted-epi {:?} perm {} dim {d}", inst.a(), perm.to_one_based()));
            }
        }
        for i0 in 0..k {
            if prof.il.len() >= k {
                let cut = lower_si_cut(inst, &SiParams::natural(&prof, WeightClass::Lower, i0)).unwrap();
                if base_si_dimension(inst, &prof.il, &cut) == prof.il.len() {
                    let d = tight_affine_dimension(inst, &cut, 1e-9);
                    fp.push(d as f64);
                    lsi += 1;
                    if d != n {
                        failures.push(format!("lower-si {:?} i0 {i0} dim {d}", inst.a()));
                    }
                }
            }
            if prof.ih.len() > k && check_assumption(&prof, inst.f(), k, i0) {
                let cut = higher_si_cut(inst, &SiParams::natural(&prof, WeightClass::Higher, i0)).unwrap();
                if base_si_dimension(inst, &prof.ih, &cut) == prof.ih.len() {
                    let d = tight_affine_dimension(inst, &cut, 1e-9);
                    fp.push(d as f64);
                    hsi += 1;
                    if d != n {
                        failures.push(format!("higher-si {:?} i0 {i0} dim {d}", inst.a()));
                    }
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty() && lsi > 0 && hsi > 0,
        detail: if failures.is_empty() {
            format!("{lepi} lifted-EPIs, {lsi} lower-SIs, {hsi} higher-SIs all span dimension n")
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
        fingerprint: fp,
    }
}

fn criterion6() -> Outcome {
    let start = Instant::now();
    let corpus = k2_corpus(20, 77);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut mismatches, mut points, mut variant_checks) = (0usize, 0usize, 0usize);
    let mut fp = Vec::new();
    for inst in &corpus {
        let prof = two_weight_profile(inst).unwrap();
        let mut lp = SeparationLp::new(inst, 2).unwrap();
        let full = p22_system_cuts(inst, P22System::default()).unwrap();
        let mut variants = vec![full.clone()];
        if prof.il.len() <= 2 || prof.ih.len() <= 2 {
            variants.push(p22_system_cuts(inst, P22System { super_average: false, ..Default::default() }).unwrap());
        }
        if prof.il.len() == 1 {
            variants.push(p22_system_cuts(inst, P22System { lower_avg: false, ..Default::default() }).unwrap());
        }
        if prof.ih.len() == 1 {
            variants.push(p22_system_cuts(inst, P22System { higher_avg: false, ..Default::default() }).unwrap());
        }
        for x in probe_grid(inst.n(), 2, 1000, &mut rng) {
            let bound = full.iter().map(|c| c.rhs(&x)).fold(f64::NEG_INFINITY, f64::max);
            let delta = [-0.3, -1e-3, -1e-5, 1e-5, 1e-3, 0.3][rng.random_range(0..6)] * (1.0 + bound.abs());
            let w = bound + delta;
            let member = membership_with(&mut lp, w, &x).unwrap();
            fp.push(member as u8 as f64);
            for cuts in &variants {
                variant_checks += 1;
                if member != satisfies_system(cuts, 2, w, &x, 1e-7) {
                    mismatches += 1;
                }
            }
            points += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: mismatches == 0 && corpus.len() >= 20 && secs < 600.0,
        detail: format!(
            "{} instances, {points} probes, {variant_checks} system checks, {mismatches} mismatches, {secs:.1}s",
            corpus.len()
        ),
        fingerprint: fp,
    }
}

fn normalized(pi0: f64, pi: &[f64]) -> Vec<f64> {
    LinearCut::new(pi0, pi.to_vec(), submod_cuts::CutFamily::PolarRay, Default::default()).normalized()
}

/// Finds `target` among the enumerated facets and reports whether it is
/// classified outside the proposed families.
fn find_ray(inst: &Instance, k: usize, pi0: f64, pi: &[f64]) -> (bool, bool, usize) {
    let facets = enumerate_polar_facets(inst, k, 2000).unwrap();
    let target = normalized(pi0, pi);
    for f in &facets {
        let v = normalized(f.ray.pi0, &f.ray.pi);
        if v.iter().zip(&target).all(|(a, b)| (a - b).abs() <= 1e-6) {
            let unknown = classify_facet(inst, k, &f.ray).unwrap() == FacetClass::Unknown;
            return (true, unknown, facets.len());
        }
    }
    (false, false, facets.len())
}

fn criterion7() -> Outcome {
    let f = ConcaveFunction::capped_quadratic(8.0).unwrap();
    let ex1 = Instance::new(vec![2.0, 2.0, 5.0, 5.0, 5.0, 5.0, 5.0], 2, f.clone()).unwrap();
    let (found1, unknown1, count1) = find_ray(&ex1, 2, -11.0, &[20.0, 39.0, 35.0, 35.0, 35.0, 35.0, 35.0]);
    let ex2 = Instance::new(vec![6.0, 6.0, 6.0, 6.0, 8.0, 8.0, 8.0], 3, f).unwrap();
    let t = -1.0 / 3.0;
    let (found2, unknown2, count2) =
        find_ray(&ex2, 3, 0.0, &[20.0 * t, 44.0 * t, 44.0 * t, 44.0 * t, 176.0 * t, 200.0 * t, 200.0 * t]);
    Outcome {
        pass: found1 && unknown1 && found2 && unknown2,
        detail: format!(
            "first example: {} among {count1} facets{}; second example: {} among {count2} facets{}",
            if found1 { "found" } else { "not found" },
            if found1 {
                if unknown1 {
                    ", unclassified"
                } else {
                    ", classified"
                }
            } else {
                ""
            },
            if found2 { "found" } else { "not found" },
            if found2 {
                if unknown2 {
                    ", unclassified"
                } else {
                    ", classified"
                }
            } else {
                ""
            },
        ),
        fingerprint: vec![
            found1 as u8 as f64,
            unknown1 as u8 as f64,
            count1 as f64,
            found2 as u8 as f64,
            count2 as f64,
        ],
    }
}

/// Exhaustive optimum over supports of size at most `k`.
fn enumerate_optimum(inst: &Instance, obj: &MeanRiskObjective) -> f64 {
    feasible_masks(inst.n(), inst.k())
        .into_iter()
        .map(|m| {
            let s = mask_items(m, inst.n());
            let y: f64 = s.iter().map(|&i| inst.a()[i]).sum();
            -s.iter().map(|&i| obj.lambda[i]).sum::<f64>() + obj.omega * inst.f().eval(y)
        })
        .fold(f64::INFINITY, f64::min)
}

/// 35 generated mean-risk instances plus 15 with other concave functions.
fn exactness_corpus() -> Vec<(Instance, MeanRiskObjective)> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..35u64 {
        let n = rng.random_range(6..=15);
        let k = rng.random_range(1..=5.min(n));
        let q = if i % 2 == 0 { 4.0 } else { 8.0 };
        out.push(gen_instance(&GenConfig::new(n, q, k, 800 + i)).unwrap());
    }
    for inst in two_weight_corpus(15, 12, 4, CORPUS_SEED + 8) {
        let lambda: Vec<f64> =
            inst.a().iter().map(|&a| rng.random_range(0.0..2.0) * inst.f().eval(a).max(1.0)).collect();
        out.push((inst, MeanRiskObjective::with_omega(lambda, 1.0).unwrap()));
    }
    out
}

fn criterion8() -> Outcome {
    let corpus = exactness_corpus();
    let mut worst = 0f64;
    let mut fp = Vec::new();
    let mut errors = Vec::new();
    for (inst, obj) in &corpus {
        let best = enumerate_optimum(inst, obj);
        for st in Strategy::ALL {
            match bnc::solve(inst, obj, st, &Limits::exact()) {
                Ok(r) => {
                    worst = worst.max((r.objective - best).abs());
                    fp.push(r.objective);
                    fp.push(r.nodes as f64);
                }
                Err(e) => errors.push(format!("{st}: {e}")),
            }
        }
    }
    Outcome {
        pass: errors.is_empty() && worst <= 1e-6 && corpus.len() == 50,
        detail: format!(
            "{} instances x 3 strategies, max deviation {worst:.1e}, {} errors",
            corpus.len(),
            errors.len()
        ),
        fingerprint: fp,
    }
}

fn criterion9() -> Outcome {
    let start = Instant::now();
    let configs: Vec<GenConfig> =
        [(3, 4.0), (3, 8.0), (5, 4.0), (5, 8.0)].iter().map(|&(k, q)| GenConfig::new(40, q, k, 2024)).collect();
    let opts = BenchOptions {
        trials: 5,
        limits: Limits { time_limit: Some(Duration::from_secs(60)), ..Limits::default() },
        threads: 1,
    };
    let out = run_benchmark(&configs, &[Strategy::LepiLsi, Strategy::Ali], &opts).unwrap();
    let mut wins = 0;
    let mut parts = Vec::new();
    let mut fp = Vec::new();
    for pair in out.rows.chunks(2) {
        let (l, a) = (&pair[0], &pair[1]);
        if l.median_nodes <= a.median_nodes {
            wins += 1;
        }
        parts.push(format!("k={} q={}: {} vs {}", l.k, l.q, l.median_nodes, a.median_nodes));
    }
    for r in &out.records {
        fp.push(r.nodes as f64);
        fp.push(r.objective);
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: wins >= 3 && secs < 1800.0,
        detail: format!("median nodes lepi-lsi vs ali, {wins}/4 ordered ({}), {secs:.1}s", parts.join("; ")),
        fingerprint: fp,
    }
}

type Criterion = fn() -> Outcome;

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] =
        [criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7, criterion8, criterion9];
    let mut failed = Vec::new();
    let mut prints = Vec::new();
    for (i, c) in criteria.iter().enumerate() {
        let o = c();
        println!("criterion {}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
        prints.push(o.fingerprint);
    }
    let rerun: Vec<Vec<f64>> = criteria.iter().map(|c| c().fingerprint).collect();
    let same = prints
        .iter()
        .zip(&rerun)
        .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
    let sizes: usize = prints.iter().map(Vec::len).sum();
    println!(
        "criterion 10: {} (re-run of criteria 1-9 reproduced {sizes} numeric outputs {})",
        if same { "PASS" } else { "FAIL" },
        if same { "bit for bit" } else { "with differences" }
    );
    if !same {
        failed.push(10);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
