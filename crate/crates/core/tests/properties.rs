//! Property tests: file round-trips, permutation text and cut validity.

mod common;

use common::{feasible_masks, mask_items};
use proptest::prelude::*;
use submod_cuts::format::{parse_instance, to_canonical_json};
use submod_cuts::lift_epi::{ali_cut, epi_cut, lifted_epi_cut};
use submod_cuts::lift_si::{lower_si_cut, SiParams, WeightClass};
use submod_cuts::{two_weight_profile, ConcaveFunction, Instance, LinearCut, Permutation};

fn function_strategy() -> impl Strategy<Value = ConcaveFunction> {
    prop_oneof![
        (0.5f64..3.0).prop_map(|o| ConcaveFunction::sqrt_scaled(o).unwrap()),
        (0.1f64..1.0).prop_map(|p| ConcaveFunction::power(p).unwrap()),
        (10.0f64..200.0).prop_map(|c| ConcaveFunction::capped_quadratic(c).unwrap()),
        (1u32..6, prop::collection::vec(0u32..3, 1..4)).prop_map(|(start, drops)| {
            let bps: Vec<f64> = (1..=drops.len()).map(|i| 5.0 * i as f64).collect();
            let mut slopes = vec![(start + 6) as f64];
            for d in drops {
                let last = *slopes.last().unwrap();
                slopes.push(last - d as f64);
            }
            ConcaveFunction::piecewise_linear(bps, slopes).unwrap()
        }),
    ]
}

/// Two-weight instances with `n <= 8`, both classes present.
fn two_weight_instance() -> impl Strategy<Value = Instance> {
    (2usize..=8, 0u32..10, 1u32..20, function_strategy(), any::<u64>()).prop_flat_map(|(n, al, gap, f, bits)| {
        (1..=n).prop_map(move |k| {
            let mut a: Vec<f64> =
                (0..n).map(|i| if (bits >> i) & 1 == 1 { (al + gap) as f64 } else { al as f64 }).collect();
            a[0] = al as f64;
            a[n - 1] = (al + gap) as f64;
            Instance::new(a, k, f.clone()).unwrap()
        })
    })
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

/// Largest `pi0 + pi(S) - f(a(S))` over supports within the cardinality bound.
fn worst_slack(inst: &Instance, cut: &LinearCut) -> f64 {
    feasible_masks(inst.n(), inst.k())
        .into_iter()
        .map(|m| {
            let s = mask_items(m, inst.n());
            cut.rhs_at_set(&s) - inst.eval_set(&s).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn tol(inst: &Instance) -> f64 {
    let top: f64 = inst.a().iter().sum();
    1e-9 * (1.0 + inst.f().eval(top).abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_json_round_trips(inst in two_weight_instance()) {
        let text = to_canonical_json(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(to_canonical_json(&back), text);
    }

    #[test]
    fn permutation_text_round_trips(order in (1usize..12).prop_flat_map(perm_strategy)) {
        let p = Permutation::new(order.clone()).unwrap();
        let text = p.to_one_based();
        prop_assert_eq!(Permutation::from_one_based(&text).unwrap(), p.clone());
        let pos = p.positions();
        for (k, &i) in order.iter().enumerate() {
            prop_assert_eq!(pos[i], k);
        }
    }

    #[test]
    fn lifted_cuts_are_valid(
        (inst, order) in two_weight_instance().prop_flat_map(|i| { let n = i.n(); (Just(i), perm_strategy(n)) })
    ) {
        let perm = Permutation::new(order).unwrap();
        let t = tol(&inst);
        for cut in [epi_cut(&inst, &perm), lifted_epi_cut(&inst, &perm), ali_cut(&inst, &perm)] {
            let cut = cut.unwrap();
            prop_assert!(worst_slack(&inst, &cut) <= t, "{}", cut);
        }
    }

    #[test]
    fn lifted_epi_is_tight_on_prefixes(
        (inst, order) in two_weight_instance().prop_flat_map(|i| { let n = i.n(); (Just(i), perm_strategy(n)) })
    ) {
        let perm = Permutation::new(order.clone()).unwrap();
        let cut = lifted_epi_cut(&inst, &perm).unwrap();
        let t = tol(&inst);
        for len in 0..=inst.k() {
            let s = &order[..len];
            prop_assert!((cut.rhs_at_set(s) - inst.eval_set(s).unwrap()).abs() <= t);
        }
    }

    #[test]
    fn lower_si_is_valid(inst in two_weight_instance(), i0_seed in 0usize..8) {
        let prof = two_weight_profile(&inst).unwrap();
        prop_assume!(prof.il.len() >= inst.k());
        let i0 = i0_seed % inst.k();
        let cut = lower_si_cut(&inst, &SiParams::natural(&prof, WeightClass::Lower, i0)).unwrap();
        prop_assert!(worst_slack(&inst, &cut) <= tol(&inst), "{}", cut);
    }
}
