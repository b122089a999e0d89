mod common;

use common::{brute_min, small_instance};
use nvk_core::kernel::{
    apply_reduction_rules, kernelize, kernelize_with, lift_solution, red_dom_generalized, replay, KernelConfig, TraceOp,
};
use nvk_core::{min_hitting_oracle, Instance};
use proptest::prelude::*;

fn consistent(inst: &Instance) -> bool {
    brute_min(inst) as i64 <= inst.budget()
}

/// Every value of `inst` is the left endpoint of some interval and the
/// right endpoint of some interval.
fn endpoints_everywhere(inst: &Instance) -> bool {
    let mut left = vec![false; inst.num_values()];
    let mut right = vec![false; inst.num_values()];
    for var in inst.vars() {
        for iv in &var.intervals {
            left[iv.lo.index()] = true;
            right[iv.hi.index()] = true;
        }
    }
    left.iter().zip(&right).all(|(l, r)| *l && *r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn kernel_preserves_verdict(seed in any::<u64>()) {
        let inst = small_instance(seed, 10, 12);
        let kr = kernelize(&inst).unwrap();
        prop_assert_eq!(consistent(&kr.kernel), consistent(&inst));
    }

    #[test]
    fn kernel_bounds(seed in any::<u64>()) {
        let inst = small_instance(seed, 10, 12);
        let kr = kernelize(&inst).unwrap();
        let k = kr.k_in;
        prop_assert!(kr.kernel.num_optional() <= 2 * k);
        prop_assert!(kr.scan.leaders <= 4 * k);
        prop_assert!(kr.scan.max_followers <= 4 * k);
        prop_assert!(kr.kernel.holes() <= k);
        prop_assert!(endpoints_everywhere(&kr.kernel));
    }

    #[test]
    fn scan_roles_are_disjoint(seed in any::<u64>()) {
        let inst = small_instance(seed, 10, 12);
        let kr = kernelize(&inst).unwrap();
        for g in &kr.scan.groups {
            for (i, f) in g.followers.iter().enumerate() {
                prop_assert!(f.hi < g.leader.lo || g.leader.hi < f.lo, "follower meets its leader");
                for h in &g.followers[i + 1..] {
                    prop_assert!(f.hi < h.lo || h.hi < f.lo, "followers overlap");
                }
            }
        }
    }

    #[test]
    fn replay_reproduces_kernel(seed in any::<u64>()) {
        let inst = small_instance(seed, 10, 12);
        let kr = kernelize(&inst).unwrap();
        prop_assert_eq!(replay(&inst, &kr.trace).unwrap(), kr.kernel);
    }

    #[test]
    fn lifted_solutions_are_valid(seed in any::<u64>()) {
        let inst = small_instance(seed, 10, 12);
        let kr = kernelize(&inst).unwrap();
        let best = min_hitting_oracle(&kr.kernel).unwrap();
        if best.fits(kr.kernel.budget()) {
            let lifted = lift_solution(&kr, &best.witness.values).unwrap();
            prop_assert!(inst.is_solution(&lifted));
        }
    }

    #[test]
    fn rules_are_idempotent_and_sound(seed in any::<u64>()) {
        let inst = small_instance(seed, 10, 12);
        let once = apply_reduction_rules(&inst, &mut Vec::new());
        let mut again = Vec::new();
        prop_assert_eq!(apply_reduction_rules(&once, &mut again), once.clone());
        prop_assert!(again.is_empty());
        prop_assert_eq!(consistent(&once), consistent(&inst));
        prop_assert!(once.holes() <= inst.holes());
    }

    #[test]
    fn generalized_dominance_is_sound(seed in any::<u64>()) {
        let inst = small_instance(seed, 10, 12);
        prop_assert_eq!(consistent(&red_dom_generalized(&inst, &mut Vec::new())), consistent(&inst));
        let kr = kernelize_with(&inst, KernelConfig { generalized_dominance: true }).unwrap();
        prop_assert_eq!(consistent(&kr.kernel), consistent(&inst));
        prop_assert_eq!(replay(&inst, &kr.trace).unwrap(), kr.kernel);
    }
}

#[test]
fn generalized_covers_plain_discards_on_fig1() {
    let text = std::fs::read_to_string(format!("{}/tests/data/fig1.nvk", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let inst = nvk_core::parse_instance(&text).unwrap();
    let mut t = Vec::new();
    red_dom_generalized(&inst, &mut t);
    assert!(t.contains(&TraceOp::Discarded(1)));
    assert!(t.contains(&TraceOp::Discarded(5)));
}

#[test]
fn hole_free_kernel_is_empty() {
    for seed in 0..200 {
        let inst = small_instance(seed, 10, 12);
        let flat = Instance::from_labels(
            inst.universe().to_vec(),
            inst.vars().iter().map(|v| {
                let (lo, hi) = inst.interval_labels(&v.intervals[0]);
                (v.name.clone(), vec![(lo, hi)])
            }).collect(),
            inst.budget(),
        )
        .unwrap();
        let kr = kernelize(&flat).unwrap();
        assert_eq!(kr.kernel.num_intervals(), 0, "seed {seed}");
        assert_eq!(kr.kernel.budget() >= 0, consistent(&flat), "seed {seed}");
    }
}

#[test]
fn no_op_trace_lifts_identically() {
    let inst = Instance::from_labels((1..=3).collect(), vec![("a", vec![(1, 1), (3, 3)]), ("b", vec![(1, 2)]), ("c", vec![(2, 3)])], 2).unwrap();
    let kr = kernelize(&inst).unwrap();
    assert!(kr.trace.is_empty());
    assert_eq!(lift_solution(&kr, &[1, 3]).unwrap(), vec![1, 3]);
}
