mod common;

use common::{brute_min, small_instance};
use nvk_core::solver::{greedy_pierce, solve_fpt_with, SolveOptions};
use nvk_core::{consistency_by_enumeration, min_hitting_oracle, solve_fpt, Instance};
use proptest::prelude::*;

fn check_witness(inst: &Instance, values: &[i64], assignment: &[(String, i64)]) {
    assert!(values.len() as i64 <= inst.budget());
    assert!(inst.is_solution(values));
    assert_eq!(assignment.len(), inst.num_vars());
    for ((name, v), var) in assignment.iter().zip(inst.vars()) {
        assert_eq!(name, &var.name);
        assert!(values.contains(v));
        let id = inst.value_id(*v).unwrap();
        assert!(var.contains(id));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(800))]

    #[test]
    fn three_way_agreement(seed in any::<u64>()) {
        let inst = small_instance(seed, 10, 12);
        let truth = brute_min(&inst) as i64 <= inst.budget();
        let oracle = min_hitting_oracle(&inst).unwrap();
        prop_assert_eq!(oracle.fits(inst.budget()), truth);
        let en = consistency_by_enumeration(&inst).unwrap();
        prop_assert_eq!(en.consistent, truth);
        let fpt = solve_fpt(&inst).unwrap();
        prop_assert_eq!(fpt.consistent, truth);
        for v in [&en, &fpt] {
            if let Some(w) = &v.witness {
                check_witness(&inst, &w.values, &w.assignment);
            }
        }
    }

    #[test]
    fn pruning_never_changes_the_verdict(seed in any::<u64>()) {
        let inst = small_instance(seed, 10, 12);
        let on = solve_fpt_with(&inst, SolveOptions { witness: false, ..SolveOptions::default() }).unwrap();
        let off = solve_fpt_with(&inst, SolveOptions { prune: false, witness: false, ..SolveOptions::default() }).unwrap();
        prop_assert_eq!(on.consistent, off.consistent);
    }

    #[test]
    fn greedy_is_minimum_on_hole_free(seed in any::<u64>()) {
        let inst = small_instance(seed, 10, 12);
        let flat = Instance::from_labels(
            inst.universe().to_vec(),
            inst.vars().iter().map(|v| {
                let (lo, hi) = inst.interval_labels(&v.intervals[0]);
                (v.name.clone(), vec![(lo, hi)])
            }).collect(),
            inst.budget(),
        ).unwrap();
        let g = greedy_pierce(&flat).unwrap();
        prop_assert_eq!(g.min_values, brute_min(&flat));
        let rights: Vec<i64> = flat.vars().iter().map(|v| flat.interval_labels(&v.intervals[0]).1).collect();
        prop_assert!(g.witness.values.iter().all(|x| rights.contains(x)));
    }

    #[test]
    fn enumeration_counts_combinations(seed in any::<u64>()) {
        let inst = small_instance(seed, 6, 12);
        let combos: u64 = inst.vars().iter().map(|v| v.intervals.len() as u64).product();
        prop_assert_eq!(consistency_by_enumeration(&inst).unwrap().stats.nodes_visited, combos);
    }
}

#[test]
fn verdict_only_mode_matches() {
    for seed in 0..300 {
        let inst = small_instance(seed, 10, 12);
        let full = solve_fpt(&inst).unwrap();
        let lean = solve_fpt_with(&inst, SolveOptions { witness: false, ..SolveOptions::default() }).unwrap();
        assert_eq!(full.consistent, lean.consistent, "seed {seed}");
        assert!(lean.witness.is_none());
    }
}

#[test]
fn empty_and_exhausted_budgets() {
    let none = Instance::from_labels::<String>((1..=3).collect(), vec![], 0).unwrap();
    assert!(solve_fpt(&none).unwrap().consistent);
    let some = Instance::from_labels((1..=3).collect(), vec![("a", vec![(1, 1), (3, 3)])], 0).unwrap();
    assert!(!solve_fpt(&some).unwrap().consistent);
}
