#![allow(dead_code)]

use nvk_core::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small random instance: up to `max_vars` variables over `1..=values`, each
/// with one to three non-adjacent intervals of width at most four.
pub fn small_instance(seed: u64, max_vars: usize, values: i64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_vars);
    let mut vars = Vec::new();
    for i in 0..n {
        let want = rng.gen_range(1..=3);
        let mut ivs = Vec::new();
        let mut cur = rng.gen_range(1..=values);
        while ivs.len() < want && cur <= values {
            let hi = (cur + rng.gen_range(0..=3)).min(values);
            ivs.push((cur, hi));
            cur = hi + 2 + rng.gen_range(0..=3);
        }
        vars.push((format!("x{}", i + 1), ivs));
    }
    let budget = rng.gen_range(0..=n as i64);
    Instance::from_labels((1..=values).collect(), vars, budget).unwrap()
}

/// Bitmask of each domain over value indices.
pub fn masks(inst: &Instance) -> Vec<u32> {
    inst.vars().iter().map(|v| v.values().fold(0u32, |m, x| m | 1 << x.0)).collect()
}

/// Minimum hitting set size, by plain enumeration of all subsets.
pub fn brute_min(inst: &Instance) -> usize {
    let ms = masks(inst);
    (0u32..1 << inst.num_values())
        .filter(|s| ms.iter().all(|m| m & s != 0))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}

/// Whether some solution of size at most `N` contains the value at `idx`.
pub fn brute_support(inst: &Instance, idx: usize) -> bool {
    let ms = masks(inst);
    (0u32..1 << inst.num_values())
        .filter(|s| s >> idx & 1 == 1 && s.count_ones() as i64 <= inst.budget())
        .any(|s| ms.iter().all(|m| m & s != 0))
}
