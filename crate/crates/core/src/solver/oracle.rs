use crate::model::Instance;

use super::{Piercing, Solution, SolveError};

pub const DEFAULT_ORACLE_CAP: usize = 20;

pub fn min_hitting_oracle(inst: &Instance) -> Result<Piercing, SolveError> {
    min_hitting_oracle_with_cap(inst, DEFAULT_ORACLE_CAP)
}

/// Smallest hitting set by brute force over subsets of `D` in order of
/// increasing size. Knows nothing about intervals beyond their value sets.
pub fn min_hitting_oracle_with_cap(inst: &Instance, cap: usize) -> Result<Piercing, SolveError> {
    let size = inst.num_values();
    if size > cap.min(63) {
        return Err(SolveError::UniverseTooLarge { size, cap });
    }
    let masks: Vec<u64> = inst
        .vars()
        .iter()
        .map(|var| var.values().fold(0u64, |m, v| m | 1 << v.0))
        .collect();
    let full = (1u64 << size) - 1;
    for card in 0..=size {
        // Gosper's hack walks all `card`-bit masks below 2^size.
        let mut s: u64 = (1u64 << card) - 1;
        loop {
            if masks.iter().all(|&m| m & s != 0) {
                let values = (0..size).filter(|&i| s >> i & 1 == 1).map(|i| inst.universe()[i]).collect();
                return Ok(Piercing { min_values: card, witness: Solution::new(inst, values)? });
            }
            if s == 0 {
                break;
            }
            let c = s & s.wrapping_neg();
            let r = s + c;
            s = (((r ^ s) >> 2) / c) | r;
            if s > full {
                break;
            }
        }
    }
    unreachable!("the whole universe hits every nonempty domain")
}
