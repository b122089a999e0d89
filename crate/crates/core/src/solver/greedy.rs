use crate::model::Instance;
use crate::sort::sort_intervals;

use super::{Piercing, Solution, SolveError};

/// Minimum piercing of a hole-free instance: sweep intervals by right
/// endpoint and pick the right endpoint of every interval not yet hit.
pub fn greedy_pierce(inst: &Instance) -> Result<Piercing, SolveError> {
    let k = inst.holes();
    if k > 0 {
        return Err(SolveError::HasHoles(k));
    }
    let mut picks = Vec::new();
    let mut last = None;
    for e in sort_intervals(inst).iter() {
        if last.is_none_or(|p| p < e.interval.lo) {
            picks.push(e.interval.hi);
            last = Some(e.interval.hi);
        }
    }
    let values = picks.into_iter().map(|v| inst.label(v)).collect::<Vec<_>>();
    Ok(Piercing { min_values: values.len(), witness: Solution::new(inst, values)? })
}
