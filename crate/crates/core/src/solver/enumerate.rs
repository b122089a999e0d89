use crate::model::{Instance, ValueId};
use crate::sort::sort_intervals;

use super::{BranchStats, Solution, SolveError, Verdict};

/// Tries every way of restricting each variable to one of its intervals and
/// pierces each hole-free restriction greedily. `O(2^k * |I|)`.
pub fn consistency_by_enumeration(inst: &Instance) -> Result<Verdict, SolveError> {
    let scan = sort_intervals(inst);
    let widths: Vec<usize> = inst.vars().iter().map(|v| v.intervals.len()).collect();
    let mut choice = vec![0usize; widths.len()];
    let mut best: Option<Vec<ValueId>> = None;
    let mut combos = 0u64;
    let mut picks = Vec::new();

    loop {
        combos += 1;
        picks.clear();
        let mut last: Option<ValueId> = None;
        for e in scan.iter().filter(|e| choice[e.var.index()] == e.slot) {
            if last.is_none_or(|p| p < e.interval.lo) {
                picks.push(e.interval.hi);
                last = Some(e.interval.hi);
            }
        }
        if best.as_ref().is_none_or(|b| picks.len() < b.len()) {
            best = Some(picks.clone());
        }

        // Odometer step.
        let mut i = 0;
        while i < choice.len() {
            choice[i] += 1;
            if choice[i] < widths[i] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            break;
        }
    }

    let best = best.unwrap_or_default();
    let consistent = best.len() as i64 <= inst.budget();
    let witness = if consistent {
        Some(Solution::new(inst, best.iter().map(|&v| inst.label(v)).collect())?)
    } else {
        None
    };
    Ok(Verdict {
        consistent,
        witness,
        kernel_witness: None,
        stats: BranchStats { nodes_visited: combos, root_k: inst.holes(), single_branch_prunes: 0 },
        branch_log: Vec::new(),
    })
}
