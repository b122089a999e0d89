//! Turning a kernel solution into a solution of the original instance.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{endpoints_after_merges, KernelError, KernelResult, MergePair, TraceOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("the given values are not a solution of the kernel")]
    NotAKernelSolution,
    #[error("no value of the partial solution ends a merged pair at merge batch {0}")]
    NoMergeAnchor(usize),
    #[error("lifted values do not solve the original instance")]
    NotASolution,
    #[error(transparent)]
    Replay(#[from] KernelError),
}

fn hits(s: &BTreeSet<i64>, lo: i64, hi: i64) -> bool {
    s.range(lo..=hi).next().is_some()
}

fn pairs_hit(s: &BTreeSet<i64>, pairs: &[MergePair]) -> bool {
    pairs.iter().all(|p| hits(s, p.kept.lo, p.kept.hi) && hits(s, p.dropped.lo, p.dropped.hi))
}

/// Walks the trace backwards. Selections add their value; a merge batch
/// adds `t2 = r(I2)` where `I2` is the kept partner of the dropped interval
/// ending at the smallest solution value `t1` that ends one.
pub fn lift_solution(kr: &KernelResult, kernel_solution: &[i64]) -> Result<Vec<i64>, LiftError> {
    if !kr.kernel.is_solution(kernel_solution) {
        return Err(LiftError::NotAKernelSolution);
    }
    let mut s: BTreeSet<i64> = kernel_solution.iter().copied().collect();
    let has_merges = kr.trace.iter().any(|op| matches!(op, TraceOp::MergeBatch { .. }));
    let endpoints = if has_merges { endpoints_after_merges(&kr.input, &kr.trace)? } else { Vec::new() };
    let mut batch = endpoints.len();

    for op in kr.trace.iter().rev() {
        match op {
            TraceOp::Selected(v) => {
                s.insert(*v);
            }
            TraceOp::Discarded(_) | TraceOp::VarRemoved { .. } => {}
            TraceOp::MergeBatch { pairs, .. } => {
                batch -= 1;
                // Shift every value right onto the next right endpoint.
                let ends = &endpoints[batch];
                s = s
                    .iter()
                    .map(|&v| match ends.binary_search(&v) {
                        Ok(_) => v,
                        Err(i) => ends.get(i).copied().unwrap_or(v),
                    })
                    .collect();
                let t1 = s.iter().copied().find(|&v| pairs.iter().any(|p| p.dropped.hi == v));
                let Some(t1) = t1 else {
                    return Err(LiftError::NoMergeAnchor(batch));
                };
                let t2 = pairs
                    .iter()
                    .filter(|p| p.dropped.hi == t1)
                    .map(|p| p.kept.hi)
                    .min()
                    .expect("t1 ends some dropped interval");
                s.insert(t2);
                if !pairs_hit(&s, pairs) {
                    return Err(LiftError::NoMergeAnchor(batch));
                }
            }
        }
    }

    let out: Vec<i64> = s.into_iter().collect();
    if !kr.input.is_solution(&out) {
        return Err(LiftError::NotASolution);
    }
    Ok(out)
}
