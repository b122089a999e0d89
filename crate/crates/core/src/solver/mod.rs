//! Consistency checks: greedy piercing for hole-free instances, two
//! independent exact procedures, and the branching search on the kernel.

mod enumerate;
mod fpt;
mod greedy;
mod oracle;

use thiserror::Error;

use crate::kernel::{IntervalSnapshot, KernelError, LiftError};
use crate::model::Instance;

pub use enumerate::consistency_by_enumeration;
pub use fpt::{solve_fpt, solve_fpt_with, SolveOptions};
pub use greedy::greedy_pierce;
pub use oracle::{min_hitting_oracle, min_hitting_oracle_with_cap, DEFAULT_ORACLE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("greedy piercing needs a hole-free instance, found {0} holes")]
    HasHoles(usize),
    #[error("universe has {size} values, oracle cap is {cap}")]
    UniverseTooLarge { size: usize, cap: usize },
    #[error("variable `{0}` has no value in the solution")]
    Uncovered(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

/// A set of values (labels) together with one value per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub values: Vec<i64>,
    pub assignment: Vec<(String, i64)>,
}

impl Solution {
    pub fn new(inst: &Instance, mut values: Vec<i64>) -> Result<Self, SolveError> {
        values.sort_unstable();
        values.dedup();
        let assignment = build_assignment(inst, &values)?;
        Ok(Solution { values, assignment })
    }
}

/// Minimum number of values hitting every domain, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piercing {
    pub min_values: usize,
    pub witness: Solution,
}

impl Piercing {
    pub fn fits(&self, budget: i64) -> bool {
        self.min_values as i64 <= budget
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BranchStats {
    pub nodes_visited: u64,
    pub root_k: usize,
    pub single_branch_prunes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchSide {
    /// Values selected by this branch, in selection order.
    pub selected: Vec<i64>,
    pub holes: usize,
    /// First interval of the branch, if any variable is left.
    pub resume: Option<IntervalSnapshot>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchChoice {
    Both,
    OnlyA,
    OnlyB,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchEvent {
    pub depth: usize,
    pub interval: IntervalSnapshot,
    pub a: BranchSide,
    pub b: BranchSide,
    pub choice: BranchChoice,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub consistent: bool,
    pub witness: Option<Solution>,
    /// Witness of the kernel before lifting.
    pub kernel_witness: Option<Vec<i64>>,
    pub stats: BranchStats,
    pub branch_log: Vec<BranchEvent>,
}

/// Maps each variable to the smallest value of its domain in `values`.
pub fn build_assignment(inst: &Instance, values: &[i64]) -> Result<Vec<(String, i64)>, SolveError> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    inst.vars()
        .iter()
        .map(|var| {
            var.intervals
                .iter()
                .find_map(|iv| {
                    let (lo, hi) = inst.interval_labels(iv);
                    let at = sorted.partition_point(|&v| v < lo);
                    sorted.get(at).copied().filter(|&v| v <= hi)
                })
                .map(|v| (var.name.clone(), v))
                .ok_or_else(|| SolveError::Uncovered(var.name.clone()))
        })
        .collect()
}
