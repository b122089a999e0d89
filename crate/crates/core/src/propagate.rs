//! Hyper-arc consistency for AtMost-NValue.
//!
//! A value `v` has a support exactly when selecting it leaves a consistent
//! instance, and then it is supported in every domain containing it. So
//! filtering is one consistency check per value, skipped entirely when the
//! instance is still consistent with budget `N - 1`.

use crate::kernel::select_value;
use crate::model::{Instance, ValueId};
use crate::solver::{solve_fpt_with, SolveError, SolveOptions};

const DECIDE: SolveOptions = SolveOptions { prune: true, witness: false, record_branches: false };

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Filtered(Instance),
    /// The constraint cannot be satisfied; every domain is wiped.
    Wipeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationResult {
    pub outcome: Outcome,
    /// Labels of the removed values, ascending.
    pub removed_values: Vec<i64>,
    pub checks_performed: usize,
}

impl PropagationResult {
    pub fn filtered(&self) -> Option<&Instance> {
        match &self.outcome {
            Outcome::Filtered(inst) => Some(inst),
            Outcome::Wipeout => None,
        }
    }
}

fn consistent(inst: &Instance) -> Result<bool, SolveError> {
    Ok(solve_fpt_with(inst, DECIDE)?.consistent)
}

/// True when some solution uses `v`.
pub fn has_support(inst: &Instance, v: ValueId) -> Result<bool, SolveError> {
    consistent(&select_value(inst, v, &mut Vec::new()))
}

pub fn enforce_hac(inst: &Instance) -> Result<PropagationResult, SolveError> {
    let mut checks = 1;
    if !consistent(inst)? {
        return Ok(PropagationResult {
            outcome: Outcome::Wipeout,
            removed_values: inst.universe().to_vec(),
            checks_performed: checks,
        });
    }
    let unchanged = |checks| PropagationResult { outcome: Outcome::Filtered(inst.clone()), removed_values: Vec::new(), checks_performed: checks };
    if inst.num_vars() == 0 {
        return Ok(unchanged(checks));
    }
    checks += 1;
    if consistent(&inst.with_budget(inst.budget() - 1))? {
        return Ok(unchanged(checks));
    }
    let mut keep = Vec::with_capacity(inst.num_values());
    for i in 0..inst.num_values() {
        checks += 1;
        keep.push(has_support(inst, ValueId(i as u32))?);
    }
    let removed_values = inst.universe().iter().zip(&keep).filter(|(_, &k)| !k).map(|(&l, _)| l).collect();
    let filtered = inst.restrict_universe(&keep).expect("a consistent instance has a supported value in every domain");
    Ok(PropagationResult { outcome: Outcome::Filtered(filtered), removed_values, checks_performed: checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_budget_filters_nothing() {
        let inst = Instance::from_labels((1..=4).collect(), vec![("a", vec![(1, 2)]), ("b", vec![(3, 4)])], 3).unwrap();
        let r = enforce_hac(&inst).unwrap();
        assert_eq!(r.filtered(), Some(&inst));
        assert_eq!(r.checks_performed, 2);
    }

    #[test]
    fn inconsistent_wipes_everything() {
        let inst = Instance::from_labels((1..=4).collect(), vec![("a", vec![(1, 1)]), ("b", vec![(4, 4)])], 1).unwrap();
        let r = enforce_hac(&inst).unwrap();
        assert_eq!(r.outcome, Outcome::Wipeout);
        assert_eq!(r.removed_values, vec![1, 2, 3, 4]);
    }

    #[test]
    fn tight_budget_keeps_only_the_meeting_point() {
        let inst = Instance::from_labels((1..=5).collect(), vec![("a", vec![(1, 3)]), ("b", vec![(3, 5)])], 1).unwrap();
        let r = enforce_hac(&inst).unwrap();
        assert_eq!(r.removed_values, vec![1, 2, 4, 5]);
        assert_eq!(r.filtered().unwrap().universe(), &[3]);
        assert_eq!(r.checks_performed, 2 + 5);
    }
}
