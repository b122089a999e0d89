//! Polynomial kernel for AtMost-NValue parameterized by the number of holes.
//!
//! The pipeline is: reduction rules to a fixpoint, one scan-and-merge pass,
//! reduction rules again. Every change is recorded as a [`TraceOp`] so the
//! kernel can be reproduced from the input and kernel solutions can be
//! lifted back.

mod lift;
mod trace;
mod workspace;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::model::{Instance, ValueId, VarId};

pub use lift::{lift_solution, LiftError};
pub use trace::{format_trace, IntervalSnapshot, MergePair, RemovalRule, TraceOp};
pub use workspace::{LeaderGroup, RuleSet, ScanReport};
pub(crate) use workspace::Workspace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("interval {lo}-{hi} of `{var}` got no leader during the scan")]
    Orphan { var: String, lo: i64, hi: i64 },
    #[error("merge would both keep and drop the interval of `{0}`")]
    MergeConflict(String),
    #[error("discarding {value} would empty the domain of `{var}`")]
    EmptiedDomain { var: String, value: i64 },
    #[error("value {0} is not in the current universe")]
    UnknownValue(i64),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("trace replay diverged: {0}")]
    ReplayMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KernelConfig {
    /// Also discard values dominated at the variable level (quadratic).
    pub generalized_dominance: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelResult {
    pub input: Instance,
    pub kernel: Instance,
    pub trace: Vec<TraceOp>,
    /// Holes of the input.
    pub k_in: usize,
    pub selected_count: usize,
    pub scan: ScanReport,
}

fn recorded<T>(inst: &Instance, trace: &mut Vec<TraceOp>, f: impl FnOnce(&mut Workspace) -> T) -> (Instance, T) {
    let mut ws = Workspace::from_instance(inst);
    ws.set_recording(true);
    let out = f(&mut ws);
    trace.extend(ws.take_trace());
    (ws.to_instance(), out)
}

/// Removes every variable containing `v`, removes `v` from the universe and
/// lowers the budget by one.
pub fn select_value(inst: &Instance, v: ValueId, trace: &mut Vec<TraceOp>) -> Instance {
    recorded(inst, trace, |ws| ws.select(v.0)).0
}

/// Removes `v` from every domain and from the universe.
pub fn discard_value(inst: &Instance, v: ValueId, trace: &mut Vec<TraceOp>) -> Result<Instance, KernelError> {
    let (out, res) = recorded(inst, trace, |ws| ws.discard(v.0));
    res.map(|_| out)
}

pub fn remove_variable(inst: &Instance, x: VarId, rule: RemovalRule, trace: &mut Vec<TraceOp>) -> Instance {
    recorded(inst, trace, |ws| ws.remove_var(x.0, rule)).0
}

/// Red-⊆, Red-Dom and Red-Unit until a full pass fires nothing.
pub fn apply_reduction_rules(inst: &Instance, trace: &mut Vec<TraceOp>) -> Instance {
    recorded(inst, trace, |ws| {
        ws.mark_all_dirty();
        ws.reduce(RuleSet::ALL);
    })
    .0
}

/// Discards every value whose variable set is contained in another value's.
pub fn red_dom_generalized(inst: &Instance, trace: &mut Vec<TraceOp>) -> Instance {
    let only = RuleSet { subset: false, dominance: false, generalized_dominance: true, unit: false };
    recorded(inst, trace, |ws| {
        ws.reduce(only);
    })
    .0
}

/// One scan-and-merge pass. The input should be at a rule fixpoint.
pub fn scan_and_merge(inst: &Instance, trace: &mut Vec<TraceOp>) -> Result<(Instance, ScanReport), KernelError> {
    let (out, report) = recorded(inst, trace, |ws| ws.scan_and_merge());
    report.map(|r| (out, r))
}

pub(crate) fn kernelize_workspace(ws: &mut Workspace, cfg: KernelConfig) -> Result<ScanReport, KernelError> {
    let rules = RuleSet { generalized_dominance: cfg.generalized_dominance, ..RuleSet::ALL };
    ws.mark_all_dirty();
    ws.reduce(rules);
    let report = ws.scan_and_merge()?;
    ws.mark_all_dirty();
    ws.reduce(rules);
    Ok(report)
}

pub fn kernelize(inst: &Instance) -> Result<KernelResult, KernelError> {
    kernelize_with(inst, KernelConfig::default())
}

pub fn kernelize_with(inst: &Instance, cfg: KernelConfig) -> Result<KernelResult, KernelError> {
    let mut ws = Workspace::from_instance(inst);
    ws.set_recording(true);
    let scan = kernelize_workspace(&mut ws, cfg)?;
    let trace = ws.take_trace();
    Ok(KernelResult {
        input: inst.clone(),
        kernel: ws.to_instance(),
        selected_count: trace.iter().filter(|op| matches!(op, TraceOp::Selected(_))).count(),
        trace,
        k_in: inst.holes(),
        scan,
    })
}

/// Applies `trace` to `original` operation by operation.
pub fn replay(original: &Instance, trace: &[TraceOp]) -> Result<Instance, KernelError> {
    let mut ws = Workspace::from_instance(original);
    let names = ws.var_ids_by_name();
    for op in trace {
        ws.apply_op(op, &names)?;
    }
    Ok(ws.to_instance())
}

/// Replays `trace` and returns the right endpoints present right after each
/// merge batch, in trace order.
pub(crate) fn endpoints_after_merges(original: &Instance, trace: &[TraceOp]) -> Result<Vec<Vec<i64>>, KernelError> {
    let mut ws = Workspace::from_instance(original);
    let names: HashMap<Arc<str>, u32> = ws.var_ids_by_name();
    let mut out = Vec::new();
    for op in trace {
        ws.apply_op(op, &names)?;
        if matches!(op, TraceOp::MergeBatch { .. }) {
            out.push(ws.right_endpoint_labels());
        }
    }
    Ok(out)
}
