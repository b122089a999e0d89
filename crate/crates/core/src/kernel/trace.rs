use std::fmt;

/// Why a variable left the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RemovalRule {
    /// A required interval sits inside one of the variable's intervals.
    Subset,
    /// The variable contained a value that was just selected.
    UnitCollateral,
    /// The variable's interval was the last follower absorbed by a merge.
    MergeDrop,
}

impl RemovalRule {
    pub fn as_str(self) -> &'static str {
        match self {
            RemovalRule::Subset => "subset",
            RemovalRule::UnitCollateral => "unit-collateral",
            RemovalRule::MergeDrop => "merge-drop",
        }
    }
}

/// Interval geometry captured at the moment an operation happened, in labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntervalSnapshot {
    pub var: String,
    pub lo: i64,
    pub hi: i64,
}

/// One leader's share of a merge: `kept` (second-last follower) grows to
/// `new_hi`, `dropped` (last follower) disappears.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MergePair {
    pub leader: IntervalSnapshot,
    pub kept: IntervalSnapshot,
    pub dropped: IntervalSnapshot,
    pub new_hi: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TraceOp {
    Selected(i64),
    Discarded(i64),
    VarRemoved { var: String, rule: RemovalRule },
    MergeBatch { budget_before: i64, budget_after: i64, pairs: Vec<MergePair> },
}

impl TraceOp {
    /// Operations that change the instance by themselves; collateral and
    /// merge-drop removals are consequences of the preceding operation.
    pub fn is_decision(&self) -> bool {
        !matches!(
            self,
            TraceOp::VarRemoved { rule: RemovalRule::UnitCollateral | RemovalRule::MergeDrop, .. }
        )
    }
}

impl fmt::Display for TraceOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceOp::Selected(v) => write!(f, "select {v}"),
            TraceOp::Discarded(v) => write!(f, "discard {v}"),
            TraceOp::VarRemoved { var, rule } => write!(f, "remove {var} {}", rule.as_str()),
            TraceOp::MergeBatch { budget_before, budget_after, pairs } => {
                write!(f, "merge N{budget_before}->{budget_after}")?;
                for p in pairs {
                    write!(f, " {}:{}+{}->{}", p.leader.var, p.kept.var, p.dropped.var, p.new_hi)?;
                }
                Ok(())
            }
        }
    }
}

/// Renders a trace, one operation per line.
pub fn format_trace(trace: &[TraceOp]) -> String {
    let mut out = String::new();
    for op in trace {
        out.push_str(&op.to_string());
        out.push('\n');
    }
    out
}
