//! Branching on the first interval of the kernel.
//!
//! Branch A selects the right endpoint of the first interval, branch B
//! removes that interval; both are followed by Red-Dom and Red-Unit. When
//! both branches lose exactly one hole and resume at the same interval
//! `I_f`, only the branch that selected fewer values below `r(I_f)` is
//! explored, which gives the `T(k) <= T(k-1) + T(k-2)` recurrence.

use crate::kernel::{kernelize, kernelize_workspace, lift_solution, KernelConfig, RuleSet, Workspace};
use crate::model::Instance;

use super::{BranchChoice, BranchEvent, BranchSide, BranchStats, Solution, SolveError, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Explore a single branch when the dominance test allows it.
    pub prune: bool,
    /// Produce a lifted witness. Off skips trace recording and lifting.
    pub witness: bool,
    pub record_branches: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { prune: true, witness: true, record_branches: false }
    }
}

pub fn solve_fpt(inst: &Instance) -> Result<Verdict, SolveError> {
    solve_fpt_with(inst, SolveOptions::default())
}

pub fn solve_fpt_with(inst: &Instance, opts: SolveOptions) -> Result<Verdict, SolveError> {
    if opts.witness {
        let kr = kernelize(inst)?;
        let ws = Workspace::from_instance(&kr.kernel);
        let mut search = Search::new(opts, ws.holes());
        let found = search.node(ws, 0);
        let (witness, kernel_witness) = match found {
            Some(mut kw) => {
                kw.sort_unstable();
                let lifted = lift_solution(&kr, &kw)?;
                (Some(Solution::new(inst, lifted)?), Some(kw))
            }
            None => (None, None),
        };
        Ok(Verdict {
            consistent: witness.is_some(),
            witness,
            kernel_witness,
            stats: search.stats,
            branch_log: search.log,
        })
    } else {
        let mut ws = Workspace::from_instance(inst);
        kernelize_workspace(&mut ws, KernelConfig::default())?;
        let mut search = Search::new(opts, ws.holes());
        let consistent = search.node(ws, 0).is_some();
        Ok(Verdict { consistent, witness: None, kernel_witness: None, stats: search.stats, branch_log: search.log })
    }
}

struct Search {
    opts: SolveOptions,
    stats: BranchStats,
    log: Vec<BranchEvent>,
}

impl Search {
    fn new(opts: SolveOptions, root_k: usize) -> Self {
        Search { opts, stats: BranchStats { root_k, ..BranchStats::default() }, log: Vec::new() }
    }

    /// Returns the labels of a solution of `ws` (values selected so far plus
    /// the rest), or `None` if `ws` is inconsistent.
    fn node(&mut self, ws: Workspace, depth: usize) -> Option<Vec<i64>> {
        self.stats.nodes_visited += 1;
        if ws.budget() < 0 {
            return None;
        }
        if ws.live_vars() == 0 {
            return Some(selected_labels(&ws, 0));
        }
        if ws.budget() == 0 {
            return None;
        }
        if ws.holes() == 0 {
            let picks = ws.greedy_pierce();
            if picks.len() as i64 > ws.budget() {
                return None;
            }
            let mut out = selected_labels(&ws, 0);
            out.extend(picks.into_iter().map(|v| ws.label(v)));
            return Some(out);
        }

        let k = ws.holes();
        let first = ws.first_slot().expect("variables are left");
        let (_, r) = ws.slot_bounds(first);
        let before = ws.selected().len();

        if ws.is_required(first) {
            // Some solution hits the first interval at its right endpoint.
            let mut a = ws;
            a.select(r);
            a.reduce(RuleSet::DOM_UNIT);
            return self.node(a, depth + 1);
        }

        let mut a = ws.clone();
        a.select(r);
        a.reduce(RuleSet::DOM_UNIT);
        let mut b = ws;
        let interval = b.snapshot(first);
        b.remove_slot(first);
        b.reduce(RuleSet::DOM_UNIT);

        let (fa, fb) = (a.first_slot(), b.first_slot());
        let same_resume = match (fa, fb) {
            (Some(x), Some(y)) => x == y && a.slot_bounds(x).1 == b.slot_bounds(y).1,
            (None, None) => true,
            _ => false,
        };
        let choice = if self.opts.prune && a.holes() + 1 == k && b.holes() + 1 == k && same_resume {
            let below = |w: &Workspace| match fa {
                Some(f) => {
                    let rf = w.slot_bounds(f).1;
                    w.selected()[before..].iter().filter(|&&v| v < rf).count()
                }
                None => w.selected().len() - before,
            };
            if below(&a) <= below(&b) {
                BranchChoice::OnlyA
            } else {
                BranchChoice::OnlyB
            }
        } else {
            BranchChoice::Both
        };

        if self.opts.record_branches {
            let side = |w: &Workspace, f: Option<u32>| BranchSide {
                selected: w.selected()[before..].iter().map(|&v| w.label(v)).collect(),
                holes: w.holes(),
                resume: f.map(|s| w.snapshot(s)),
            };
            self.log.push(BranchEvent { depth, interval, a: side(&a, fa), b: side(&b, fb), choice });
        }

        match choice {
            BranchChoice::OnlyA => {
                self.stats.single_branch_prunes += 1;
                self.node(a, depth + 1)
            }
            BranchChoice::OnlyB => {
                self.stats.single_branch_prunes += 1;
                self.node(b, depth + 1)
            }
            BranchChoice::Both => self.node(a, depth + 1).or_else(|| self.node(b, depth + 1)),
        }
    }
}

fn selected_labels(ws: &Workspace, from: usize) -> Vec<i64> {
    ws.selected()[from..].iter().map(|&v| ws.label(v)).collect()
}
