//! Mutable working copy of an instance used by the reduction rules, the
//! scan-and-merge phase and the branching search.
//!
//! Values keep their index in the universe the workspace was built from;
//! discarded values are unlinked from a doubly linked list, so "the next
//! value of D" is always `next[v]`. Intervals live in an arena of slots and
//! are indexed by right endpoint in a min-segment tree over left endpoints,
//! which answers "every interval with `hi >= a` and `lo <= b`" in time
//! proportional to the answer. That single query drives containment checks
//! for Red-⊆ and the "every variable containing v" step of a selection.
//!
//! Rule application keeps dirty sets instead of rescanning the whole
//! instance, but the firing order is that of repeated full passes
//! (Red-⊆ in scan order, Red-Dom by ascending value, Red-Unit by variable),
//! so traces are deterministic.

use std::collections::HashMap;
use std::sync::Arc;

use crate::model::{Instance, Interval, ValueId, VarDomain};
use crate::sort::sort_by_hi_then_lo;

use super::trace::{IntervalSnapshot, MergePair, RemovalRule, TraceOp};
use super::KernelError;

pub(crate) const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct HiIndex {
    leaves: usize,
    tree: Vec<u32>,
    /// Per right endpoint, `(lo, slot)` sorted.
    buckets: Vec<Vec<(u32, u32)>>,
}

impl HiIndex {
    fn new(values: usize) -> Self {
        let leaves = values.next_power_of_two().max(1);
        HiIndex { leaves, tree: vec![NIL; 2 * leaves], buckets: vec![Vec::new(); values] }
    }

    fn refresh(&mut self, hi: u32) {
        let mut node = self.leaves + hi as usize;
        self.tree[node] = self.buckets[hi as usize].first().map_or(NIL, |&(lo, _)| lo);
        while node > 1 {
            node /= 2;
            self.tree[node] = self.tree[2 * node].min(self.tree[2 * node + 1]);
        }
    }

    fn insert(&mut self, lo: u32, hi: u32, id: u32) {
        let b = &mut self.buckets[hi as usize];
        let at = b.binary_search(&(lo, id)).unwrap_or_else(|e| e);
        b.insert(at, (lo, id));
        self.refresh(hi);
    }

    fn remove(&mut self, lo: u32, hi: u32, id: u32) {
        let b = &mut self.buckets[hi as usize];
        let at = b.binary_search(&(lo, id)).expect("slot is indexed");
        b.remove(at);
        self.refresh(hi);
    }

    /// Every interval with `hi >= min_hi` and `lo <= max_lo`.
    fn collect(&self, min_hi: u32, max_lo: u32, out: &mut Vec<u32>) {
        self.collect_rec(1, 0, self.leaves, min_hi as usize, max_lo, out);
    }

    fn collect_rec(&self, node: usize, start: usize, end: usize, min_hi: usize, max_lo: u32, out: &mut Vec<u32>) {
        if end <= min_hi || self.tree[node] > max_lo {
            return;
        }
        if end - start == 1 {
            for &(lo, id) in &self.buckets[start] {
                if lo > max_lo {
                    break;
                }
                out.push(id);
            }
            return;
        }
        let mid = (start + end) / 2;
        self.collect_rec(2 * node, start, mid, min_hi, max_lo, out);
        self.collect_rec(2 * node + 1, mid, end, min_hi, max_lo, out);
    }

    /// Smallest `(hi, lo, id)`.
    fn first(&self) -> Option<u32> {
        if self.tree[1] == NIL {
            return None;
        }
        let mut node = 1;
        while node < self.leaves {
            node = if self.tree[2 * node] != NIL { 2 * node } else { 2 * node + 1 };
        }
        self.buckets[node - self.leaves].first().map(|&(_, id)| id)
    }
}

/// Set of small integers with "next member at or after i" in a few word
/// operations: one bit per value plus summary levels of non-empty words.
#[derive(Debug, Clone, Default)]
struct BitQueue {
    levels: Vec<Vec<u64>>,
}

impl BitQueue {
    fn new(size: usize) -> Self {
        let mut levels = Vec::new();
        let mut words = size.div_ceil(64).max(1);
        loop {
            levels.push(vec![0u64; words]);
            if words == 1 {
                break;
            }
            words = words.div_ceil(64);
        }
        BitQueue { levels }
    }

    fn insert(&mut self, i: u32) {
        let mut i = i as usize;
        for level in &mut self.levels {
            level[i / 64] |= 1 << (i % 64);
            i /= 64;
        }
    }

    fn remove(&mut self, i: u32) {
        let mut i = i as usize;
        for level in &mut self.levels {
            level[i / 64] &= !(1 << (i % 64));
            if level[i / 64] != 0 {
                break;
            }
            i /= 64;
        }
    }

    fn next_from(&self, i: usize) -> Option<u32> {
        self.next_at(0, i).map(|x| x as u32)
    }

    fn next_at(&self, lvl: usize, i: usize) -> Option<usize> {
        let words = &self.levels[lvl];
        let w = i / 64;
        if w >= words.len() {
            return None;
        }
        let bits = words[w] & (!0u64 << (i % 64));
        if bits != 0 {
            return Some(w * 64 + bits.trailing_zeros() as usize);
        }
        if lvl + 1 == self.levels.len() {
            return None;
        }
        let w2 = self.next_at(lvl + 1, w + 1)?;
        Some(w2 * 64 + words[w2].trailing_zeros() as usize)
    }
}

/// Per-value lists of slots that once had an endpoint there, stored as
/// linked lists in one pool. Entries go stale when the slot moves or dies
/// and are filtered on read.
#[derive(Debug, Clone)]
struct EndpointLists {
    head: Vec<u32>,
    pool: Vec<(u32, u32)>,
}

impl EndpointLists {
    fn new(values: usize) -> Self {
        EndpointLists { head: vec![NIL; values], pool: Vec::new() }
    }

    fn push(&mut self, v: u32, s: u32) {
        let at = self.pool.len() as u32;
        self.pool.push((s, self.head[v as usize]));
        self.head[v as usize] = at;
    }

    /// Detaches the list of `v`; walk it with [`EndpointLists::next`].
    fn take(&mut self, v: u32) -> u32 {
        std::mem::replace(&mut self.head[v as usize], NIL)
    }

    fn next(&self, cur: &mut u32) -> Option<u32> {
        if *cur == NIL {
            return None;
        }
        let (s, nxt) = self.pool[*cur as usize];
        *cur = nxt;
        Some(s)
    }

    /// Drops entries failing `keep` from the list of `v`.
    fn retain(&mut self, v: u32, keep: impl Fn(u32) -> bool) {
        let mut cur = self.head[v as usize];
        let (mut first, mut tail) = (NIL, NIL);
        while cur != NIL {
            let (s, nxt) = self.pool[cur as usize];
            if keep(s) {
                if tail == NIL {
                    first = cur;
                } else {
                    self.pool[tail as usize].1 = cur;
                }
                tail = cur;
            }
            cur = nxt;
        }
        if tail != NIL {
            self.pool[tail as usize].1 = NIL;
        }
        self.head[v as usize] = first;
    }

    fn iter(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        let mut cur = self.head[v as usize];
        std::iter::from_fn(move || self.next(&mut cur))
    }
}

#[derive(Debug, Clone)]
struct Slot {
    var: u32,
    lo: u32,
    hi: u32,
    alive: bool,
}

/// A variable owns the slot ids `first..end`; dead ones are skipped.
#[derive(Debug, Clone)]
struct VarSlot {
    first: u32,
    end: u32,
    live: u32,
    alive: bool,
}

#[derive(Debug, Clone, Default)]
struct Dirty {
    subset: Vec<u32>,
    dom: Vec<u32>,
    dom_active: BitQueue,
    cursor: Option<u32>,
    unit: Vec<u32>,
}

/// Which reduction rules a call to [`Workspace::reduce`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet {
    pub subset: bool,
    pub dominance: bool,
    pub generalized_dominance: bool,
    pub unit: bool,
}

impl RuleSet {
    pub const ALL: RuleSet = RuleSet { subset: true, dominance: true, generalized_dominance: false, unit: true };
    pub const DOM_UNIT: RuleSet = RuleSet { subset: false, dominance: true, generalized_dominance: false, unit: true };
}

/// Roles and follower lists at the end of a scan, in label geometry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanReport {
    pub leaders: usize,
    pub merges: usize,
    pub max_followers: usize,
    pub groups: Vec<LeaderGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeaderGroup {
    pub leader: IntervalSnapshot,
    pub followers: Vec<IntervalSnapshot>,
}

#[derive(Debug, Clone)]
pub(crate) struct Workspace {
    labels: Vec<i64>,
    alive_value: Vec<bool>,
    prev: Vec<u32>,
    next: Vec<u32>,
    live_values: usize,
    slots: Vec<Slot>,
    vars: Vec<VarSlot>,
    names: Arc<Vec<Arc<str>>>,
    live_vars: usize,
    holes: usize,
    starts: EndpointLists,
    ends: EndpointLists,
    start_count: Vec<u32>,
    end_count: Vec<u32>,
    index: HiIndex,
    budget: i64,
    recording: bool,
    trace: Vec<TraceOp>,
    selected: Vec<u32>,
    dirty: Dirty,
}

impl Workspace {
    pub fn from_instance(inst: &Instance) -> Self {
        let n = inst.num_values();
        let mut ws = Workspace {
            labels: inst.universe().to_vec(),
            alive_value: vec![true; n],
            prev: (0..n as u32).map(|i| if i == 0 { NIL } else { i - 1 }).collect(),
            next: (0..n as u32).map(|i| if i as usize + 1 == n { NIL } else { i + 1 }).collect(),
            live_values: n,
            slots: Vec::with_capacity(inst.num_intervals()),
            vars: Vec::with_capacity(inst.num_vars()),
            names: Arc::new(inst.vars().iter().map(|v| Arc::from(v.name.as_str())).collect()),
            live_vars: inst.num_vars(),
            holes: inst.holes(),
            starts: EndpointLists::new(n),
            ends: EndpointLists::new(n),
            start_count: vec![0; n],
            end_count: vec![0; n],
            index: HiIndex::new(n),
            budget: inst.budget(),
            recording: false,
            trace: Vec::new(),
            selected: Vec::new(),
            dirty: Dirty { dom_active: BitQueue::new(n), ..Dirty::default() },
        };
        for (x, var) in inst.vars().iter().enumerate() {
            let first = ws.slots.len() as u32;
            for iv in &var.intervals {
                let id = ws.slots.len() as u32;
                let (lo, hi) = (iv.lo.0, iv.hi.0);
                ws.slots.push(Slot { var: x as u32, lo, hi, alive: true });
                ws.starts.push(lo, id);
                ws.ends.push(hi, id);
                ws.start_count[lo as usize] += 1;
                ws.end_count[hi as usize] += 1;
                ws.index.insert(lo, hi, id);
            }
            let end = ws.slots.len() as u32;
            ws.vars.push(VarSlot { first, end, live: end - first, alive: true });
        }
        ws
    }

    /// Exports the current state with the universe densely re-indexed.
    pub fn to_instance(&self) -> Instance {
        let mut remap = vec![NIL; self.labels.len()];
        let mut universe = Vec::with_capacity(self.live_values);
        for v in self.values() {
            remap[v as usize] = universe.len() as u32;
            universe.push(self.labels[v as usize]);
        }
        let vars = self
            .vars
            .iter()
            .enumerate()
            .filter(|(_, x)| x.alive)
            .map(|(i, _)| VarDomain {
                name: self.names[i].to_string(),
                intervals: self
                    .own(i as u32)
                    .map(|s| {
                        let sl = &self.slots[s as usize];
                        Interval::new(ValueId(remap[sl.lo as usize]), ValueId(remap[sl.hi as usize]))
                    })
                    .collect(),
            })
            .collect();
        Instance::new(universe, vars, self.budget).expect("workspace keeps the model invariants")
    }

    // ----- queries -------------------------------------------------------

    pub fn budget(&self) -> i64 {
        self.budget
    }

    pub fn holes(&self) -> usize {
        self.holes
    }

    pub fn live_vars(&self) -> usize {
        self.live_vars
    }

    pub fn label(&self, v: u32) -> i64 {
        self.labels[v as usize]
    }

    pub fn value_of_label(&self, label: i64) -> Option<u32> {
        let i = self.labels.binary_search(&label).ok()?;
        self.alive_value[i].then_some(i as u32)
    }

    /// Live values in ascending order.
    pub fn values(&self) -> impl Iterator<Item = u32> + '_ {
        let head = self.alive_value.iter().position(|&a| a).map_or(NIL, |i| i as u32);
        std::iter::successors((head != NIL).then_some(head), move |&v| {
            let n = self.next[v as usize];
            (n != NIL).then_some(n)
        })
    }

    pub fn selected(&self) -> &[u32] {
        &self.selected
    }

    pub fn set_recording(&mut self, on: bool) {
        self.recording = on;
    }

    pub fn take_trace(&mut self) -> Vec<TraceOp> {
        std::mem::take(&mut self.trace)
    }

    /// First interval of the scan order.
    pub fn first_slot(&self) -> Option<u32> {
        self.index.first()
    }

    pub fn slot_bounds(&self, s: u32) -> (u32, u32) {
        let sl = &self.slots[s as usize];
        (sl.lo, sl.hi)
    }

    pub fn slot_var_name(&self, s: u32) -> &str {
        &self.names[self.slots[s as usize].var as usize]
    }

    pub fn is_required(&self, s: u32) -> bool {
        self.vars[self.slots[s as usize].var as usize].live == 1
    }

    /// Live slots of variable `x`, by increasing `lo`.
    fn own(&self, x: u32) -> impl Iterator<Item = u32> + '_ {
        let v = &self.vars[x as usize];
        (v.first..v.end).filter(|&s| self.slots[s as usize].alive)
    }

    fn only_slot(&self, x: u32) -> Option<u32> {
        if self.vars[x as usize].live == 1 {
            self.own(x).next()
        } else {
            None
        }
    }

    /// The live slot after `s` within its variable.
    fn next_own(&self, s: u32) -> Option<u32> {
        let end = self.vars[self.slots[s as usize].var as usize].end;
        (s + 1..end).find(|&t| self.slots[t as usize].alive)
    }

    fn prev_own(&self, s: u32) -> Option<u32> {
        let first = self.vars[self.slots[s as usize].var as usize].first;
        (first..s).rev().find(|&t| self.slots[t as usize].alive)
    }

    pub fn snapshot(&self, s: u32) -> IntervalSnapshot {
        let sl = &self.slots[s as usize];
        IntervalSnapshot {
            var: self.names[sl.var as usize].to_string(),
            lo: self.label(sl.lo),
            hi: self.label(sl.hi),
        }
    }

    /// Live intervals in scan order: `hi`, then `lo`, then variable order.
    pub fn sorted_slots(&self) -> Vec<u32> {
        let live: Vec<u32> = (0..self.slots.len() as u32).filter(|&s| self.slots[s as usize].alive).collect();
        sort_by_hi_then_lo(
            &live,
            self.labels.len(),
            |&s| self.slots[s as usize].lo as usize,
            |&s| self.slots[s as usize].hi as usize,
        )
    }

    /// Minimum piercing of a hole-free state by the right-endpoint sweep.
    pub fn greedy_pierce(&self) -> Vec<u32> {
        debug_assert_eq!(self.holes, 0);
        let mut picks = Vec::new();
        let mut last: Option<u32> = None;
        for s in self.sorted_slots() {
            let (lo, hi) = self.slot_bounds(s);
            if last.is_none_or(|p| p < lo) {
                picks.push(hi);
                last = Some(hi);
            }
        }
        picks
    }

    // ----- dirty bookkeeping -------------------------------------------

    fn mark_dom(&mut self, w: u32) {
        if w == NIL {
            return;
        }
        match self.dirty.cursor {
            Some(c) if w > c => {
                self.dirty.dom_active.insert(w);
            }
            _ => {
                self.dirty.dom.push(w);
            }
        }
    }

    /// An endpoint count changed at `w`: `w` and its successor may change
    /// dominance status.
    fn mark_endpoint(&mut self, w: u32) {
        self.mark_dom(w);
        let n = self.next[w as usize];
        self.mark_dom(n);
    }

    fn mark_slot(&mut self, s: u32) {
        self.dirty.subset.push(s);
        self.dirty.unit.push(self.slots[s as usize].var);
    }

    pub fn mark_all_dirty(&mut self) {
        let slots: Vec<u32> = (0..self.slots.len() as u32).filter(|&s| self.slots[s as usize].alive).collect();
        self.dirty.subset.extend(slots);
        let vals: Vec<u32> = self.values().collect();
        self.dirty.dom.extend(vals);
        let vars: Vec<u32> = (0..self.vars.len() as u32).filter(|&x| self.vars[x as usize].alive).collect();
        self.dirty.unit.extend(vars);
    }

    fn record(&mut self, op: impl FnOnce(&Self) -> TraceOp) {
        if self.recording {
            let op = op(self);
            self.trace.push(op);
        }
    }

    // ----- slot mutations ------------------------------------------------

    fn set_lo(&mut self, s: u32, lo: u32) {
        let (old, hi) = self.slot_bounds(s);
        self.index.remove(old, hi, s);
        self.index.insert(lo, hi, s);
        self.start_count[old as usize] -= 1;
        self.start_count[lo as usize] += 1;
        self.starts.push(lo, s);
        self.slots[s as usize].lo = lo;
        self.mark_endpoint(old);
        self.mark_endpoint(lo);
        self.mark_slot(s);
    }

    fn set_hi(&mut self, s: u32, hi: u32) {
        let (lo, old) = self.slot_bounds(s);
        self.index.remove(lo, old, s);
        self.index.insert(lo, hi, s);
        self.end_count[old as usize] -= 1;
        self.end_count[hi as usize] += 1;
        self.ends.push(hi, s);
        self.slots[s as usize].hi = hi;
        self.mark_endpoint(old);
        self.mark_endpoint(hi);
        self.mark_slot(s);
    }

    fn kill_slot(&mut self, s: u32) {
        let (lo, hi) = self.slot_bounds(s);
        self.index.remove(lo, hi, s);
        self.start_count[lo as usize] -= 1;
        self.end_count[hi as usize] -= 1;
        self.slots[s as usize].alive = false;
        self.mark_endpoint(lo);
        self.mark_endpoint(hi);
    }

    fn remove_var_raw(&mut self, x: u32) {
        let v = &self.vars[x as usize];
        self.holes -= v.live as usize - 1;
        for s in v.first..v.end {
            if self.slots[s as usize].alive {
                self.kill_slot(s);
            }
        }
        self.vars[x as usize].live = 0;
        self.vars[x as usize].alive = false;
        self.live_vars -= 1;
    }

    pub fn var_alive(&self, x: u32) -> bool {
        self.vars[x as usize].alive
    }

    pub fn remove_var(&mut self, x: u32, rule: RemovalRule) {
        self.remove_var_raw(x);
        self.record(|ws| TraceOp::VarRemoved { var: ws.names[x as usize].to_string(), rule });
    }

    /// Removes one interval of a variable that has at least one friend.
    pub fn remove_slot(&mut self, s: u32) {
        let x = self.slots[s as usize].var;
        assert!(self.vars[x as usize].live >= 2, "cannot remove the only interval of a variable");
        self.vars[x as usize].live -= 1;
        self.kill_slot(s);
        self.holes -= 1;
        if let Some(only) = self.only_slot(x) {
            self.mark_slot(only);
        }
    }

    /// Selects `v`: every variable containing it leaves, `v` leaves `D`,
    /// and the budget drops by one.
    pub fn select(&mut self, v: u32) {
        let mut hits = Vec::new();
        self.index.collect(v, v, &mut hits);
        let mut vars: Vec<u32> = hits.iter().map(|&s| self.slots[s as usize].var).collect();
        vars.sort_unstable();
        vars.dedup();
        self.record(|ws| TraceOp::Selected(ws.label(v)));
        for x in vars {
            self.remove_var(x, RemovalRule::UnitCollateral);
        }
        self.delete_value(v);
        self.budget -= 1;
        self.selected.push(v);
    }

    /// Removes `v` from every domain and from `D`.
    pub fn discard(&mut self, v: u32) -> Result<(), KernelError> {
        for s in self.starts.iter(v) {
            let sl = &self.slots[s as usize];
            if sl.alive && sl.lo == v && sl.hi == v && self.vars[sl.var as usize].live == 1 {
                return Err(KernelError::EmptiedDomain {
                    var: self.names[sl.var as usize].to_string(),
                    value: self.label(v),
                });
            }
        }
        self.record(|ws| TraceOp::Discarded(ws.label(v)));
        self.delete_value(v);
        Ok(())
    }

    fn delete_value(&mut self, v: u32) {
        let (p, n) = (self.prev[v as usize], self.next[v as usize]);
        let mut cur = self.starts.take(v);
        while let Some(s) = self.starts.next(&mut cur) {
            let sl = &self.slots[s as usize];
            if !sl.alive || sl.lo != v {
                continue;
            }
            if sl.hi == v {
                self.remove_slot(s);
            } else {
                self.set_lo(s, n);
            }
        }
        let mut cur = self.ends.take(v);
        while let Some(s) = self.ends.next(&mut cur) {
            let sl = &self.slots[s as usize];
            if sl.alive && sl.hi == v {
                self.set_hi(s, p);
            }
        }
        if p != NIL {
            self.next[p as usize] = n;
        }
        if n != NIL {
            self.prev[n as usize] = p;
        }
        self.alive_value[v as usize] = false;
        self.live_values -= 1;
        self.mark_dom(p);
        self.mark_dom(n);
        if p != NIL && n != NIL {
            self.coalesce_across(p, n);
        }
    }

    /// `p` and `n` just became neighbours: a variable with one interval
    /// ending at `p` and the next starting at `n` lost its hole.
    fn coalesce_across(&mut self, p: u32, n: u32) {
        let mut pairs = Vec::new();
        if self.end_count[p as usize] <= self.start_count[n as usize] {
            let slots = &self.slots;
            self.ends.retain(p, |s| slots[s as usize].alive && slots[s as usize].hi == p);
            for j in self.ends.iter(p) {
                if let Some(k) = self.next_own(j) {
                    if self.slots[k as usize].lo == n {
                        pairs.push((j, k));
                    }
                }
            }
        } else {
            let slots = &self.slots;
            self.starts.retain(n, |s| slots[s as usize].alive && slots[s as usize].lo == n);
            for k in self.starts.iter(n) {
                if let Some(j) = self.prev_own(k) {
                    if self.slots[j as usize].hi == p {
                        pairs.push((j, k));
                    }
                }
            }
        }
        for (j, k) in pairs {
            // Lists may hold a slot twice.
            if self.slots[k as usize].alive {
                self.coalesce(j, k);
            }
        }
    }

    fn coalesce(&mut self, j: u32, k: u32) {
        let x = self.slots[j as usize].var;
        let khi = self.slots[k as usize].hi;
        self.vars[x as usize].live -= 1;
        self.kill_slot(k);
        self.set_hi(j, khi);
        self.holes -= 1;
        if let Some(only) = self.only_slot(x) {
            self.mark_slot(only);
        }
        // The grown interval may now contain required intervals.
        let lo = self.slots[j as usize].lo;
        let inside: Vec<u32> = (0..self.slots.len() as u32)
            .filter(|&s| {
                let sl = &self.slots[s as usize];
                s != j && sl.alive && lo <= sl.lo && sl.hi <= khi && self.vars[sl.var as usize].live == 1
            })
            .collect();
        self.dirty.subset.extend(inside);
    }

    // ----- reduction rules ------------------------------------------------

    /// Applies the chosen rules until a full pass fires nothing.
    pub fn reduce(&mut self, rules: RuleSet) -> bool {
        let mut any = false;
        loop {
            let mut fired = false;
            if rules.subset {
                fired |= self.subset_phase();
            } else {
                self.dirty.subset.clear();
            }
            if rules.dominance {
                fired |= self.dominance_phase();
            } else {
                self.dirty.dom.clear();
            }
            if rules.generalized_dominance {
                fired |= self.generalized_phase();
            }
            if rules.unit {
                fired |= self.unit_phase();
            } else {
                self.dirty.unit.clear();
            }
            if !fired {
                return any;
            }
            any = true;
        }
    }

    /// Red-⊆: a required interval inside another interval removes the
    /// variable of the larger one. Removals of one pass are recorded in
    /// variable order.
    fn subset_phase(&mut self) -> bool {
        let mut cand = std::mem::take(&mut self.dirty.subset);
        cand.retain(|&s| self.slots[s as usize].alive && self.is_required(s));
        cand.sort_unstable_by_key(|&s| {
            let sl = &self.slots[s as usize];
            (sl.hi, sl.lo, sl.var, s)
        });
        cand.dedup();
        let mut removed = Vec::new();
        let mut hits = Vec::new();
        for s in cand {
            if !self.slots[s as usize].alive {
                continue;
            }
            let (lo, hi) = self.slot_bounds(s);
            hits.clear();
            self.index.collect(hi, lo, &mut hits);
            let mut vars: Vec<u32> = hits.iter().filter(|&&h| h != s).map(|&h| self.slots[h as usize].var).collect();
            vars.sort_unstable();
            vars.dedup();
            for x in vars {
                self.remove_var_raw(x);
                removed.push(x);
            }
        }
        removed.sort_unstable();
        for &x in &removed {
            self.record(|ws| TraceOp::VarRemoved { var: ws.names[x as usize].to_string(), rule: RemovalRule::Subset });
        }
        !removed.is_empty()
    }

    /// True when some other value's interval set contains `v`'s, with ties
    /// resolved in favour of the larger value. Neighbours suffice because
    /// intervals are runs of consecutive values.
    fn dominated(&self, v: u32) -> bool {
        if !self.alive_value[v as usize] {
            return false;
        }
        let (p, n) = (self.prev[v as usize], self.next[v as usize]);
        if p == NIL && n == NIL {
            // A lone value with nothing left to hit has no use.
            return self.live_vars == 0;
        }
        (n != NIL && self.end_count[v as usize] == 0)
            || (p != NIL && self.start_count[v as usize] == 0 && self.end_count[p as usize] > 0)
    }

    fn dominance_phase(&mut self) -> bool {
        let mut fired = false;
        for v in std::mem::take(&mut self.dirty.dom) {
            self.dirty.dom_active.insert(v);
        }
        let mut from = 0;
        while let Some(v) = self.dirty.dom_active.next_from(from) {
            self.dirty.dom_active.remove(v);
            self.dirty.cursor = Some(v);
            from = v as usize + 1;
            if self.dominated(v) {
                self.record(|ws| TraceOp::Discarded(ws.label(v)));
                self.delete_value(v);
                fired = true;
            }
        }
        self.dirty.cursor = None;
        fired
    }

    /// Variables containing `v`, sorted.
    fn vars_containing(&self, v: u32) -> Vec<u32> {
        let mut hits = Vec::new();
        self.index.collect(v, v, &mut hits);
        let mut vars: Vec<u32> = hits.iter().map(|&s| self.slots[s as usize].var).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Discards `v'` when every variable containing it also contains some
    /// other value `v` (largest value kept on equal sets). Quadratic.
    fn generalized_phase(&mut self) -> bool {
        let values: Vec<u32> = self.values().collect();
        let sets: Vec<Vec<u32>> = values.iter().map(|&v| self.vars_containing(v)).collect();
        let mut gone = vec![false; values.len()];
        let mut fired = false;
        for i in 0..values.len() {
            let dominated = (0..values.len()).any(|j| {
                j != i && !gone[j] && is_subset(&sets[i], &sets[j]) && (sets[i].len() < sets[j].len() || j > i)
            });
            if dominated {
                gone[i] = true;
                let v = values[i];
                self.record(|ws| TraceOp::Discarded(ws.label(v)));
                self.delete_value(v);
                fired = true;
            }
        }
        fired
    }

    fn unit_phase(&mut self) -> bool {
        let mut cand = std::mem::take(&mut self.dirty.unit);
        cand.sort_unstable();
        cand.dedup();
        let mut fired = false;
        for x in cand {
            if !self.vars[x as usize].alive {
                continue;
            }
            let Some(only) = self.only_slot(x) else { continue };
            let (lo, hi) = self.slot_bounds(only);
            if lo == hi {
                self.select(lo);
                fired = true;
            }
        }
        fired
    }

    // ----- scan and merge ---------------------------------------------------

    fn intersects(&self, s: u32, lo: u32, hi: u32) -> bool {
        let (a, b) = self.slot_bounds(s);
        a <= hi && lo <= b
    }

    /// Single left-to-right pass assigning leaders and followers and merging
    /// the last two followers of every popular leader whenever all of them
    /// have at least two.
    pub fn scan_and_merge(&mut self) -> Result<ScanReport, KernelError> {
        let order = self.sorted_slots();
        let mut leading = true;
        let mut leaders: Vec<u32> = Vec::new();
        let mut followers: Vec<Vec<u32>> = Vec::new();
        let mut leaders_of: HashMap<u32, Vec<usize>> = HashMap::new();
        let mut previous: Option<(u32, u32)> = None;
        let mut merges = 0;

        for s in order {
            if !self.slots[s as usize].alive {
                continue;
            }
            let (lo, hi) = self.slot_bounds(s);
            let required = self.is_required(s);
            if leading || !required {
                leaders.push(s);
                followers.push(Vec::new());
                leading = !required;
            } else {
                let (plo, phi) = previous.expect("a leader precedes every follower");
                let popular: Vec<usize> = (0..leaders.len())
                    .filter(|&l| {
                        self.intersects(leaders[l], plo, phi)
                            || followers[l].last().is_some_and(|&f| self.intersects(f, plo, phi))
                    })
                    .collect();
                let mut assigned = Vec::new();
                for &l in &popular {
                    if self.intersects(leaders[l], lo, hi)
                        || followers[l].last().is_some_and(|&f| self.intersects(f, lo, hi))
                    {
                        continue;
                    }
                    followers[l].push(s);
                    assigned.push(l);
                }
                if assigned.is_empty() {
                    return Err(KernelError::Orphan { var: self.slot_var_name(s).to_string(), lo: self.label(lo), hi: self.label(hi) });
                }
                leaders_of.insert(s, assigned);
                if popular.iter().all(|&l| followers[l].len() >= 2) {
                    self.merge(&popular, &leaders, &mut followers, &leaders_of)?;
                    merges += 1;
                }
            }
            previous = Some((lo, hi));
        }

        let groups: Vec<LeaderGroup> = leaders
            .iter()
            .zip(&followers)
            .map(|(&l, fs)| LeaderGroup { leader: self.snapshot(l), followers: fs.iter().map(|&f| self.snapshot(f)).collect() })
            .collect();
        Ok(ScanReport {
            leaders: leaders.len(),
            merges,
            max_followers: followers.iter().map(Vec::len).max().unwrap_or(0),
            groups,
        })
    }

    fn merge(
        &mut self,
        popular: &[usize],
        leaders: &[u32],
        followers: &mut [Vec<u32>],
        leaders_of: &HashMap<u32, Vec<usize>>,
    ) -> Result<(), KernelError> {
        let pairs: Vec<(usize, u32, u32)> = popular
            .iter()
            .map(|&l| {
                let f = &followers[l];
                (l, f[f.len() - 2], f[f.len() - 1])
            })
            .collect();
        let mut new_hi: HashMap<u32, u32> = HashMap::new();
        for &(_, kept, dropped) in &pairs {
            let h = self.slots[dropped as usize].hi;
            new_hi.entry(kept).and_modify(|x| *x = (*x).max(h)).or_insert(h);
        }
        if let Some(&(_, _, d)) = pairs.iter().find(|&&(_, _, d)| new_hi.contains_key(&d)) {
            return Err(KernelError::MergeConflict(self.slot_var_name(d).to_string()));
        }

        let before = self.budget;
        self.budget -= 1;
        let batch: Vec<MergePair> = pairs
            .iter()
            .map(|&(l, kept, dropped)| MergePair {
                leader: self.snapshot(leaders[l]),
                kept: self.snapshot(kept),
                dropped: self.snapshot(dropped),
                new_hi: self.label(new_hi[&kept]),
            })
            .collect();
        let after = self.budget;
        self.record(|_| TraceOp::MergeBatch { budget_before: before, budget_after: after, pairs: batch });

        let mut kept_order: Vec<u32> = Vec::new();
        let mut dropped_order: Vec<u32> = Vec::new();
        for &(_, kept, dropped) in &pairs {
            if !kept_order.contains(&kept) {
                kept_order.push(kept);
            }
            if !dropped_order.contains(&dropped) {
                dropped_order.push(dropped);
            }
        }
        for kept in kept_order {
            self.set_hi(kept, new_hi[&kept]);
        }
        for dropped in dropped_order {
            for &l in leaders_of.get(&dropped).map(Vec::as_slice).unwrap_or(&[]) {
                followers[l].retain(|&f| f != dropped);
            }
            let x = self.slots[dropped as usize].var;
            self.remove_var(x, RemovalRule::MergeDrop);
        }
        Ok(())
    }

    // ----- replay ---------------------------------------------------------

    pub fn var_ids_by_name(&self) -> HashMap<Arc<str>, u32> {
        self.names.iter().enumerate().map(|(i, x)| (x.clone(), i as u32)).collect()
    }

    fn value_for_replay(&self, label: i64) -> Result<u32, KernelError> {
        self.value_of_label(label).ok_or(KernelError::UnknownValue(label))
    }

    /// Re-applies one recorded operation.
    pub fn apply_op(&mut self, op: &TraceOp, names: &HashMap<Arc<str>, u32>) -> Result<(), KernelError> {
        let var = |name: &str| names.get(name).copied().ok_or_else(|| KernelError::UnknownVariable(name.to_string()));
        match op {
            TraceOp::Selected(l) => {
                let v = self.value_for_replay(*l)?;
                self.select(v);
            }
            TraceOp::Discarded(l) => {
                let v = self.value_for_replay(*l)?;
                self.discard(v)?;
            }
            TraceOp::VarRemoved { var: name, rule: RemovalRule::Subset } => {
                let x = var(name)?;
                if !self.var_alive(x) {
                    return Err(KernelError::ReplayMismatch(format!("`{name}` already removed")));
                }
                self.remove_var(x, RemovalRule::Subset);
            }
            TraceOp::VarRemoved { var: name, .. } => {
                if self.var_alive(var(name)?) {
                    return Err(KernelError::ReplayMismatch(format!("`{name}` should have been removed")));
                }
            }
            TraceOp::MergeBatch { budget_before, budget_after, pairs } => {
                if self.budget != *budget_before {
                    return Err(KernelError::ReplayMismatch(format!(
                        "merge expects budget {budget_before}, state has {}",
                        self.budget
                    )));
                }
                let mut dropped = Vec::new();
                for p in pairs {
                    let kept = var(&p.kept.var)?;
                    let Some(slot) = self.only_slot(kept) else {
                        return Err(KernelError::ReplayMismatch(format!("kept follower `{}` is not required", p.kept.var)));
                    };
                    let hi = self.value_for_replay(p.new_hi)?;
                    if self.slots[slot as usize].hi != hi {
                        self.set_hi(slot, hi);
                    }
                    let d = var(&p.dropped.var)?;
                    if !dropped.contains(&d) {
                        dropped.push(d);
                    }
                }
                for d in dropped {
                    self.remove_var(d, RemovalRule::MergeDrop);
                }
                self.budget = *budget_after;
            }
        }
        Ok(())
    }

    /// Right endpoints present in the current state, as labels.
    pub fn right_endpoint_labels(&self) -> Vec<i64> {
        self.values().filter(|&v| self.end_count[v as usize] > 0).map(|v| self.label(v)).collect()
    }
}

fn is_subset(small: &[u32], large: &[u32]) -> bool {
    let mut it = large.iter();
    small.iter().all(|x| it.any(|y| y == x))
}
