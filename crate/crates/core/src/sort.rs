//! Linear-time interval ordering.
//!
//! Every phase that walks intervals "left to right" uses the same order:
//! right endpoint ascending, then left endpoint ascending, then variable
//! declaration order. Two stable counting-sort passes produce it in
//! `O(n + k + |D|)`.

use crate::model::{Instance, Interval, VarId};

/// Stable counting sort of `items` by a key in `0..buckets`.
pub fn counting_sort_by_key<T: Copy>(items: &[T], buckets: usize, key: impl Fn(&T) -> usize) -> Vec<T> {
    let mut counts = vec![0usize; buckets + 1];
    for it in items {
        counts[key(it) + 1] += 1;
    }
    for i in 1..counts.len() {
        counts[i] += counts[i - 1];
    }
    let mut out: Vec<Option<T>> = vec![None; items.len()];
    for it in items {
        let k = key(it);
        out[counts[k]] = Some(*it);
        counts[k] += 1;
    }
    out.into_iter().map(|x| x.expect("every slot filled")).collect()
}

/// Orders `(lo, hi, payload)` triples by `(hi, lo)`, keeping the input order
/// among exact ties.
pub fn sort_by_hi_then_lo<T: Copy>(items: &[T], universe: usize, lo: impl Fn(&T) -> usize, hi: impl Fn(&T) -> usize) -> Vec<T> {
    let by_lo = counting_sort_by_key(items, universe, lo);
    counting_sort_by_key(&by_lo, universe, hi)
}

/// An interval as seen by the scan: its variable, its slot among the
/// variable's intervals, and its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanEntry {
    pub var: VarId,
    pub slot: usize,
    pub interval: Interval,
}

/// All intervals of an instance in scan order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedScan {
    pub entries: Vec<ScanEntry>,
}

impl SortedScan {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ScanEntry> {
        self.entries.iter()
    }
}

pub fn sort_intervals(inst: &Instance) -> SortedScan {
    let mut items = Vec::with_capacity(inst.num_intervals());
    for (i, var) in inst.vars().iter().enumerate() {
        for (slot, iv) in var.intervals.iter().enumerate() {
            items.push(ScanEntry { var: VarId(i as u32), slot, interval: *iv });
        }
    }
    let entries = sort_by_hi_then_lo(&items, inst.num_values(), |e| e.interval.lo.index(), |e| e.interval.hi.index());
    SortedScan { entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_on_hi_break_by_lo() {
        let inst = Instance::from_labels((1..=5).collect(), vec![("a", vec![(5, 5)]), ("b", vec![(3, 5)])], 2).unwrap();
        let order: Vec<u32> = sort_intervals(&inst).iter().map(|e| e.var.0).collect();
        assert_eq!(order, vec![1, 0]);
    }

    #[test]
    fn identical_intervals_keep_declaration_order() {
        let inst = Instance::from_labels((1..=3).collect(), vec![("a", vec![(2, 3)]), ("b", vec![(2, 3)])], 2).unwrap();
        let order: Vec<u32> = sort_intervals(&inst).iter().map(|e| e.var.0).collect();
        assert_eq!(order, vec![0, 1]);
    }

    #[test]
    fn single_interval() {
        let inst = Instance::from_labels(vec![7], vec![("a", vec![(7, 7)])], 1).unwrap();
        assert_eq!(sort_intervals(&inst).len(), 1);
    }
}
