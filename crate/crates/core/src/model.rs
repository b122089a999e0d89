//! Instance model for AtMost-NValue consistency.
//!
//! An [`Instance`] is a list of variables whose domains are unions of
//! intervals over a totally ordered universe `D` of integer labels, plus the
//! budget `N` on the number of distinct values. Intervals are stored by
//! [`ValueId`], the dense position of a label inside the universe, so the
//! interval `[lo, hi]` denotes every universe value between the two
//! endpoints, whatever the gaps between the labels themselves.

use std::fmt;

use thiserror::Error;

/// Position of a value inside the universe of one [`Instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueId(pub u32);

impl ValueId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Position of a variable inside one [`Instance`]. Variables keep their
/// relative order through every transformation, so comparing ids compares
/// original declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One maximal hole-free run of a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: ValueId,
    pub hi: ValueId,
}

impl Interval {
    pub fn new(lo: ValueId, hi: ValueId) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    #[inline]
    pub fn contains(&self, v: ValueId) -> bool {
        self.lo <= v && v <= self.hi
    }

    #[inline]
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Number of universe values covered.
    #[inline]
    pub fn width(&self) -> usize {
        (self.hi.0 - self.lo.0) as usize + 1
    }
}

/// Domain of one variable: intervals sorted by `lo`, pairwise separated by
/// at least one universe value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDomain {
    pub name: String,
    pub intervals: Vec<Interval>,
}

impl VarDomain {
    /// Converts label intervals to a checked domain over `universe`.
    pub fn from_labels(universe: &[i64], name: String, ivs: &[(i64, i64)]) -> Result<VarDomain, ModelError> {
        let mut intervals = Vec::with_capacity(ivs.len());
        for &(lo, hi) in ivs {
            if lo > hi {
                return Err(ModelError::ReversedInterval { var: name, lo, hi });
            }
            let find = |label: i64| {
                universe
                    .binary_search(&label)
                    .map(|i| ValueId(i as u32))
                    .map_err(|_| ModelError::UnknownValue { var: name.clone(), label })
            };
            intervals.push(Interval::new(find(lo)?, find(hi)?));
        }
        let dom = VarDomain { name, intervals };
        dom.validate(universe)?;
        Ok(dom)
    }

    /// Checks non-emptiness, ordering and maximality against `universe`.
    pub fn validate(&self, universe: &[i64]) -> Result<(), ModelError> {
        if self.intervals.is_empty() {
            return Err(ModelError::EmptyDomain(self.name.clone()));
        }
        let mut prev: Option<Interval> = None;
        for iv in &self.intervals {
            for id in [iv.lo, iv.hi] {
                if id.index() >= universe.len() {
                    return Err(ModelError::ValueOutOfRange(id.0));
                }
            }
            let (lo, hi) = (universe[iv.lo.index()], universe[iv.hi.index()]);
            if iv.lo > iv.hi {
                return Err(ModelError::ReversedInterval { var: self.name.clone(), lo, hi });
            }
            if let Some(p) = prev {
                if iv.lo <= p.hi {
                    return Err(ModelError::OverlappingIntervals { var: self.name.clone(), lo, hi });
                }
                if iv.lo.0 == p.hi.0 + 1 {
                    return Err(ModelError::AdjacentIntervals { var: self.name.clone(), lo, hi });
                }
            }
            prev = Some(*iv);
        }
        Ok(())
    }

    pub fn holes(&self) -> usize {
        self.intervals.len().saturating_sub(1)
    }

    /// An interval is required when it has no friend in its variable.
    pub fn is_required(&self) -> bool {
        self.intervals.len() == 1
    }

    pub fn contains(&self, v: ValueId) -> bool {
        self.intervals.iter().any(|iv| iv.contains(v))
    }

    pub fn size(&self) -> usize {
        self.intervals.iter().map(Interval::width).sum()
    }

    pub fn values(&self) -> impl Iterator<Item = ValueId> + '_ {
        self.intervals
            .iter()
            .flat_map(|iv| (iv.lo.0..=iv.hi.0).map(ValueId))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("universe labels must be strictly increasing (found {prev} before {next})")]
    UniverseNotIncreasing { prev: i64, next: i64 },
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("value {label} used by `{var}` is not in the universe")]
    UnknownValue { var: String, label: i64 },
    #[error("interval {lo}-{hi} of `{var}` has reversed endpoints")]
    ReversedInterval { var: String, lo: i64, hi: i64 },
    #[error("intervals of `{var}` overlap or are out of order at {lo}-{hi}")]
    OverlappingIntervals { var: String, lo: i64, hi: i64 },
    #[error("intervals of `{var}` are adjacent in the universe at {lo}-{hi} and must be written as one")]
    AdjacentIntervals { var: String, lo: i64, hi: i64 },
    #[error("value index {0} is outside the universe")]
    ValueOutOfRange(u32),
}

/// An AtMost-NValue consistency instance `(X, D, dom, N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    universe: Vec<i64>,
    vars: Vec<VarDomain>,
    budget: i64,
}

impl Instance {
    /// Builds an instance from already indexed domains, checking every
    /// invariant of the model.
    pub fn new(universe: Vec<i64>, vars: Vec<VarDomain>, budget: i64) -> Result<Self, ModelError> {
        for w in universe.windows(2) {
            if w[0] >= w[1] {
                return Err(ModelError::UniverseNotIncreasing { prev: w[0], next: w[1] });
            }
        }
        let mut names = std::collections::HashSet::with_capacity(vars.len());
        for var in &vars {
            if !names.insert(var.name.as_str()) {
                return Err(ModelError::DuplicateVariable(var.name.clone()));
            }
            var.validate(&universe)?;
        }
        Ok(Instance { universe, vars, budget })
    }

    /// Builds an instance from label-valued intervals `(lo, hi)`.
    pub fn from_labels<S: Into<String>>(
        universe: Vec<i64>,
        vars: Vec<(S, Vec<(i64, i64)>)>,
        budget: i64,
    ) -> Result<Self, ModelError> {
        let domains = vars
            .into_iter()
            .map(|(name, ivs)| VarDomain::from_labels(&universe, name.into(), &ivs))
            .collect::<Result<Vec<_>, _>>()?;
        Instance::new(universe, domains, budget)
    }

    pub fn universe(&self) -> &[i64] {
        &self.universe
    }

    pub fn vars(&self) -> &[VarDomain] {
        &self.vars
    }

    pub fn var(&self, id: VarId) -> &VarDomain {
        &self.vars[id.index()]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(|i| VarId(i as u32))
    }

    pub fn budget(&self) -> i64 {
        self.budget
    }

    pub fn with_budget(&self, budget: i64) -> Instance {
        Instance { budget, ..self.clone() }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_values(&self) -> usize {
        self.universe.len()
    }

    pub fn num_intervals(&self) -> usize {
        self.vars.iter().map(|v| v.intervals.len()).sum()
    }

    pub fn num_optional(&self) -> usize {
        self.vars
            .iter()
            .filter(|v| !v.is_required())
            .map(|v| v.intervals.len())
            .sum()
    }

    pub fn label(&self, v: ValueId) -> i64 {
        self.universe[v.index()]
    }

    pub fn value_id(&self, label: i64) -> Option<ValueId> {
        self.universe.binary_search(&label).ok().map(|i| ValueId(i as u32))
    }

    /// Label bounds of an interval.
    pub fn interval_labels(&self, iv: &Interval) -> (i64, i64) {
        (self.label(iv.lo), self.label(iv.hi))
    }

    pub fn holes(&self) -> usize {
        count_holes(self)
    }

    /// True when `values` (labels) hits every domain and has at most `N`
    /// distinct members.
    pub fn is_solution(&self, values: &[i64]) -> bool {
        let mut ids: Vec<ValueId> = Vec::with_capacity(values.len());
        for &l in values {
            match self.value_id(l) {
                Some(id) => ids.push(id),
                None => return false,
            }
        }
        ids.sort_unstable();
        ids.dedup();
        if ids.len() as i64 > self.budget {
            return false;
        }
        self.vars.iter().all(|var| {
            var.intervals.iter().any(|iv| {
                let at = ids.partition_point(|&v| v < iv.lo);
                at < ids.len() && ids[at] <= iv.hi
            })
        })
    }

    /// Rebuilds the instance on the sub-universe flagged by `keep`.
    /// Domains lose the dropped values; runs that become adjacent are
    /// coalesced. Fails if a domain would become empty.
    pub fn restrict_universe(&self, keep: &[bool]) -> Result<Instance, ModelError> {
        assert_eq!(keep.len(), self.universe.len());
        let mut remap = vec![u32::MAX; keep.len()];
        let mut universe = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                remap[i] = universe.len() as u32;
                universe.push(self.universe[i]);
            }
        }
        let mut vars = Vec::with_capacity(self.vars.len());
        for var in &self.vars {
            let mut out: Vec<Interval> = Vec::new();
            for iv in &var.intervals {
                let kept = (iv.lo.0..=iv.hi.0).filter(|&i| keep[i as usize]).map(|i| remap[i as usize]);
                let (mut first, mut last) = (u32::MAX, 0);
                for r in kept {
                    first = first.min(r);
                    last = last.max(r);
                }
                if first == u32::MAX {
                    continue;
                }
                match out.last_mut() {
                    Some(prev) if prev.hi.0 + 1 == first => prev.hi = ValueId(last),
                    _ => out.push(Interval::new(ValueId(first), ValueId(last))),
                }
            }
            if out.is_empty() {
                return Err(ModelError::EmptyDomain(var.name.clone()));
            }
            vars.push(VarDomain { name: var.name.clone(), intervals: out });
        }
        Instance::new(universe, vars, self.budget)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::serialize_instance(self))
    }
}

/// Number of holes `k`: intervals minus variables.
pub fn count_holes(inst: &Instance) -> usize {
    inst.vars.iter().map(VarDomain::holes).sum()
}

/// Shrinks the universe to the values covered by some interval, coalescing
/// runs that become adjacent. Consistency is unchanged because a solution
/// only ever needs values that lie in some domain.
pub fn canonicalize(inst: &Instance) -> Instance {
    let mut keep = vec![false; inst.num_values()];
    for var in inst.vars() {
        for iv in &var.intervals {
            for i in iv.lo.0..=iv.hi.0 {
                keep[i as usize] = true;
            }
        }
    }
    inst.restrict_universe(&keep)
        .expect("every domain keeps its own values")
}
