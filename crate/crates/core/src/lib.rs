//! Consistency checking and filtering for the AtMost-NValue constraint,
//! parameterized by the number of holes in the domains.
//!
//! ```
//! use nvk_core::{parse_instance, solve_fpt};
//!
//! let inst = parse_instance("atmost-nvalue 1\nvalues range 1 4\nn 1\nvar a 1-2\nvar b 2-2 4-4\n").unwrap();
//! let verdict = solve_fpt(&inst).unwrap();
//! assert!(verdict.consistent);
//! assert_eq!(verdict.witness.unwrap().values, vec![2]);
//! ```

pub mod format;
pub mod kernel;
pub mod model;
pub mod propagate;
pub mod solver;
pub mod sort;

pub use format::{parse_instance, serialize_instance, ParseError};
pub use kernel::{kernelize, lift_solution, KernelError, KernelResult, TraceOp};
pub use model::{canonicalize, count_holes, Instance, Interval, ModelError, ValueId, VarDomain, VarId};
pub use propagate::{enforce_hac, has_support, Outcome, PropagationResult};
pub use solver::{
    build_assignment, consistency_by_enumeration, greedy_pierce, min_hitting_oracle, solve_fpt, solve_fpt_with, Solution,
    SolveError, SolveOptions, Verdict,
};
pub use sort::{sort_intervals, SortedScan};
