//! Benchmark rows, the doubling series and the k sweep.

use std::fmt::Write as _;
use std::time::Instant;

use nvk_core::solver::{solve_fpt_with, SolveOptions};
use nvk_core::{kernelize, Instance};

use crate::gen::{gen_random, GenError, GenParams};

pub const RHO: f64 = 1.618_033_988_749_895;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub index: usize,
    pub vars: usize,
    pub values: usize,
    pub holes: usize,
    pub budget: i64,
    pub kernel_intervals: usize,
    pub kernel_values: usize,
    pub kernel_holes: usize,
    pub leaders: usize,
    pub max_followers: usize,
    pub nodes_visited: u64,
    pub consistent: bool,
    pub kernelize_secs: f64,
    pub solve_secs: f64,
    /// `kernel_intervals <= 4k + 16k^2`.
    pub intervals_ok: bool,
    /// `kernel_values <= 2 * kernel_intervals`.
    pub values_ok: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub const HEADER: &'static str = "index,vars,values,holes,budget,kernel_intervals,kernel_values,kernel_holes,\
leaders,max_followers,nodes_visited,consistent,kernelize_secs,solve_secs,intervals_ok,values_ok";

    pub fn bounds_hold(&self) -> bool {
        self.rows.iter().all(|r| r.intervals_ok && r.values_ok)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{},{}",
                r.index,
                r.vars,
                r.values,
                r.holes,
                r.budget,
                r.kernel_intervals,
                r.kernel_values,
                r.kernel_holes,
                r.leaders,
                r.max_followers,
                r.nodes_visited,
                r.consistent,
                r.kernelize_secs,
                r.solve_secs,
                r.intervals_ok,
                r.values_ok
            );
        }
        out
    }
}

pub fn bench_one(index: usize, inst: &Instance) -> anyhow::Result<BenchRow> {
    let k = inst.holes();
    let t = Instant::now();
    let kr = kernelize(inst)?;
    let kernelize_secs = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let verdict = solve_fpt_with(inst, SolveOptions { witness: false, ..SolveOptions::default() })?;
    let solve_secs = t.elapsed().as_secs_f64();
    let kernel_intervals = kr.kernel.num_intervals();
    let kernel_values = kr.kernel.num_values();
    Ok(BenchRow {
        index,
        vars: inst.num_vars(),
        values: inst.num_values(),
        holes: k,
        budget: inst.budget(),
        kernel_intervals,
        kernel_values,
        kernel_holes: kr.kernel.holes(),
        leaders: kr.scan.leaders,
        max_followers: kr.scan.max_followers,
        nodes_visited: verdict.stats.nodes_visited,
        consistent: verdict.consistent,
        kernelize_secs,
        solve_secs,
        intervals_ok: kernel_intervals <= 4 * k + 16 * k * k,
        values_ok: kernel_values <= 2 * kernel_intervals,
    })
}

/// One row per instance, in input order.
pub fn run_bench(suite: &[Instance]) -> anyhow::Result<BenchReport> {
    let rows = suite.iter().enumerate().map(|(i, inst)| bench_one(i, inst)).collect::<anyhow::Result<_>>()?;
    Ok(BenchReport { rows })
}

/// Shape used by the doubling series: `|D| = 2n`, lengths 1..=8, loose budget.
pub fn doubling_params(vars: usize, holes: usize, seed: u64) -> GenParams {
    GenParams { vars, universe_size: 2 * vars, holes, budget: vars as i64, seed, min_len: 1, max_len: 8 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingPoint {
    pub vars: usize,
    /// Median kernelization wall time over the repetitions.
    pub secs: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

/// Kernelization time at `start, 2*start, ...` variables with `holes` fixed.
/// Each point is the median of `reps` runs summed over `seeds` instances.
pub fn doubling_series(holes: usize, start: usize, steps: usize, seeds: u64, reps: usize) -> Result<Vec<DoublingPoint>, GenError> {
    let mut out = Vec::with_capacity(steps);
    for step in 0..steps {
        let vars = start << step;
        let suite = (0..seeds).map(|s| gen_random(&doubling_params(vars, holes, s))).collect::<Result<Vec<_>, _>>()?;
        let times = (0..reps)
            .map(|_| {
                let t = Instant::now();
                for inst in &suite {
                    std::hint::black_box(kernelize(inst).expect("generated instances kernelize"));
                }
                t.elapsed().as_secs_f64()
            })
            .collect();
        out.push(DoublingPoint { vars, secs: median(times) });
    }
    Ok(out)
}

/// Consecutive time ratios of a doubling series.
pub fn doubling_ratios(points: &[DoublingPoint]) -> Vec<f64> {
    points.windows(2).map(|w| w[1].secs / w[0].secs).collect()
}

/// Instance for the k sweep. The budget is one below the optimum, so the
/// search has to refute.
pub fn sweep_instance(holes: usize, seed: u64) -> anyhow::Result<Instance> {
    let vars = holes.max(2);
    let p = GenParams { vars, universe_size: 2 * vars, holes, budget: vars as i64, seed, min_len: 1, max_len: 3 };
    let loose = gen_random(&p)?;
    let best = min_budget(&loose)?;
    Ok(loose.with_budget((best - 1).max(0)))
}

/// Smallest budget for which the instance is consistent.
pub fn min_budget(inst: &Instance) -> anyhow::Result<i64> {
    let decide = SolveOptions { witness: false, ..SolveOptions::default() };
    let (mut lo, mut hi) = (0i64, inst.num_vars() as i64);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if solve_fpt_with(&inst.with_budget(mid), decide)?.consistent {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub holes: usize,
    pub max_nodes: u64,
    /// `max_nodes / rho^holes`.
    pub ratio: f64,
    pub prune_agrees: bool,
}

/// For each k, solves `seeds` sweep instances with and without pruning.
pub fn k_sweep(ks: impl IntoIterator<Item = usize>, seeds: u64) -> anyhow::Result<Vec<SweepPoint>> {
    let on = SolveOptions { witness: false, ..SolveOptions::default() };
    let off = SolveOptions { prune: false, ..on };
    let mut out = Vec::new();
    for k in ks {
        let mut max_nodes = 0;
        let mut prune_agrees = true;
        for seed in 0..seeds {
            let inst = sweep_instance(k, seed)?;
            let a = solve_fpt_with(&inst, on)?;
            let b = solve_fpt_with(&inst, off)?;
            max_nodes = max_nodes.max(a.stats.nodes_visited);
            prune_agrees &= a.consistent == b.consistent;
        }
        out.push(SweepPoint { holes: k, max_nodes, ratio: max_nodes as f64 / RHO.powi(k as i32), prune_agrees });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite_empty_report() {
        let r = run_bench(&[]).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.to_csv(), format!("{}\n", BenchReport::HEADER));
        assert!(r.bounds_hold());
    }

    #[test]
    fn rows_follow_input_order() {
        let suite: Vec<Instance> = (0..4).map(|s| gen_random(&GenParams::new(6 + s as usize, 12, 2, 3, s)).unwrap()).collect();
        let r = run_bench(&suite).unwrap();
        assert_eq!(r.rows.iter().map(|x| x.vars).collect::<Vec<_>>(), vec![6, 7, 8, 9]);
        assert!(r.bounds_hold());
        assert_eq!(r.to_csv().lines().count(), 5);
    }

    #[test]
    fn sweep_instances_are_tight() {
        let inst = sweep_instance(4, 3).unwrap();
        assert_eq!(inst.holes(), 4);
        assert_eq!(min_budget(&inst).unwrap(), inst.budget() + 1);
    }
}
