//! Acceptance run. One line per criterion; exits non-zero if any fails.
//! Criteria run one after another so the timing checks do not compete.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use nvk::bench::{doubling_ratios, doubling_series, k_sweep, RHO};
use nvk::gen::{gen_random, GenParams};
use nvk_core::kernel::{apply_reduction_rules, format_trace, kernelize, scan_and_merge};
use nvk_core::solver::{solve_fpt_with, BranchChoice, SolveOptions};
use nvk_core::{consistency_by_enumeration, enforce_hac, min_hitting_oracle, parse_instance, solve_fpt, Instance, Outcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const ORACLE_SUITE: u64 = 1000;
const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const HAC_SUITE: u64 = 300;
const HAC_LIMIT: Duration = Duration::from_secs(120);
const SWEEP_KS: std::ops::RangeInclusive<usize> = 2..=18;
const SWEEP_SEEDS: u64 = 8;
const SWEEP_C: f64 = 4.0;
const DOUBLING_K: usize = 6;
const DOUBLING_START: usize = 1000;
const DOUBLING_STEPS: usize = 4;
const DOUBLING_SEEDS: u64 = 5;
const DOUBLING_REPS: usize = 9;
const RATIO_LO: f64 = 1.5;
const RATIO_HI: f64 = 3.0;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load(name: &str) -> Instance {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name);
    parse_instance(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn label_set(inst: &Instance) -> Vec<i64> {
    inst.universe().to_vec()
}

/// Domains as bitmasks over value positions.
fn masks(inst: &Instance) -> Vec<u32> {
    inst.vars().iter().map(|v| v.values().fold(0u32, |m, x| m | 1 << x.0)).collect()
}

fn hits_all(ms: &[u32], s: u32) -> bool {
    ms.iter().all(|m| m & s != 0)
}

fn brute_min(inst: &Instance) -> u32 {
    let ms = masks(inst);
    (0u32..1 << inst.num_values()).filter(|&s| hits_all(&ms, s)).map(u32::count_ones).min().unwrap()
}

fn brute_supported(inst: &Instance, idx: usize) -> bool {
    let ms = masks(inst);
    (0u32..1 << inst.num_values())
        .any(|s| s >> idx & 1 == 1 && s.count_ones() as i64 <= inst.budget() && hits_all(&ms, s))
}

/// Checks a witness against the raw domains, without the library's own checker.
fn validate(inst: &Instance, values: &[i64], assignment: &[(String, i64)]) -> Result<(), String> {
    let mut distinct = values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    ensure(distinct.len() == values.len(), || format!("repeated values {values:?}"))?;
    ensure(values.len() as i64 <= inst.budget(), || format!("{} values over budget {}", values.len(), inst.budget()))?;
    ensure(assignment.len() == inst.num_vars(), || "assignment size".into())?;
    for ((name, v), var) in assignment.iter().zip(inst.vars()) {
        ensure(name == &var.name, || format!("assignment order at {name}"))?;
        ensure(values.contains(v), || format!("{name} = {v} outside the witness"))?;
        let inside = var.intervals.iter().any(|iv| {
            let (lo, hi) = inst.interval_labels(iv);
            lo <= *v && *v <= hi
        });
        ensure(inside && label_set(inst).contains(v), || format!("{name} = {v} outside its domain"))?;
    }
    Ok(())
}

/// Oracle suite: n <= 10, |D| <= 12, N <= n, drawn through the generator.
fn oracle_params(seed: u64) -> GenParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let vars = rng.gen_range(1..=10);
    let size = rng.gen_range(3..=12);
    let cap = vars * ((size - 1) / 2);
    GenParams {
        vars,
        universe_size: size,
        holes: rng.gen_range(0..=cap.min(10)),
        budget: rng.gen_range(0..=vars as i64),
        seed,
        min_len: 1,
        max_len: rng.gen_range(1..=4),
    }
}

fn golden_pipeline() -> Check {
    let t = Instant::now();
    let fig1 = load("fig1.nvk");
    ensure(fig1.holes() == 5, || format!("k = {}", fig1.holes()))?;

    let mut trace = Vec::new();
    let fig2 = apply_reduction_rules(&fig1, &mut trace);
    ensure(fig2.num_vars() == 11 && fig2.num_intervals() == 14, || "fig2 size".into())?;
    ensure(fig2.universe() == [4, 6, 7, 8, 9, 10, 11, 12, 13, 14], || format!("fig2 D = {:?}", fig2.universe()))?;
    ensure(fig2.budget() == 5, || "fig2 N".into())?;
    ensure(fig2 == load("fig2.nvk"), || "fig2 domains differ".into())?;
    let got = format_trace(&trace);
    let want = "remove x5 subset\nremove x8 subset\ndiscard 1\ndiscard 5\nselect 2\n\
                remove x1 unit-collateral\nremove x2 unit-collateral\ndiscard 3\n";
    ensure(got == want, || format!("rule trace:\n{got}"))?;

    let mut trace = Vec::new();
    let (merged, _) = scan_and_merge(&fig2, &mut trace).map_err(|e| e.to_string())?;
    let fig3 = apply_reduction_rules(&merged, &mut trace);
    let got = format_trace(&trace);
    let want = "merge N5->4 x3:x6+x9->9 x4:x7+x10->10\nremove x9 merge-drop\nremove x10 merge-drop\ndiscard 7\ndiscard 8\n";
    ensure(got == want, || format!("scan trace:\n{got}"))?;
    ensure(fig3.num_vars() == 9 && fig3.num_intervals() == 12, || "fig3 size".into())?;
    ensure(fig3.universe() == [4, 6, 9, 10, 11, 12, 13, 14], || format!("fig3 D = {:?}", fig3.universe()))?;
    ensure(fig3.budget() == 4, || "fig3 N".into())?;
    ensure(fig3 == load("fig3.nvk"), || "fig3 domains differ".into())?;
    ensure(kernelize(&fig1).map_err(|e| e.to_string())?.kernel == fig3, || "kernelize differs".into())?;

    let el = t.elapsed();
    ensure(el < GOLDEN_LIMIT, || format!("took {el:?}"))?;
    Ok(format!("{el:.2?}"))
}

fn golden_solve() -> Check {
    let t = Instant::now();
    let fig1 = load("fig1.nvk");
    let v = solve_fpt_with(&fig1, SolveOptions { record_branches: true, ..SolveOptions::default() }).map_err(|e| e.to_string())?;
    ensure(v.consistent, || "inconsistent".into())?;
    ensure(v.kernel_witness.as_deref() == Some(&[4, 9, 12, 13][..]), || format!("kernel witness {:?}", v.kernel_witness))?;
    let w = v.witness.as_ref().ok_or("no witness")?;
    ensure(w.values == [2, 4, 7, 9, 12, 13], || format!("witness {:?}", w.values))?;
    validate(&fig1, &w.values, &w.assignment)?;
    let root = v.branch_log.first().ok_or("no branch log")?;
    ensure(root.depth == 0 && root.interval.var == "x3", || format!("root branches on {}", root.interval.var))?;
    ensure(root.a.selected == [4, 9], || format!("A selects {:?}", root.a.selected))?;
    ensure(root.b.selected == [6, 10], || format!("B selects {:?}", root.b.selected))?;
    let resume = |s: &Option<nvk_core::kernel::IntervalSnapshot>| s.as_ref().map(|r| r.var.clone());
    ensure(resume(&root.a.resume).as_deref() == Some("x11"), || "A resumes elsewhere".into())?;
    ensure(resume(&root.b.resume).as_deref() == Some("x11"), || "B resumes elsewhere".into())?;
    ensure(root.choice == BranchChoice::OnlyA, || format!("choice {:?}", root.choice))?;
    let el = t.elapsed();
    ensure(el < GOLDEN_LIMIT, || format!("took {el:?}"))?;
    Ok(format!("{el:.2?}"))
}

fn oracle_agreement() -> Check {
    let t = Instant::now();
    let mut positive = 0;
    for seed in 0..ORACLE_SUITE {
        let inst = gen_random(&oracle_params(seed)).map_err(|e| e.to_string())?;
        let truth = brute_min(&inst) as i64 <= inst.budget();
        let fpt = solve_fpt(&inst).map_err(|e| e.to_string())?;
        let en = consistency_by_enumeration(&inst).map_err(|e| e.to_string())?;
        let or = min_hitting_oracle(&inst).map_err(|e| e.to_string())?;
        let verdicts = [fpt.consistent, en.consistent, or.fits(inst.budget())];
        ensure(verdicts.iter().all(|&v| v == truth), || format!("seed {seed}: {verdicts:?}, brute force {truth}"))?;
        if truth {
            positive += 1;
            for w in [&fpt.witness, &en.witness, &Some(or.witness.clone())] {
                let w = w.as_ref().ok_or_else(|| format!("seed {seed}: no witness"))?;
                validate(&inst, &w.values, &w.assignment).map_err(|e| format!("seed {seed}: {e}"))?;
            }
        }
    }
    let el = t.elapsed();
    ensure(el < ORACLE_LIMIT, || format!("took {el:?}"))?;
    Ok(format!("{ORACLE_SUITE} instances, {positive} consistent, {el:.2?}"))
}

fn kernel_bounds() -> Check {
    let mut worst = (0usize, 0usize, 0usize);
    for seed in 0..ORACLE_SUITE {
        let inst = gen_random(&oracle_params(seed)).map_err(|e| e.to_string())?;
        let kr = kernelize(&inst).map_err(|e| e.to_string())?;
        let k = inst.holes();
        let kern = &kr.kernel;
        let opt = kern.num_optional();
        ensure(opt <= 2 * k, || format!("seed {seed}: {opt} optional intervals, k = {k}"))?;
        ensure(kr.scan.leaders <= 4 * k, || format!("seed {seed}: {} leaders, k = {k}", kr.scan.leaders))?;
        ensure(kr.scan.max_followers <= 4 * k, || format!("seed {seed}: {} followers, k = {k}", kr.scan.max_followers))?;
        let mut left = vec![false; kern.num_values()];
        let mut right = vec![false; kern.num_values()];
        for var in kern.vars() {
            for iv in &var.intervals {
                left[iv.lo.index()] = true;
                right[iv.hi.index()] = true;
            }
        }
        ensure(left.iter().zip(&right).all(|(l, r)| *l && *r), || format!("seed {seed}: kernel value without both endpoints"))?;
        worst = (worst.0.max(opt), worst.1.max(kr.scan.leaders), worst.2.max(kr.scan.max_followers));
    }
    Ok(format!("{ORACLE_SUITE} kernels, max optional {}, leaders {}, followers {}", worst.0, worst.1, worst.2))
}

fn hac_correctness() -> Check {
    let t = Instant::now();
    let mut filtered_any = 0;
    for seed in 0..HAC_SUITE {
        let mut p = oracle_params(seed + 1_000_000);
        p.universe_size = p.universe_size.min(10);
        p.holes = p.holes.min(p.vars * ((p.universe_size - 1) / 2));
        let inst = gen_random(&p).map_err(|e| e.to_string())?;
        let res = enforce_hac(&inst).map_err(|e| e.to_string())?;
        let expected: Vec<i64> =
            (0..inst.num_values()).filter(|&i| !brute_supported(&inst, i)).map(|i| inst.universe()[i]).collect();
        match &res.outcome {
            Outcome::Wipeout => {
                ensure(brute_min(&inst) as i64 > inst.budget(), || format!("seed {seed}: spurious wipeout"))?;
            }
            Outcome::Filtered(out) => {
                ensure(res.removed_values == expected, || {
                    format!("seed {seed}: removed {:?}, brute force {expected:?}", res.removed_values)
                })?;
                let kept: Vec<i64> = inst.universe().iter().copied().filter(|v| !expected.contains(v)).collect();
                ensure(out.universe() == kept, || format!("seed {seed}: universe {:?}", out.universe()))?;
                let again = enforce_hac(out).map_err(|e| e.to_string())?;
                ensure(again.filtered() == Some(out) && again.removed_values.is_empty(), || format!("seed {seed}: not idempotent"))?;
                if !expected.is_empty() {
                    filtered_any += 1;
                }
            }
        }
    }
    let el = t.elapsed();
    ensure(el < HAC_LIMIT, || format!("took {el:?}"))?;
    Ok(format!("{HAC_SUITE} instances, {filtered_any} with removals, {el:.2?}"))
}

fn branch_growth() -> Check {
    let rho = (1.0 + 5f64.sqrt()) / 2.0;
    ensure((RHO - rho).abs() < 1e-12, || "golden ratio constant".into())?;
    let pts = k_sweep(SWEEP_KS, SWEEP_SEEDS).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for p in &pts {
        let ratio = p.max_nodes as f64 / rho.powi(p.holes as i32);
        worst = worst.max(ratio);
        ensure(p.prune_agrees, || format!("k = {}: pruning changed a verdict", p.holes))?;
        ensure(ratio <= SWEEP_C, || format!("k = {}: {} nodes, ratio {ratio:.3}", p.holes, p.max_nodes))?;
    }
    Ok(format!("k = {SWEEP_KS:?}, max nodes / rho^k = {worst:.3} <= {SWEEP_C}"))
}

fn linearity() -> Check {
    let pts = doubling_series(DOUBLING_K, DOUBLING_START, DOUBLING_STEPS, DOUBLING_SEEDS, DOUBLING_REPS).map_err(|e| e.to_string())?;
    let ratios = doubling_ratios(&pts);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    for (p, r) in pts.iter().skip(1).zip(&ratios) {
        ensure((RATIO_LO..=RATIO_HI).contains(r), || format!("n = {}: ratio {r:.3}, all [{}]", p.vars, shown.join(", ")))?;
    }
    Ok(format!("n = {}..{}, ratios [{}]", DOUBLING_START, pts.last().map_or(0, |p| p.vars), shown.join(", ")))
}

fn main() {
    // libtest flags such as `--quiet` are accepted and ignored.
    let criteria: [Criterion; 7] = [
        ("golden pipeline", golden_pipeline),
        ("golden solve", golden_solve),
        ("oracle triple agreement", oracle_agreement),
        ("kernel bounds", kernel_bounds),
        ("HAC correctness", hac_correctness),
        ("branch growth", branch_growth),
        ("kernelization linearity", linearity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
