//! `nvk` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nvk_core::kernel::format_trace;
use nvk_core::solver::{solve_fpt_with, SolveOptions};
use nvk_core::{
    consistency_by_enumeration, enforce_hac, kernelize, min_hitting_oracle, parse_instance, serialize_instance, Instance,
    Outcome, Solution,
};

use crate::bench::{doubling_ratios, doubling_series, run_bench};
use crate::gen::{gen_random, GenParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nvk", version, about = "AtMost-NValue consistency, kernelization and filtering")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Decide consistency; exit 0 if consistent, 1 if not.
    Check {
        file: PathBuf,
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value_t = Method::Fpt)]
        method: Method,
        /// Explore both branches everywhere.
        #[arg(long)]
        no_prune: bool,
    },
    /// Write the kernel, optionally with the operation trace.
    Kernelize {
        file: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Remove every unsupported value; exit 1 on wipeout.
    Propagate {
        file: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Exhaustive minimum hitting set.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        witness: bool,
    },
    /// Write a seeded random instance.
    Gen {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// CSV report over instance files, or over generated instances when
    /// no file is given. Exit 1 if a kernel bound fails.
    Bench {
        files: Vec<PathBuf>,
        #[command(flatten)]
        shape: Shape,
        /// First seed of the generated suite.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: u64,
        /// Report the kernelization doubling series instead, starting at
        /// `--vars` with `--holes` fixed.
        #[arg(long)]
        doubling: bool,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Shape {
    #[arg(long, default_value_t = 8)]
    vars: usize,
    /// Universe size.
    #[arg(long, default_value_t = 10)]
    values: usize,
    #[arg(long, default_value_t = 4)]
    holes: usize,
    #[arg(long, default_value_t = 4, allow_negative_numbers = true)]
    budget: i64,
    #[arg(long, default_value_t = 1)]
    min_len: usize,
    #[arg(long, default_value_t = 4)]
    max_len: usize,
}

impl Shape {
    fn params(&self, seed: u64) -> GenParams {
        GenParams {
            vars: self.vars,
            universe_size: self.values,
            holes: self.holes,
            budget: self.budget,
            seed,
            min_len: self.min_len,
            max_len: self.max_len,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Fpt,
    Enum,
    Oracle,
}

/// Runs the command line and returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_instance(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict_line(ok: bool) -> &'static str {
    if ok {
        "CONSISTENT"
    } else {
        "INCONSISTENT"
    }
}

fn print_witness(w: &Solution) {
    let vals: Vec<String> = w.values.iter().map(i64::to_string).collect();
    println!("{}", vals.join(" "));
}

fn run(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Check { file, witness, method, no_prune } => {
            let inst = read_instance(&file)?;
            let (ok, w) = match method {
                Method::Fpt => {
                    let opts = SolveOptions { prune: !no_prune, witness, ..SolveOptions::default() };
                    let v = solve_fpt_with(&inst, opts)?;
                    (v.consistent, v.witness)
                }
                Method::Enum => {
                    let v = consistency_by_enumeration(&inst)?;
                    (v.consistent, v.witness)
                }
                Method::Oracle => {
                    let p = min_hitting_oracle(&inst)?;
                    let ok = p.fits(inst.budget());
                    (ok, ok.then_some(p.witness))
                }
            };
            println!("{}", verdict_line(ok));
            if let (true, Some(w)) = (witness, &w) {
                print_witness(w);
            }
            Ok(if ok { EXIT_OK } else { EXIT_NO })
        }
        Cmd::Kernelize { file, out, trace } => {
            let inst = read_instance(&file)?;
            let kr = kernelize(&inst)?;
            emit(out.as_deref(), &serialize_instance(&kr.kernel))?;
            if let Some(t) = trace {
                fs::write(&t, format_trace(&kr.trace)).with_context(|| format!("cannot write {}", t.display()))?;
            }
            Ok(EXIT_OK)
        }
        Cmd::Propagate { file, out } => {
            let inst = read_instance(&file)?;
            let res = enforce_hac(&inst)?;
            match &res.outcome {
                Outcome::Filtered(f) => {
                    emit(out.as_deref(), &serialize_instance(f))?;
                    Ok(EXIT_OK)
                }
                Outcome::Wipeout => {
                    eprintln!("WIPEOUT");
                    Ok(EXIT_NO)
                }
            }
        }
        Cmd::Oracle { file, witness } => {
            let inst = read_instance(&file)?;
            let p = min_hitting_oracle(&inst)?;
            let ok = p.fits(inst.budget());
            println!("{}", verdict_line(ok));
            println!("min {}", p.min_values);
            if witness {
                print_witness(&p.witness);
            }
            Ok(if ok { EXIT_OK } else { EXIT_NO })
        }
        Cmd::Gen { shape, seed, out } => {
            let inst = gen_random(&shape.params(seed))?;
            emit(out.as_deref(), &serialize_instance(&inst))?;
            Ok(EXIT_OK)
        }
        Cmd::Bench { files, shape, seed, count, doubling, out } => {
            if doubling {
                let pts = doubling_series(shape.holes, shape.vars, 4, 5, 5)?;
                let ratios = doubling_ratios(&pts);
                let mut text = String::from("vars,secs,ratio\n");
                for (i, p) in pts.iter().enumerate() {
                    let r = if i == 0 { String::new() } else { format!("{:.3}", ratios[i - 1]) };
                    text.push_str(&format!("{},{:.6},{}\n", p.vars, p.secs, r));
                }
                emit(out.as_deref(), &text)?;
                return Ok(EXIT_OK);
            }
            let suite = if files.is_empty() {
                (seed..seed + count).map(|s| gen_random(&shape.params(s))).collect::<Result<Vec<_>, _>>()?
            } else {
                files.iter().map(|f| read_instance(f)).collect::<Result<Vec<_>>>()?
            };
            let report = run_bench(&suite)?;
            emit(out.as_deref(), &report.to_csv())?;
            Ok(if report.bounds_hold() { EXIT_OK } else { EXIT_NO })
        }
    }
}
