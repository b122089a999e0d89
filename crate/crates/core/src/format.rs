//! Text format for instances.
//!
//! ```text
//! atmost-nvalue 1
//! values range 1 14        # or: values list 4 6 9 10
//! n 6
//! var x1 1-2
//! var x2 2-3 10-10
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Instance, ModelError, VarDomain};

pub const MAGIC: &str = "atmost-nvalue";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected header `{MAGIC} {VERSION}`")]
    MissingHeader,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(String),
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("`{0}` declared more than once")]
    Redeclared(&'static str),
    #[error("`values` must be declared before any variable")]
    ValuesMissing,
    #[error("missing `n` declaration")]
    BudgetMissing,
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn int(tok: &str, line: usize) -> Result<i64, ParseError> {
    tok.parse::<i64>()
        .map_err(|_| err(line, ParseErrorKind::Malformed(format!("`{tok}` is not an integer"))))
}

/// Splits `l-r` into its two labels; both may be negative (`-3--1`).
fn interval_token(tok: &str, line: usize) -> Result<(i64, i64), ParseError> {
    let bytes = tok.as_bytes();
    let split = (1..bytes.len()).find(|&i| bytes[i] == b'-' && bytes[i - 1].is_ascii_digit());
    match split {
        Some(i) => Ok((int(&tok[..i], line)?, int(&tok[i + 1..], line)?)),
        None => Err(err(line, ParseErrorKind::Malformed(format!("`{tok}` is not an interval `lo-hi`")))),
    }
}

/// Parses the instance file format. Variables keep file order.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header_seen = false;
    let mut universe: Option<Vec<i64>> = None;
    let mut budget: Option<i64> = None;
    let mut vars: Vec<VarDomain> = Vec::new();
    let mut names = std::collections::HashSet::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if !header_seen {
            if toks.first() != Some(&MAGIC) || toks.len() != 2 {
                return Err(err(line, ParseErrorKind::MissingHeader));
            }
            if toks[1] != VERSION.to_string() {
                return Err(err(line, ParseErrorKind::UnsupportedVersion(toks[1].to_string())));
            }
            header_seen = true;
            continue;
        }
        match toks[0] {
            "values" => {
                if universe.is_some() {
                    return Err(err(line, ParseErrorKind::Redeclared("values")));
                }
                let labels = match toks.get(1) {
                    Some(&"range") if toks.len() == 4 => {
                        let (lo, hi) = (int(toks[2], line)?, int(toks[3], line)?);
                        if lo > hi {
                            return Err(err(line, ParseErrorKind::Malformed(format!("empty range {lo}..{hi}"))));
                        }
                        (lo..=hi).collect()
                    }
                    Some(&"list") => toks[2..].iter().map(|t| int(t, line)).collect::<Result<Vec<_>, _>>()?,
                    _ => {
                        return Err(err(
                            line,
                            ParseErrorKind::Malformed("expected `values range <lo> <hi>` or `values list ...`".into()),
                        ))
                    }
                };
                for w in labels.windows(2) {
                    if w[0] >= w[1] {
                        return Err(err(
                            line,
                            ModelError::UniverseNotIncreasing { prev: w[0], next: w[1] }.into(),
                        ));
                    }
                }
                universe = Some(labels);
            }
            "n" => {
                if budget.is_some() {
                    return Err(err(line, ParseErrorKind::Redeclared("n")));
                }
                if toks.len() != 2 {
                    return Err(err(line, ParseErrorKind::Malformed("expected `n <N>`".into())));
                }
                let n = int(toks[1], line)?;
                if n < 0 {
                    return Err(err(line, ParseErrorKind::Malformed("budget must be non-negative".into())));
                }
                budget = Some(n);
            }
            "var" => {
                let Some(universe) = universe.as_ref() else {
                    return Err(err(line, ParseErrorKind::ValuesMissing));
                };
                let Some(name) = toks.get(1) else {
                    return Err(err(line, ParseErrorKind::Malformed("expected `var <name> <lo>-<hi> ...`".into())));
                };
                let ivs = toks[2..]
                    .iter()
                    .map(|t| interval_token(t, line))
                    .collect::<Result<Vec<_>, _>>()?;
                if !names.insert(name.to_string()) {
                    return Err(err(line, ModelError::DuplicateVariable(name.to_string()).into()));
                }
                let dom = VarDomain::from_labels(universe, name.to_string(), &ivs).map_err(|e| err(line, e.into()))?;
                vars.push(dom);
            }
            other => {
                return Err(err(line, ParseErrorKind::Malformed(format!("unknown declaration `{other}`"))));
            }
        }
    }

    if !header_seen {
        return Err(err(last_line.max(1), ParseErrorKind::MissingHeader));
    }
    let universe = universe.ok_or_else(|| err(last_line, ParseErrorKind::ValuesMissing))?;
    let budget = budget.ok_or_else(|| err(last_line, ParseErrorKind::BudgetMissing))?;
    Instance::new(universe, vars, budget).map_err(|e| err(last_line, e.into()))
}

/// Writes an instance in the text format. Contiguous universes use
/// `values range`, anything else `values list`.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let u = inst.universe();
    let contiguous = !u.is_empty() && u.windows(2).all(|w| w[1] == w[0] + 1);
    if contiguous {
        let _ = writeln!(out, "values range {} {}", u[0], u[u.len() - 1]);
    } else {
        out.push_str("values list");
        for l in u {
            let _ = write!(out, " {l}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "n {}", inst.budget());
    for var in inst.vars() {
        let _ = write!(out, "var {}", var.name);
        for iv in &var.intervals {
            let (lo, hi) = inst.interval_labels(iv);
            let _ = write!(out, " {lo}-{hi}");
        }
        out.push('\n');
    }
    out
}
