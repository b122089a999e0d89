//! Seeded random instances.
//!
//! Stream 0 of the ChaCha generator decides which variables receive the
//! holes; variable `i` draws its intervals from stream `i + 1`. Adding
//! variables therefore leaves the shape of the existing ones alone.

use nvk_core::{Instance, ModelError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub vars: usize,
    pub universe_size: usize,
    pub holes: usize,
    pub budget: i64,
    pub seed: u64,
    pub min_len: usize,
    pub max_len: usize,
}

impl GenParams {
    pub fn new(vars: usize, universe_size: usize, holes: usize, budget: i64, seed: u64) -> Self {
        GenParams { vars, universe_size, holes, budget, seed, min_len: 1, max_len: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("universe must have at least one value")]
    EmptyUniverse,
    #[error("interval length range {0}..={1} is empty or starts at zero")]
    BadLengths(usize, usize),
    #[error("{holes} holes do not fit: at most {cap} with {vars} variables over {size} values")]
    TooManyHoles { holes: usize, cap: usize, vars: usize, size: usize },
    #[error("budget must be non-negative")]
    NegativeBudget,
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn gen_random(p: &GenParams) -> Result<Instance, GenError> {
    let size = p.universe_size;
    if size == 0 {
        return Err(GenError::EmptyUniverse);
    }
    if p.min_len == 0 || p.min_len > p.max_len {
        return Err(GenError::BadLengths(p.min_len, p.max_len));
    }
    if p.budget < 0 {
        return Err(GenError::NegativeBudget);
    }
    let per_var = (size - 1) / 2;
    let cap = p.vars * per_var;
    if p.holes > cap {
        return Err(GenError::TooManyHoles { holes: p.holes, cap, vars: p.vars, size });
    }

    let mut holes = vec![0usize; p.vars];
    let mut open: Vec<usize> = (0..p.vars).collect();
    let mut rng = stream(p.seed, 0);
    for _ in 0..p.holes {
        let at = rng.gen_range(0..open.len());
        let x = open[at];
        holes[x] += 1;
        if holes[x] == per_var {
            open.swap_remove(at);
        }
    }

    let vars = holes
        .iter()
        .enumerate()
        .map(|(x, &h)| (format!("x{}", x + 1), intervals(&mut stream(p.seed, x as u64 + 1), p, h + 1)))
        .collect();
    Ok(Instance::from_labels((1..=size as i64).collect(), vars, p.budget)?)
}

/// `m` non-adjacent intervals inside `1..=universe_size`.
fn intervals(rng: &mut ChaCha8Rng, p: &GenParams, m: usize) -> Vec<(i64, i64)> {
    let size = p.universe_size;
    let mut lens: Vec<usize> = (0..m).map(|_| rng.gen_range(p.min_len..=p.max_len)).collect();
    let room = size - (m - 1);
    let mut total: usize = lens.iter().sum();
    let mut i = 0;
    while total > room {
        if lens[i] > 1 {
            lens[i] -= 1;
            total -= 1;
        }
        i = (i + 1) % m;
    }
    // Spread the slack over the m + 1 gaps around the intervals.
    let slack = room - total;
    let mut cuts: Vec<usize> = (0..m).map(|_| rng.gen_range(0..=slack)).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(m);
    let mut pos = 1 + cuts[0];
    for (j, &len) in lens.iter().enumerate() {
        let hi = pos + len - 1;
        out.push((pos as i64, hi as i64));
        let extra = cuts.get(j + 1).map_or(0, |&c| c - cuts[j]);
        pos = hi + 2 + extra;
    }
    out
}
