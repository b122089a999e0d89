//! Instance generation, benchmarking and the `nvk` command line.

pub mod bench;
pub mod cli;
pub mod gen;
