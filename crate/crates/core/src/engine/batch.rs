//! Independent runs over a shared program.

use super::{run, ReductionTrace};
use crate::frontend::Program;
use crate::logic::Entailment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential without the `parallel` feature.
    #[default]
    Parallel,
}

/// Runs every entailment; results are in input order either way.
pub fn run_batch(prog: &Program, ents: &[Entailment], max_steps: usize, exec: Exec) -> Vec<ReductionTrace> {
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            ents.par_iter().map(|e| run(prog, e, max_steps)).collect()
        }
        _ => ents.iter().map(|e| run(prog, e, max_steps)).collect(),
    }
}
