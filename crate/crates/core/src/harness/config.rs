use std::path::PathBuf;

use crate::ofl::MAX_CANDIDATES;
use crate::probing::ProbingBudget;

/// Shared experiment parameters. The seed has no default.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Ensemble size; run `r` uses seed `seed + r`.
    pub runs: usize,
    pub output: Option<PathBuf>,
    pub candidate_limit: usize,
    pub probing_budget: ProbingBudget,
}

impl ExperimentConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            runs: 1,
            output: None,
            candidate_limit: MAX_CANDIDATES,
            probing_budget: ProbingBudget::default(),
        }
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn with_output(mut self, output: impl Into<PathBuf>) -> Self {
        self.output = Some(output.into());
        self
    }

    /// Seeds `seed, seed + 1, ..., seed + runs - 1`.
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.runs as u64).map(|r| self.seed.wrapping_add(r)).collect()
    }
}
