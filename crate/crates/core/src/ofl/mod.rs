//! Online facility location with norm connection costs.
//!
//! The runners process requests strictly in arrival order. Randomness is
//! drawn from a ChaCha stream addressed by `(seed, step)`, so a trace is a
//! pure function of the instance and the seed.

pub mod bounds;
pub mod instance;
pub mod metric;
pub mod nonuniform;
pub mod opt;
pub mod trace;
pub mod uniform;

pub use bounds::{mean_stderr, verify_bounds, BoundReport, StageBreakdown, Variant};
pub use instance::{FacilityCosts, OflInstance};
pub use metric::MetricSpace;
pub use nonuniform::{cost_levels, run_nonuniform, tau_solve, CostLevels, StepState, TauSolution};
pub use opt::{offline_opt, offline_opt_openable, OfflineOpt, MAX_CANDIDATES};
pub use trace::{OflStep, OflTrace};
pub use uniform::{cap_root, run_naive_uniform, run_uniform, CapRoot};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::norms::NormError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OflError {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("facility cost at point {index} must be positive, got {value}")]
    InvalidCost { index: usize, value: f64 },
    #[error("the uniform runners need a uniform facility cost")]
    NotUniform,
    #[error("step {step}: no bisection bracket found for the cap")]
    NoBracket { step: usize },
    #[error("step {step}: constraint is not monotone in the cap\n{dump}")]
    NonMonotone { step: usize, dump: String },
    #[error("{candidates} candidate sites exceed the enumeration limit of {limit}")]
    Budget { candidates: usize, limit: usize },
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// Maximum bisection iterations for the cap searches.
pub const BISECTION_ITERS: usize = 200;
const BISECTION_ABS: f64 = 1e-12;
const BISECTION_REL: f64 = 1e-9;

pub(crate) fn bisection_done<T: Scalar>(lo: T, hi: T) -> bool {
    hi - lo <= T::of(BISECTION_ABS) + T::of(BISECTION_REL) * hi.abs()
}

/// Uniform draw in `[0, 1)` for step `step` of run `seed`.
pub fn step_uniform(seed: u64, step: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(step as u64);
    rng.gen::<f64>()
}

/// Which runner to use in an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Runner {
    Uniform,
    NaiveUniform,
    NonUniform,
}

impl Runner {
    pub fn run<T: Scalar>(self, instance: &OflInstance<T>, seed: u64) -> Result<OflTrace<T>, OflError> {
        match self {
            Runner::Uniform => run_uniform(instance, seed),
            Runner::NaiveUniform => run_naive_uniform(instance, seed),
            Runner::NonUniform => run_nonuniform(instance, seed),
        }
    }
}

/// Runs one trace per seed in parallel. Results come back in seed order.
pub fn run_ensemble<T: Scalar>(
    instance: &OflInstance<T>,
    runner: Runner,
    seeds: &[u64],
) -> Result<Vec<OflTrace<T>>, OflError> {
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    sorted
        .par_iter()
        .map(|&s| runner.run(instance, s))
        .collect()
}
