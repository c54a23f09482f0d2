//! Stochastic probing: exact adaptive and non-adaptive optima on small
//! instances and the ratio between them.
//!
//! Policies are deterministic decision trees. Randomised policies cannot do
//! better than the best deterministic one, so the DP argmax is an optimum.

pub mod distribution;
pub mod dp;
pub mod family;
pub mod policy;
pub mod sweep;

pub use distribution::DiscreteDistribution;
pub use dp::{adaptive_opt, adaptivity_gap, expected_on_set, nonadaptive_opt, sample_path_strategy, GapReport, ProbingBudget};
pub use family::{downward_closed_families, set_string, FeasibleFamily};
pub use policy::{Policy, PolicyNode};
pub use sweep::{default_objectives, run_sweep, two_point_grid, SweepConfig, SweepRow};

use thiserror::Error;

use crate::norms::{Norm, NormError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProbingError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("family is not downward closed: {set} is a member but {missing} is not")]
    NotDownwardClosed { set: String, missing: String },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// Independent distributions, a feasible family and an objective norm, all over `[n]`.
#[derive(Debug, Clone)]
pub struct ProbingInstance<T> {
    distributions: Vec<DiscreteDistribution<T>>,
    family: FeasibleFamily,
    norm: Norm<T>,
}

impl<T: Scalar> ProbingInstance<T> {
    pub fn new(distributions: Vec<DiscreteDistribution<T>>, family: FeasibleFamily, norm: Norm<T>) -> Result<Self, ProbingError> {
        let n = distributions.len();
        if family.ground_size() != n {
            return Err(ProbingError::InvalidInstance(format!(
                "family over {} elements for {n} distributions",
                family.ground_size()
            )));
        }
        if norm.dim() != n {
            return Err(ProbingError::InvalidInstance(format!("norm of dimension {} for {n} distributions", norm.dim())));
        }
        family.verify_downward_closed()?;
        Ok(Self {
            distributions,
            family,
            norm,
        })
    }

    pub fn n(&self) -> usize {
        self.distributions.len()
    }

    pub fn distributions(&self) -> &[DiscreteDistribution<T>] {
        &self.distributions
    }

    pub fn family(&self) -> &FeasibleFamily {
        &self.family
    }

    pub fn norm(&self) -> &Norm<T> {
        &self.norm
    }

    /// Same instance with elements relabelled: new element `k` is old element `perm[k]`.
    ///
    /// Only cardinality families are relabelled structurally; explicit
    /// families are mapped set by set.
    pub fn permuted(&self, perm: &[usize], norm: Norm<T>) -> Result<Self, ProbingError> {
        let n = self.n();
        let distributions = perm.iter().map(|&p| self.distributions[p].clone()).collect();
        let family = match &self.family {
            FeasibleFamily::Cardinality { n, k } => FeasibleFamily::cardinality(*n, *k)?,
            _ => FeasibleFamily::explicit(
                n,
                self.family.members().into_iter().map(|s| {
                    (0..n).filter(|&k| s >> perm[k] & 1 == 1).fold(0u64, |m, k| m | 1 << k)
                }),
            )?,
        };
        Self::new(distributions, family, norm)
    }
}
