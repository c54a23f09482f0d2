use rand::Rng;

use crate::probing::ProbingError;
use crate::scalar::{kahan_sum, Scalar};

/// Finite-support distribution on non-negative values.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution<T> {
    support: Vec<T>,
    probs: Vec<T>,
}

impl<T: Scalar> DiscreteDistribution<T> {
    pub fn new(support: Vec<T>, probs: Vec<T>) -> Result<Self, ProbingError> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(ProbingError::InvalidDistribution(format!(
                "{} support points with {} probabilities",
                support.len(),
                probs.len()
            )));
        }
        if let Some(v) = support.iter().find(|v| !(**v >= T::zero()) || v.is_infinite()) {
            return Err(ProbingError::InvalidDistribution(format!("support value {v} is not a finite non-negative number")));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= T::zero())) {
            return Err(ProbingError::InvalidDistribution(format!("negative probability {p}")));
        }
        let total = kahan_sum(probs.iter().copied());
        if (total - T::one()).abs() > T::of(1e-12).max(T::epsilon() * T::of(8.0)) {
            return Err(ProbingError::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { support, probs })
    }

    /// Point mass at `v`.
    pub fn point(v: T) -> Result<Self, ProbingError> {
        Self::new(vec![v], vec![T::one()])
    }

    /// Value `v` with probability `p`, zero otherwise.
    pub fn bernoulli(p: T, v: T) -> Result<Self, ProbingError> {
        Self::new(vec![T::zero(), v], vec![T::one() - p, p])
    }

    pub fn support(&self) -> &[T] {
        &self.support
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn mean(&self) -> T {
        kahan_sum(self.support.iter().zip(&self.probs).map(|(v, p)| *v * *p))
    }

    /// Index of a sampled support point.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        for (k, p) in self.probs.iter().enumerate() {
            cum += p.to_f64_lossy();
            if u < cum {
                return k;
            }
        }
        (0..self.probs.len()).rev().find(|&k| self.probs[k] > T::zero()).unwrap_or(0)
    }
}
