//! Generalized load balancing with an `ℓ1` outer norm: machine `i` with
//! jobs `J` has load `ψ_i((p_ij 1[j ∈ J])_j)` and the objective is the sum
//! of the loads.

use thiserror::Error;

use crate::norms::{check_symmetric, ordered_approx, Norm, NormError};
use crate::scalar::{CompensatedSum, Scalar, Tolerance};

/// Largest `m^n` that [`brute_force_assign`] enumerates.
pub const MAX_ASSIGNMENTS: u64 = 1_000_000;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LoadBalError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("{0} assignments exceed the enumeration limit of {MAX_ASSIGNMENTS}")]
    Budget(u128),
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// `p[i][j]` is the processing time of job `j` on machine `i`; `ψ_i` has dimension `n`.
#[derive(Debug, Clone)]
pub struct LoadBalInstance<T> {
    p: Vec<Vec<T>>,
    inner: Vec<Norm<T>>,
}

impl<T: Scalar> LoadBalInstance<T> {
    pub fn new(p: Vec<Vec<T>>, inner: Vec<Norm<T>>) -> Result<Self, LoadBalError> {
        if p.is_empty() {
            return Err(LoadBalError::InvalidInstance("no machines".into()));
        }
        if inner.len() != p.len() {
            return Err(LoadBalError::InvalidInstance(format!("{} inner norms for {} machines", inner.len(), p.len())));
        }
        let n = p[0].len();
        for (i, row) in p.iter().enumerate() {
            if row.len() != n {
                return Err(LoadBalError::InvalidInstance(format!("machine {i} lists {} jobs, expected {n}", row.len())));
            }
            if let Some((j, v)) = row.iter().enumerate().find(|(_, v)| !(**v >= T::zero()) || v.is_infinite()) {
                return Err(LoadBalError::InvalidInstance(format!("p[{i}][{j}] = {v} is not a finite non-negative time")));
            }
            if inner[i].dim() != n {
                return Err(LoadBalError::InvalidInstance(format!("inner norm {i} has dimension {}, expected {n}", inner[i].dim())));
            }
        }
        Ok(Self { p, inner })
    }

    pub fn machines(&self) -> usize {
        self.p.len()
    }

    pub fn jobs(&self) -> usize {
        self.p[0].len()
    }

    pub fn times(&self) -> &[Vec<T>] {
        &self.p
    }

    pub fn inner_norms(&self) -> &[Norm<T>] {
        &self.inner
    }

    /// Loads and total cost of an arbitrary job-to-machine map.
    pub fn evaluate(&self, sigma: &[usize]) -> Result<Assignment<T>, LoadBalError> {
        if sigma.len() != self.jobs() {
            return Err(LoadBalError::InvalidInstance(format!("assignment covers {} of {} jobs", sigma.len(), self.jobs())));
        }
        if let Some(&i) = sigma.iter().find(|&&i| i >= self.machines()) {
            return Err(LoadBalError::InvalidInstance(format!("machine {i} out of range")));
        }
        Ok(self.evaluate_unchecked(sigma))
    }

    fn evaluate_unchecked(&self, sigma: &[usize]) -> Assignment<T> {
        let loads: Vec<T> = (0..self.machines()).map(|i| self.inner[i].value(&self.load_vector(sigma, i))).collect();
        let total_cost = loads.iter().copied().collect::<CompensatedSum<T>>().value();
        Assignment {
            sigma: sigma.to_vec(),
            loads,
            total_cost,
        }
    }

    /// `(p_ij 1[σ(j) = i])_j`.
    pub fn load_vector(&self, sigma: &[usize], i: usize) -> Vec<T> {
        sigma
            .iter()
            .enumerate()
            .map(|(j, &m)| if m == i { self.p[i][j] } else { T::zero() })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    /// Machine of each job.
    pub sigma: Vec<usize>,
    pub loads: Vec<T>,
    pub total_cost: T,
}

impl<T: Scalar> Assignment<T> {
    /// Recomputes the loads from `sigma` and compares within `1e-9`.
    pub fn is_consistent(&self, instance: &LoadBalInstance<T>) -> bool {
        let Ok(fresh) = instance.evaluate(&self.sigma) else {
            return false;
        };
        let tol = Tolerance::new(T::of(1e-9), T::of(1e-9));
        fresh.loads.iter().zip(&self.loads).all(|(a, b)| tol.eq(*a, *b)) && tol.eq(fresh.total_cost, self.total_cost)
    }
}

/// Processes jobs in `order` (input order when `None`), placing each on the
/// machine whose load grows least; ties go to the lowest machine index.
pub fn greedy_assign<T: Scalar>(instance: &LoadBalInstance<T>, order: Option<&[usize]>) -> Result<Assignment<T>, LoadBalError> {
    let n = instance.jobs();
    let m = instance.machines();
    let default: Vec<usize> = (0..n).collect();
    let order = order.unwrap_or(&default);
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&j| j >= n || std::mem::replace(&mut seen[j], true)) {
        return Err(LoadBalError::InvalidInstance("job order must be a permutation of the jobs".into()));
    }
    let mut vectors = vec![vec![T::zero(); n]; m];
    let mut loads = vec![T::zero(); m];
    let mut sigma = vec![0usize; n];
    for &j in order {
        let mut best: Option<(usize, T, T)> = None;
        for i in 0..m {
            vectors[i][j] = instance.p[i][j];
            let after = instance.inner[i].value(&vectors[i]);
            vectors[i][j] = T::zero();
            let inc = (after - loads[i]).max(T::zero());
            if best.is_none_or(|(_, b, _)| inc < b) {
                best = Some((i, inc, after));
            }
        }
        let (i, _, after) = best.expect("at least one machine");
        vectors[i][j] = instance.p[i][j];
        loads[i] = after;
        sigma[j] = i;
    }
    Ok(instance.evaluate_unchecked(&sigma))
}

/// Exact optimum over all `m^n` assignments; the first minimum in
/// lexicographic order of `σ` wins ties.
pub fn brute_force_assign<T: Scalar>(instance: &LoadBalInstance<T>) -> Result<Assignment<T>, LoadBalError> {
    let n = instance.jobs();
    let m = instance.machines();
    let count = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > u128::from(MAX_ASSIGNMENTS) {
        return Err(LoadBalError::Budget(count));
    }
    let mut sigma = vec![0usize; n];
    let mut best = instance.evaluate_unchecked(&sigma);
    // odometer with job n-1 as the fastest digit gives lexicographic order
    loop {
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            sigma[pos] += 1;
            if sigma[pos] < m {
                break;
            }
            sigma[pos] = 0;
        }
        let a = instance.evaluate_unchecked(&sigma);
        if a.total_cost < best.total_cost {
            best = a;
        }
    }
}

/// Instance with each symmetric `ψ_i` replaced by its ordered approximation,
/// plus the per-machine approximation factors `2(⌊log₂ ρ_i⌋ + 1)`.
pub fn symmetric_reduction<T: Scalar>(instance: &LoadBalInstance<T>, seed: u64) -> Result<(LoadBalInstance<T>, Vec<T>), LoadBalError> {
    let tol = Tolerance::default();
    let mut norms = Vec::with_capacity(instance.machines());
    let mut factors = Vec::with_capacity(instance.machines());
    for (i, psi) in instance.inner.iter().enumerate() {
        check_symmetric(psi, 64, seed.wrapping_add(i as u64), &tol)?;
        let approx = ordered_approx(psi, &tol)?;
        factors.push(approx.factor);
        norms.push(approx.into_norm());
    }
    Ok((LoadBalInstance::new(instance.p.clone(), norms)?, factors))
}
