use crate::ofl::{OflInstance, Runner};
use crate::scalar::{Scalar, Tolerance};

/// Record of one online step.
#[derive(Debug, Clone, PartialEq)]
pub struct OflStep<T> {
    pub step: usize,
    pub request: usize,
    /// Facility constructed at this step, if any.
    pub opened: Option<usize>,
    /// Facility the request is assigned to.
    pub served_by: usize,
    /// Sampled cost level; 0 means "assign to an already open facility".
    pub level: usize,
    /// True connection distance `d(x_i, F_i)`.
    pub d: T,
    /// Auxiliary distance entering the marginal computation.
    pub dhat: T,
    /// Marginal values per level (a single entry for the uniform runners).
    pub deltas: Vec<T>,
    /// Sampling probabilities per level, summing to one.
    pub probs: Vec<T>,
    /// Binding cap, `None` when the step is uncapped.
    pub tau: Option<T>,
    /// `|F_{i-1}|`: the open set before this step is `facilities[..facilities_before]`.
    pub facilities_before: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OflTrace<T> {
    pub runner: Runner,
    pub seed: u64,
    pub steps: Vec<OflStep<T>>,
    /// Facilities in opening order.
    pub facilities: Vec<usize>,
    /// Cost levels `0 = f^(0) < f^(1) < ...` used by the runner.
    pub levels: Vec<T>,
    /// Opening cost as charged to the algorithm (rounded costs on the non-uniform path).
    pub opening_cost: T,
    /// Opening cost of the same facilities at their original costs.
    pub opening_cost_original: T,
    pub d: Vec<T>,
    pub dhat: Vec<T>,
    pub norm_d: T,
    pub norm_dhat: T,
    /// Compensated sum of the per-step marginals of `dhat`.
    pub marginal_sum: T,
}

impl<T: Scalar> OflTrace<T> {
    pub fn total_cost(&self) -> T {
        self.opening_cost + self.norm_d
    }

    pub fn total_cost_original(&self) -> T {
        self.opening_cost_original + self.norm_d
    }

    /// Open set after step `i`.
    pub fn open_after(&self, i: usize) -> &[usize] {
        let s = &self.steps[i];
        let n = s.facilities_before + usize::from(s.opened.is_some());
        &self.facilities[..n]
    }

    /// Verifies the per-step trace invariants against the instance.
    pub fn check_invariants(&self, instance: &OflInstance<T>) -> Result<(), String> {
        let tol = Tolerance::<T>::default();
        let prob_tol = T::of(1e-9);
        for s in &self.steps {
            let i = s.step;
            if !tol.le(s.d, s.dhat) {
                return Err(format!("step {i}: d = {} exceeds dhat = {}", s.d, s.dhat));
            }
            let total: T = s.probs.iter().copied().sum();
            if (total - T::one()).abs() > prob_tol {
                return Err(format!("step {i}: probabilities sum to {total}"));
            }
            if let Some(p) = s.probs.iter().find(|p| !(**p >= T::zero() && **p <= T::one())) {
                return Err(format!("step {i}: probability {p} outside [0, 1]"));
            }
            if self.runner == Runner::Uniform {
                let f = instance.uniform_cost().ok_or("uniform runner on non-uniform costs")?;
                if s.deltas[0] > f + prob_tol {
                    return Err(format!("step {i}: marginal {} exceeds f = {f}", s.deltas[0]));
                }
            }
            let open = self.open_after(i);
            let actual = open
                .iter()
                .map(|&q| instance.metric().dist(s.request, q))
                .fold(T::infinity(), T::min);
            if !tol.eq(actual, s.d) {
                return Err(format!("step {i}: traced d = {} but d(x_i, F_i) = {actual}", s.d));
            }
            if !open.contains(&s.served_by) {
                return Err(format!("step {i}: served by {} which is not open", s.served_by));
            }
        }
        if !tol.eq(self.marginal_sum, self.norm_dhat) {
            return Err(format!(
                "marginals telescope to {} but the norm of dhat is {}",
                self.marginal_sum, self.norm_dhat
            ));
        }
        Ok(())
    }
}
