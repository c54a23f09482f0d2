//! Exact offline optimum by enumerating facility sets.

use rayon::prelude::*;

use crate::ofl::{OflError, OflInstance};
use crate::scalar::{CompensatedSum, Scalar};

/// Largest candidate set [`offline_opt`] will enumerate.
pub const MAX_CANDIDATES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineOpt<T> {
    /// Open facilities, in increasing point order.
    pub facilities: Vec<usize>,
    /// Connection distance of each request.
    pub distances: Vec<T>,
    /// Serving facility of each request.
    pub clusters: Vec<usize>,
    /// Sum of the original opening costs.
    pub opening_cost: T,
    /// Norm of the distance vector.
    pub connection_cost: T,
    pub cost: T,
}

/// Exact optimum over non-empty subsets of `candidates`.
///
/// Requests go to their nearest open facility (lowest index on ties). With
/// zero requests the empty solution is returned.
pub fn offline_opt<T: Scalar>(instance: &OflInstance<T>, candidates: &[usize]) -> Result<OfflineOpt<T>, OflError> {
    let mut cands = candidates.to_vec();
    cands.sort_unstable();
    cands.dedup();
    if cands.len() > MAX_CANDIDATES {
        return Err(OflError::Budget {
            candidates: cands.len(),
            limit: MAX_CANDIDATES,
        });
    }
    if let Some(&q) = cands.iter().find(|&&q| q >= instance.metric().len() || !instance.is_openable(q)) {
        return Err(OflError::InvalidInstance(format!("candidate {q} is not an openable point")));
    }
    let n = instance.n_requests();
    if n == 0 {
        return Ok(OfflineOpt {
            facilities: Vec::new(),
            distances: Vec::new(),
            clusters: Vec::new(),
            opening_cost: T::zero(),
            connection_cost: T::zero(),
            cost: T::zero(),
        });
    }
    if cands.is_empty() {
        return Err(OflError::InvalidInstance("no candidate facility sites".into()));
    }
    let metric = instance.metric();
    let dist: Vec<Vec<T>> = cands
        .iter()
        .map(|&q| instance.requests().iter().map(|&x| metric.dist(x, q)).collect())
        .collect();
    let cost_of: Vec<T> = cands.iter().map(|&q| instance.cost(q)).collect();
    let norm = instance.norm();

    let evaluate = |mask: u32| -> (T, Vec<T>, Vec<usize>) {
        let mut d = vec![T::infinity(); n];
        let mut who = vec![0usize; n];
        let mut opening = CompensatedSum::new();
        for (c, row) in dist.iter().enumerate() {
            if mask >> c & 1 == 1 {
                opening.add(cost_of[c]);
                for i in 0..n {
                    // candidates are sorted, so strict improvement keeps the lowest index
                    if row[i] < d[i] {
                        d[i] = row[i];
                        who[i] = c;
                    }
                }
            }
        }
        (opening.value() + norm.value(&d), d, who)
    };

    let full = 1u32 << cands.len();
    let (best_cost, best_mask) = (1..full)
        .into_par_iter()
        .map(|mask| (evaluate(mask).0, mask))
        .reduce(
            || (T::infinity(), 0),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let (_, distances, who) = evaluate(best_mask);
    let facilities: Vec<usize> = (0..cands.len())
        .filter(|c| best_mask >> c & 1 == 1)
        .map(|c| cands[c])
        .collect();
    let opening_cost = facilities.iter().map(|&q| instance.cost(q)).collect::<CompensatedSum<T>>().value();
    let connection_cost = norm.value(&distances);
    Ok(OfflineOpt {
        clusters: who.into_iter().map(|c| cands[c]).collect(),
        facilities,
        distances,
        opening_cost,
        connection_cost,
        cost: best_cost,
    })
}

/// [`offline_opt`] over every openable point.
pub fn offline_opt_openable<T: Scalar>(instance: &OflInstance<T>) -> Result<OfflineOpt<T>, OflError> {
    offline_opt(instance, &instance.openable())
}
