//! Exhaustive sweep over small probing instances.

use std::sync::Arc;

use rayon::prelude::*;

use crate::norms::{ConcaveCardinality, CoverageFunction, Norm};
use crate::probing::{adaptivity_gap, downward_closed_families, DiscreteDistribution, ProbingBudget, ProbingError, ProbingInstance};
use crate::scalar::Scalar;

/// Grid of instances: every downward-closed family on `n` elements, every
/// assignment of a grid distribution to each element, every objective.
#[derive(Debug, Clone)]
pub struct SweepConfig<T> {
    pub n: usize,
    pub distributions: Vec<DiscreteDistribution<T>>,
    pub objectives: Vec<(String, Norm<T>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub id: usize,
    pub adaptive: T,
    pub nonadaptive: T,
    pub ratio: T,
    pub norm_kind: String,
    pub family_kind: String,
}

/// Two-point distributions `a < b` from `values`, taking `b` with each probability in `probs`.
pub fn two_point_grid<T: Scalar>(values: &[T], probs: &[T]) -> Result<Vec<DiscreteDistribution<T>>, ProbingError> {
    let mut out = Vec::new();
    for (ia, &a) in values.iter().enumerate() {
        for &b in &values[ia + 1..] {
            for &p in probs {
                out.push(DiscreteDistribution::new(vec![a, b], vec![T::one() - p, p])?);
            }
        }
    }
    Ok(out)
}

/// `ℓ1`, `ℓ∞`, Top-2, and Lovász extensions of a coverage function and of `√|S|`.
pub fn default_objectives<T: Scalar>(n: usize) -> Result<Vec<(String, Norm<T>)>, ProbingError> {
    let mut out = vec![("l1".to_string(), Norm::l1(n)), ("linf".to_string(), Norm::linf(n))];
    if n > 2 {
        out.push(("top_k(2)".to_string(), Norm::top_k(n, 2)?));
    }
    let weights = (0..=n).map(|u| T::one() + T::of_usize(u) / T::of(2.0)).collect();
    let covers = (0..n).map(|i| vec![i, i + 1]).collect();
    out.push(("lovasz(coverage)".to_string(), Norm::lovasz(Arc::new(CoverageFunction::new(weights, covers)?))?));
    let sqrt = (0..=n).map(|k| T::of_usize(k).sqrt()).collect();
    out.push(("lovasz(sqrt_card)".to_string(), Norm::lovasz(Arc::new(ConcaveCardinality::new(sqrt)?))?));
    Ok(out)
}

/// Evaluates every instance of the grid in parallel; rows come back in id order.
pub fn run_sweep<T: Scalar>(config: &SweepConfig<T>, budget: &ProbingBudget) -> Result<Vec<SweepRow<T>>, ProbingError> {
    let n = config.n;
    let families = downward_closed_families(n)?;
    let labels: Vec<String> = families.iter().map(|f| f.label()).collect();
    let nd = config.distributions.len();
    let combos = nd
        .checked_pow(n as u32)
        .ok_or_else(|| ProbingError::Budget("distribution grid too large".into()))?;
    let per_family = combos * config.objectives.len();
    let total = families.len() * per_family;
    if total > 50_000_000 {
        return Err(ProbingError::Budget(format!("{total} sweep instances")));
    }
    (0..total)
        .into_par_iter()
        .map(|id| {
            let fam = id / per_family;
            let combo = (id % per_family) / config.objectives.len();
            let obj = id % config.objectives.len();
            let mut c = combo;
            let dists = (0..n)
                .map(|_| {
                    let d = config.distributions[c % nd].clone();
                    c /= nd;
                    d
                })
                .collect();
            let (name, norm) = &config.objectives[obj];
            let inst = ProbingInstance::new(dists, families[fam].clone(), norm.clone())?;
            let gap = adaptivity_gap(&inst, budget)?;
            Ok(SweepRow {
                id,
                adaptive: gap.adaptive,
                nonadaptive: gap.nonadaptive,
                ratio: gap.ratio,
                norm_kind: name.clone(),
                family_kind: labels[fam].clone(),
            })
        })
        .collect()
}
